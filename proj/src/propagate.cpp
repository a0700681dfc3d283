#include "qmem/propagate.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmem {

namespace {

double inf_norm(const Matrix& H)
{
    return H.cwiseAbs().rowwise().sum().maxCoeff();
}

Matrix hermitize(const Matrix& m)
{
    return 0.5 * (m + m.adjoint());
}

}  // namespace

Matrix step_rk4(const Matrix& rho, const Matrix& H, const RelaxationRates& rates, double dt)
{
    if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
    const double scale = inf_norm(H) + rates.max_rate();
    if (dt * scale > 0.1 + 1e-12) {
        std::ostringstream os;
        os << "step_rk4: dt = " << dt << " us exceeds the stability limit " << 0.1 / scale << " us";
        throw std::invalid_argument(os.str());
    }
    const Matrix k1 = equation_of_motion(H, rates, rho);
    const Matrix k2 = equation_of_motion(H, rates, hermitize(rho + 0.5 * dt * k1));
    const Matrix k3 = equation_of_motion(H, rates, hermitize(rho + 0.5 * dt * k2));
    const Matrix k4 = equation_of_motion(H, rates, hermitize(rho + dt * k3));
    return hermitize(rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

Matrix step_rk4(const Matrix& rho, const LevelSystem& sys, const PulseSegment& seg, double delta_khz, double dt)
{
    RateTable g = sys.gamma;
    for (const auto& ov : seg.overrides) {
        g[ov.i - 1][ov.j - 1] = ov.gamma_khz;
        g[ov.j - 1][ov.i - 1] = ov.gamma_khz;
    }
    return step_rk4(rho, build_hamiltonian(sys, seg, delta_khz), relaxation_rates(sys, g), dt);
}

Matrix propagate_segment_exact(const Matrix& rho, const LevelSystem& sys, const PulseSegment& seg,
                               double delta_khz, int substeps, std::vector<Matrix>* samples)
{
    const int n = sys.n_levels;
    if (rho.rows() != n || rho.cols() != n)
        throw std::invalid_argument("propagate_segment_exact: dimension mismatch");
    const double dur = seg.duration_us.value_or(0.0);
    if (dur == 0.0) {
        if (samples) samples->push_back(rho);
        return rho;
    }
    RateTable g = sys.gamma;
    for (const auto& ov : seg.overrides) {
        g[ov.i - 1][ov.j - 1] = ov.gamma_khz;
        g[ov.j - 1][ov.i - 1] = ov.gamma_khz;
    }
    const Matrix L = superoperator(build_hamiltonian(sys, seg, delta_khz), relaxation_rates(sys, g));
    substeps = std::max(1, substeps);
    const Matrix P = (L * (dur / substeps)).exp();
    Vector v = vec(rho);
    for (int s = 0; s < substeps; ++s) {
        v = P * v;
        if (samples) samples->push_back(unvec(v, n));
    }
    return unvec(v, n);
}

SampleSchedule make_schedule(const Timeline& tl, double sample_interval_us)
{
    if (!(sample_interval_us > 0.0)) throw std::invalid_argument("sample interval must be positive");
    SampleSchedule s;
    s.times.push_back(0.0);
    for (std::size_t i = 0; i < tl.segments.size(); ++i) {
        const auto& seg = tl.segments[i];
        const double dur = seg.t_end - seg.t_start;
        const int steps = std::max(1, static_cast<int>(std::ceil(dur / sample_interval_us - 1e-9)));
        const double h = dur / steps;
        s.blocks.push_back({i, steps, h});
        for (int k = 1; k < steps; ++k) s.times.push_back(seg.t_start + k * h);
        s.times.push_back(seg.t_end);
        s.segment_end_index.push_back(s.times.size() - 1);
    }
    return s;
}

Matrix initial_density(const Timeline& tl, int n)
{
    Matrix rho = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) rho(i, i) = tl.initial[i];
    return rho;
}

namespace {

void check_trace(const Vector& v, int n, double tol, double delta, double t)
{
    cplx tr = 0.0;
    for (int i = 0; i < n; ++i) tr += v(i * n + i);
    if (!(std::abs(tr - 1.0) <= tol)) {
        std::ostringstream os;
        os << "trace drift " << std::abs(tr - 1.0) << " at t = " << t << " us, delta = " << delta << " kHz";
        throw NumericalError(os.str(), delta, t);
    }
}

}  // namespace

void run_member(const LevelSystem& sys, const Timeline& tl, const SampleSchedule& sched, double delta_khz,
                const RunOptions& opt, const SampleSink& sink)
{
    const int n = sys.n_levels;
    Vector v = vec(initial_density(tl, n));
    std::size_t index = 0;
    sink(index++, v);

    for (const auto& block : sched.blocks) {
        const auto& ts = tl.segments[block.segment];
        const Matrix H = build_hamiltonian(sys, ts.segment, delta_khz);
        const RelaxationRates rates = relaxation_rates(sys, ts.gamma);

        if (opt.integrator == Integrator::exact) {
            const Matrix P = (superoperator(H, rates) * block.h).exp();
            for (int k = 0; k < block.steps; ++k) {
                v = P * v;
                check_trace(v, n, opt.trace_tolerance, delta_khz, ts.t_start + (k + 1) * block.h);
                sink(index++, v);
            }
        } else {
            const double scale = inf_norm(H) + rates.max_rate();
            double h = opt.dt_us;
            if (scale > 0.0) h = std::min(h, opt.rk4_phase_cap / scale);
            const int sub = std::max(1, static_cast<int>(std::ceil(block.h / h - 1e-9)));
            const double hs = block.h / sub;
            Matrix rho = unvec(v, n);
            for (int k = 0; k < block.steps; ++k) {
                for (int s = 0; s < sub; ++s) rho = step_rk4(rho, H, rates, hs);
                v = vec(rho);
                check_trace(v, n, opt.trace_tolerance, delta_khz, ts.t_start + (k + 1) * block.h);
                sink(index++, v);
            }
        }
    }
}

std::size_t TimeTrace::index_at(double t) const
{
    if (times.empty()) throw std::out_of_range("empty trace");
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end()) return times.size() - 1;
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i > 0 && (t - times[i - 1]) < (times[i] - t)) --i;
    return i;
}

TimeTrace run_member(const LevelSystem& sys, const PulseSequence& seq, double delta_khz, const RunOptions& opt)
{
    const Timeline tl = build_timeline(sys, seq);
    const SampleSchedule sched = make_schedule(tl, opt.sample_interval_us);
    TimeTrace trace;
    trace.delta_khz = delta_khz;
    trace.times = sched.times;
    trace.states.resize(sched.times.size());
    const int n = sys.n_levels;
    run_member(sys, tl, sched, delta_khz, opt,
               [&](std::size_t i, const Vector& v) { trace.states[i] = unvec(v, n); });
    return trace;
}

double cross_validate(const LevelSystem& sys, const PulseSequence& seq, double delta_khz, double dt_us,
                      const RunOptions& base)
{
    RunOptions a = base, b = base;
    a.integrator = Integrator::exact;
    b.integrator = Integrator::rk4;
    b.dt_us = dt_us;
    const TimeTrace ta = run_member(sys, seq, delta_khz, a);
    const TimeTrace tb = run_member(sys, seq, delta_khz, b);
    double dev = 0.0;
    for (std::size_t i = 0; i < ta.states.size(); ++i)
        dev = std::max(dev, (ta.states[i] - tb.states[i]).cwiseAbs().maxCoeff());
    return dev;
}

}  // namespace qmem
