#include "qmem/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

namespace qmem {

DetuningGrid build_grid(const EnsembleSpec& spec)
{
    if (!(spec.spacing_khz > 0.0)) throw std::invalid_argument("build_grid: spacing must be > 0");
    if (!(spec.fwhm_khz >= 0.0)) throw std::invalid_argument("build_grid: FWHM must be >= 0");
    if (!(spec.truncation_khz >= 0.0)) throw std::invalid_argument("build_grid: truncation must be >= 0");

    DetuningGrid g;
    const double ratio = spec.truncation_khz / spec.spacing_khz;
    long half = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(half)) > 1e-9) {
        half = static_cast<long>(std::ceil(ratio));
        std::ostringstream os;
        os << "truncation " << spec.truncation_khz << " kHz is not a multiple of the spacing; rounded out to "
           << half * spec.spacing_khz << " kHz";
        g.warnings.push_back(os.str());
    }

    const double c = 4.0 * std::numbers::ln2 / (spec.fwhm_khz * spec.fwhm_khz);
    for (long k = -half; k <= half; ++k) {
        const double d = static_cast<double>(k) * spec.spacing_khz;
        double w;
        if (spec.fwhm_khz == 0.0)
            w = (k == 0) ? 1.0 : 0.0;
        else
            w = std::exp(-c * d * d);
        g.deltas.push_back(d);
        g.weights.push_back(w);
    }
    double sum = 0.0;
    for (double w : g.weights) sum += w;
    for (double& w : g.weights) w /= sum;
    return g;
}

DetuningGrid single_member_grid(double delta_khz)
{
    return {{delta_khz}, {1.0}, {}};
}

const TimeTrace* EnsembleTrace::member(double delta_khz) const
{
    for (const auto& t : retained)
        if (std::abs(t.delta_khz - delta_khz) < 1e-9) return &t;
    return nullptr;
}

std::size_t EnsembleTrace::index_at(double t) const
{
    if (times.empty()) throw std::out_of_range("empty trace");
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end()) return times.size() - 1;
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i > 0 && (t - times[i - 1]) < (times[i] - t)) --i;
    return i;
}

namespace {

// Per-member observables, buffered so members can run out of order.
struct MemberResult {
    std::vector<cplx> s;
    std::vector<cplx> p;
    std::vector<std::array<double, kMaxLevels>> pops;
    std::vector<Matrix> snapshots;
    TimeTrace full;
    double drift = 0.0;
    double herm = 0.0;
};

struct SweepPlan {
    Timeline tl;
    SampleSchedule sched;
    std::vector<std::size_t> snapshot_index;
    int n = 3;
};

SweepPlan make_plan(const LevelSystem& sys, const PulseSequence& seq, const SweepOptions& opt)
{
    SweepPlan plan;
    plan.tl = build_timeline(sys, seq);
    plan.sched = make_schedule(plan.tl, opt.run.sample_interval_us);
    plan.n = sys.n_levels;
    for (const auto& name : opt.snapshot_markers) {
        const double t = plan.tl.require_marker(name);
        auto it = std::lower_bound(plan.sched.times.begin(), plan.sched.times.end(), t - 1e-9);
        plan.snapshot_index.push_back(static_cast<std::size_t>(it - plan.sched.times.begin()));
    }
    return plan;
}

bool is_retained(const SweepOptions& opt, double delta)
{
    return std::any_of(opt.retained_deltas.begin(), opt.retained_deltas.end(),
                       [&](double d) { return std::abs(d - delta) < 1e-9; });
}

double state_drift(const Vector& v, int n)
{
    cplx tr = 0.0;
    for (int i = 0; i < n; ++i) tr += v(i * n + i);
    return std::abs(tr - 1.0);
}

double state_herm(const Vector& v, int n)
{
    double e = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) e = std::max(e, std::abs(v(a * n + b) - std::conj(v(b * n + a))));
    return e;
}

MemberResult run_one(const LevelSystem& sys, const SweepPlan& plan, double delta, bool keep_full,
                     const SweepOptions& opt)
{
    const std::size_t ns = plan.sched.times.size();
    const int n = plan.n;
    MemberResult r;
    r.s.resize(ns);
    r.p.resize(ns);
    r.pops.resize(ns);
    r.snapshots.resize(plan.snapshot_index.size());
    if (keep_full) {
        r.full.delta_khz = delta;
        r.full.times = plan.sched.times;
        r.full.states.resize(ns);
    }
    run_member(sys, plan.tl, plan.sched, delta, opt.run, [&](std::size_t i, const Vector& v) {
        r.s[i] = v(1);
        r.p[i] = v(2);
        std::array<double, kMaxLevels> pop{};
        for (int k = 0; k < n; ++k) pop[k] = v(k * n + k).real();
        r.pops[i] = pop;
        r.drift = std::max(r.drift, state_drift(v, n));
        r.herm = std::max(r.herm, state_herm(v, n));
        for (std::size_t m = 0; m < plan.snapshot_index.size(); ++m)
            if (plan.snapshot_index[m] == i) r.snapshots[m] = unvec(v, n);
        if (keep_full) r.full.states[i] = unvec(v, n);
    });
    return r;
}

EnsembleTrace empty_trace(const SweepPlan& plan, const DetuningGrid& grid, const SweepOptions& opt)
{
    EnsembleTrace t;
    const std::size_t ns = plan.sched.times.size();
    t.times = plan.sched.times;
    t.S.assign(ns, cplx{});
    t.P.assign(ns, cplx{});
    t.populations.assign(ns, {});
    t.deltas = grid.deltas;
    t.weights = grid.weights;
    for (const auto& name : opt.snapshot_markers) t.snapshots[name].resize(grid.deltas.size());
    return t;
}

void accumulate(EnsembleTrace& t, MemberResult& r, double w, std::size_t member, const SweepOptions& opt)
{
    const std::size_t ns = t.times.size();
    for (std::size_t i = 0; i < ns; ++i) {
        t.S[i] += w * r.s[i];
        t.P[i] += w * r.p[i];
        for (int k = 0; k < kMaxLevels; ++k) t.populations[i][k] += w * r.pops[i][k];
    }
    for (std::size_t m = 0; m < opt.snapshot_markers.size(); ++m)
        t.snapshots[opt.snapshot_markers[m]][member] = std::move(r.snapshots[m]);
    t.max_trace_drift = std::max(t.max_trace_drift, r.drift);
    t.max_hermiticity_error = std::max(t.max_hermiticity_error, r.herm);
}

void add_missing_retained(EnsembleTrace& t, const LevelSystem& sys, const SweepPlan& plan,
                          const DetuningGrid& grid, const SweepOptions& opt)
{
    for (double d : opt.retained_deltas) {
        const bool in_grid = std::any_of(grid.deltas.begin(), grid.deltas.end(),
                                         [&](double g) { return std::abs(g - d) < 1e-9; });
        if (!in_grid && !t.member(d)) t.retained.push_back(run_one(sys, plan, d, true, opt).full);
    }
    std::sort(t.retained.begin(), t.retained.end(),
              [](const TimeTrace& a, const TimeTrace& b) { return a.delta_khz < b.delta_khz; });
}

std::string member_failure(double delta, const std::string& what)
{
    std::ostringstream os;
    os << "member delta = " << delta << " kHz failed: " << what;
    return os.str();
}

}  // namespace

EnsembleTrace sweep(const LevelSystem& sys, const PulseSequence& seq, const DetuningGrid& grid,
                    const SweepOptions& opt)
{
    const SweepPlan plan = make_plan(sys, seq, opt);
    EnsembleTrace trace = empty_trace(plan, grid, opt);
    const std::size_t m = grid.deltas.size();
    const std::size_t chunk = std::max<std::size_t>(1, opt.chunk_size);

    std::vector<MemberResult> buffer(chunk);
    std::vector<std::exception_ptr> errors(chunk);
    for (std::size_t base = 0; base < m; base += chunk) {
        const std::size_t count = std::min(chunk, m - base);
        std::fill(errors.begin(), errors.end(), nullptr);

#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(count); ++j) {
            const double d = grid.deltas[base + j];
            try {
                buffer[j] = run_one(sys, plan, d, is_retained(opt, d), opt);
            } catch (...) {
                errors[j] = std::current_exception();
            }
        }

        for (std::size_t j = 0; j < count; ++j) {
            const double d = grid.deltas[base + j];
            if (errors[j]) {
                try {
                    std::rethrow_exception(errors[j]);
                } catch (const NumericalError& e) {
                    throw NumericalError(member_failure(d, e.what()), d, e.t_us);
                } catch (const std::exception& e) {
                    throw std::runtime_error(member_failure(d, e.what()));
                }
            }
            accumulate(trace, buffer[j], grid.weights[base + j], base + j, opt);
            if (is_retained(opt, d)) trace.retained.push_back(std::move(buffer[j].full));
            buffer[j] = MemberResult{};
        }
    }
    add_missing_retained(trace, sys, plan, grid, opt);
    return trace;
}

EnsembleTrace sweep_serial(const LevelSystem& sys, const PulseSequence& seq, const DetuningGrid& grid,
                           const SweepOptions& opt)
{
    const SweepPlan plan = make_plan(sys, seq, opt);
    EnsembleTrace trace = empty_trace(plan, grid, opt);
    for (std::size_t j = 0; j < grid.deltas.size(); ++j) {
        const double d = grid.deltas[j];
        MemberResult r;
        try {
            r = run_one(sys, plan, d, is_retained(opt, d), opt);
        } catch (const NumericalError& e) {
            throw NumericalError(member_failure(d, e.what()), d, e.t_us);
        }
        accumulate(trace, r, grid.weights[j], j, opt);
        if (is_retained(opt, d)) trace.retained.push_back(std::move(r.full));
    }
    add_missing_retained(trace, sys, plan, grid, opt);
    return trace;
}

EnsembleTrace combine_phase_cycled(const EnsembleTrace& a, const EnsembleTrace& b)
{
    if (a.times != b.times || a.deltas != b.deltas)
        throw std::invalid_argument("combine_phase_cycled: traces do not share a time base and grid");
    EnsembleTrace out = a;
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        out.S[i] = 0.5 * (a.S[i] - b.S[i]);
        out.P[i] = 0.5 * (a.P[i] - b.P[i]);
    }
    for (auto& [name, states] : out.snapshots) {
        const auto& other = b.snapshots.at(name);
        for (std::size_t j = 0; j < states.size(); ++j) states[j] = 0.5 * (states[j] - other[j]);
    }
    out.max_trace_drift = std::max(a.max_trace_drift, b.max_trace_drift);
    out.max_hermiticity_error = std::max(a.max_hermiticity_error, b.max_hermiticity_error);
    return out;
}

}  // namespace qmem
