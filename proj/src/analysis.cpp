#include "qmem/analysis.hpp"

#include "qmem/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qmem {

namespace {

// Vertex of the parabola through three samples around index i.
std::pair<double, double> refine(const std::vector<double>& t, const std::vector<double>& a, std::size_t i)
{
    if (i == 0 || i + 1 >= a.size()) return {t[i], a[i]};
    const double h1 = t[i - 1] - t[i], h2 = t[i + 1] - t[i];
    const double d1 = (a[i - 1] - a[i]) / h1, d2 = (a[i + 1] - a[i]) / h2;
    const double c2 = (d2 - d1) / (h2 - h1);
    const double c1 = d1 - c2 * h1;
    if (!(c2 < 0.0)) return {t[i], a[i]};
    const double x = std::clamp(-c1 / (2.0 * c2), h1, h2);
    return {t[i] + x, a[i] + c1 * x + c2 * x * x};
}

int coherence_column(Observable obs)
{
    return obs == Observable::spin ? 1 : 2;
}

}  // namespace

EchoReport detect_echoes(const std::vector<double>& times, const std::vector<double>& amplitude, double t0,
                         double t1, const std::vector<ExpectedEcho>& expected, const DetectOptions& opt)
{
    if (times.size() != amplitude.size()) throw std::invalid_argument("detect_echoes: size mismatch");
    std::vector<Echo> peaks;
    for (std::size_t i = 1; i + 1 < times.size(); ++i) {
        if (times[i] < t0 || times[i] > t1) continue;
        const double a = amplitude[i];
        if (a < opt.floor || !(a > amplitude[i - 1]) || !(a >= amplitude[i + 1])) continue;
        const auto [tp, ap] = refine(times, amplitude, i);
        peaks.push_back({tp, ap, {}, {}});
    }

    EchoReport report;
    if (expected.empty()) {
        report.echoes = peaks;
        return report;
    }

    std::vector<bool> used(peaks.size(), false);
    std::vector<std::pair<double, std::size_t>> order;  // (time, bit index)
    for (std::size_t b = 0; b < expected.size(); ++b) {
        std::size_t best = peaks.size();
        for (std::size_t k = 0; k < peaks.size(); ++k) {
            if (used[k] || std::abs(peaks[k].time - expected[b].time) > opt.tolerance_us) continue;
            if (best == peaks.size() || peaks[k].amplitude > peaks[best].amplitude) best = k;
        }
        if (best == peaks.size()) continue;
        used[best] = true;
        Echo e = peaks[best];
        e.label = expected[b].label;
        report.echoes.push_back(e);
        order.emplace_back(e.time, b);
    }
    for (std::size_t k = 0; k < peaks.size(); ++k)
        if (!used[k]) report.unmatched.push_back(peaks[k]);

    std::sort(report.echoes.begin(), report.echoes.end(),
              [](const Echo& a, const Echo& b) { return a.time < b.time; });
    std::sort(order.begin(), order.end());
    report.time_reversed = order.size() >= 2;
    for (std::size_t k = 1; k < order.size(); ++k)
        if (order[k].second >= order[k - 1].second) report.time_reversed = false;
    return report;
}

Echo peak_near(const std::vector<double>& times, const std::vector<double>& amplitude, double t, double tol)
{
    std::size_t best = times.size();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::abs(times[i] - t) > tol) continue;
        if (best == times.size() || amplitude[i] > amplitude[best]) best = i;
    }
    if (best == times.size()) return {t, 0.0, {}, {}};
    const auto [tp, ap] = refine(times, amplitude, best);
    return {tp, ap, {}, {}};
}

std::vector<double> echo_channel(const EnsembleTrace& trace, Observable obs)
{
    std::vector<double> a(trace.times.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] = obs == Observable::spin ? std::abs(trace.S[i]) : std::abs(trace.P[i].imag());
    return a;
}

double rephased_reference(const EnsembleTrace& trace, const Timeline& tl, const BitInfo& bit, Observable obs,
                          double step_us)
{
    auto it = trace.snapshots.find("write_end");
    if (it == trace.snapshots.end()) throw std::invalid_argument("trace has no write_end snapshot");
    const auto& states = it->second;
    const int col = coherence_column(obs);
    const double tw = tl.require_marker("write_end");
    const double tau = bit.end - bit.start;
    const double center = tw - bit.center();

    auto value = [&](double s) {
        cplx sum = 0.0;
        for (std::size_t j = 0; j < states.size(); ++j)
            sum += trace.weights[j] * states[j](0, col) * std::polar(1.0, -to_angular(trace.deltas[j]) * s);
        return std::abs(sum);
    };

    const int n = std::max(2, static_cast<int>(std::ceil(tau / step_us)));
    std::vector<double> s(n + 1), v(n + 1);
    for (int k = 0; k <= n; ++k) {
        s[k] = center - 0.5 * tau + tau * k / n;
        v[k] = value(s[k]);
    }
    const auto k = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    return std::max(v[k], refine(s, v, k).second);
}

double retrieval_efficiency(const EnsembleTrace& trace, const Timeline& tl, const BitInfo& bit, const Echo& echo,
                            Observable obs, EfficiencyReference ref)
{
    double reference = 0.0;
    if (ref == EfficiencyReference::write_rephased) {
        reference = rephased_reference(trace, tl, bit, obs);
    } else {
        const auto channel = echo_channel(trace, obs);
        reference = channel[trace.index_at(bit.end)];
    }
    if (!(reference > 0.0)) throw std::invalid_argument("retrieval_efficiency: zero reference amplitude");
    return echo.amplitude / reference;
}

std::vector<BitEfficiency> bit_efficiencies(const Scenario& sc, const EnsembleTrace& trace, EfficiencyReference ref)
{
    const Timeline tl = sc.timeline();
    const auto channel = echo_channel(trace, sc.observable);
    const double tw = tl.marker("write_end").value_or(0.0);
    std::vector<BitEfficiency> out;
    for (const auto& bit : bits_of(tl)) {
        BitEfficiency b;
        b.label = bit.label;
        b.expected_time = expected_echo_time(tl, bit);
        const Echo e = peak_near(trace.times, channel, b.expected_time, 0.5 * (bit.end - bit.start));
        b.echo_time = e.time;
        b.amplitude = e.amplitude;
        b.reference = ref == EfficiencyReference::write_rephased ? rephased_reference(trace, tl, bit, sc.observable)
                                                                  : channel[trace.index_at(bit.end)];
        if (!(b.reference > 0.0)) throw std::invalid_argument("zero reference amplitude for bit " + bit.label);
        b.efficiency = b.amplitude / b.reference;
        b.storage_time = e.time - (ref == EfficiencyReference::write_rephased ? tw : bit.end);
        out.push_back(b);
    }
    return out;
}

EchoReport analyze_echoes(const Scenario& sc, const EnsembleTrace& trace, const DetectOptions& opt,
                          EfficiencyReference ref)
{
    const Timeline tl = sc.timeline();
    const auto bits = bits_of(tl);
    std::vector<ExpectedEcho> expected;
    for (const auto& b : bits) expected.push_back({b.label, expected_echo_time(tl, b)});
    DetectOptions o = opt;
    if (!bits.empty()) o.tolerance_us = 0.5 * data_pulse_length(tl);
    const double t0 = tl.marker("rephase_end").value_or(0.0);
    EchoReport r = detect_echoes(trace.times, echo_channel(trace, sc.observable), t0, tl.duration, expected, o);
    for (auto& e : r.echoes) {
        const auto it = std::find_if(bits.begin(), bits.end(), [&](const BitInfo& b) { return b.label == e.label; });
        e.efficiency = retrieval_efficiency(trace, tl, *it, e, sc.observable, ref);
    }
    return r;
}

FitResult fit_exponential(const std::vector<FitPoint>& points)
{
    if (points.size() < 2) throw std::invalid_argument("fit_exponential: need at least two points");
    const double n = static_cast<double>(points.size());
    double st = 0.0, sy = 0.0;
    for (const auto& p : points) {
        if (!(p.value > 0.0)) throw std::invalid_argument("fit_exponential: values must be positive");
        st += p.t;
        sy += std::log(p.value);
    }
    const double mt = st / n, my = sy / n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (const auto& p : points) {
        const double dt = p.t - mt, dy = std::log(p.value) - my;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if (!(stt > 0.0)) throw std::invalid_argument("fit_exponential: all abscissae are equal");
    const double slope = sty / stt;
    const double intercept = my - slope * mt;

    double ss_res = 0.0;
    for (const auto& p : points) {
        const double r = std::log(p.value) - (intercept + slope * p.t);
        ss_res += r * r;
    }
    FitResult f;
    f.points = points.size();
    f.amplitude = std::exp(intercept);
    f.converged = slope < 0.0;
    f.tau_us = f.converged ? -1.0 / slope : std::numeric_limits<double>::infinity();
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
    return f;
}

PhaseReport phase_diagnostics(const TimeTrace& plus, const TimeTrace& minus, double t_before, double t_after)
{
    if (plus.states.empty() || minus.states.empty())
        throw std::invalid_argument("phase_diagnostics: missing retained members");
    const TimeTrace* m[2] = {&plus, &minus};
    PhaseReport r;
    for (int k = 0; k < 2; ++k) {
        const cplx before = m[k]->at(t_before)(0, 1);
        const cplx after = m[k]->at(t_after)(0, 1);
        const cplx mirror_before = m[1 - k]->at(t_before)(0, 1);
        r.re_recovery_error = std::max(r.re_recovery_error, std::abs(after.real() - before.real()));
        r.im_reversal_error = std::max(r.im_reversal_error, std::abs(after.imag() + before.imag()));
        r.im_recovery_error = std::max(r.im_recovery_error, std::abs(after.imag() - before.imag()));
        r.swap_error = std::max(r.swap_error, std::abs(after.imag() - mirror_before.imag()));
    }
    return r;
}

long storage_capacity(double t2s_us, double tau_us, std::vector<std::string>* warnings)
{
    if (!(t2s_us > 0.0) || !(tau_us > 0.0)) throw std::invalid_argument("storage_capacity: inputs must be positive");
    const long n = static_cast<long>(std::floor(t2s_us / tau_us));
    if (n == 0 && warnings) warnings->push_back("data pulse longer than T2: no bit fits in the storage window");
    return n;
}

std::vector<double> echo_window(const std::vector<double>& times, const std::vector<double>& amplitude,
                                double center, double half_width, int n)
{
    if (times.size() < 2) throw std::invalid_argument("echo_window: trace too short");
    std::vector<double> w(n);
    for (int k = 0; k < n; ++k) {
        const double t = center - half_width + 2.0 * half_width * k / (n - 1);
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - times.begin()), 1, times.size() - 1);
        const double f = std::clamp((t - times[i - 1]) / (times[i] - times[i - 1]), 0.0, 1.0);
        w[k] = amplitude[i - 1] + f * (amplitude[i] - amplitude[i - 1]);
    }
    return w;
}

double shape_similarity(const std::vector<std::vector<double>>& windows)
{
    if (windows.size() < 2) throw std::invalid_argument("shape_similarity: need at least two echoes");
    std::vector<std::vector<double>> norm;
    for (const auto& w : windows) {
        const double peak = *std::max_element(w.begin(), w.end(), [](double a, double b) {
            return std::abs(a) < std::abs(b);
        });
        if (peak == 0.0) throw std::invalid_argument("shape_similarity: zero-amplitude echo");
        std::vector<double> v(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / peak;
        norm.push_back(std::move(v));
    }
    double dev = 0.0;
    for (std::size_t a = 0; a < norm.size(); ++a)
        for (std::size_t b = a + 1; b < norm.size(); ++b) {
            if (norm[a].size() != norm[b].size()) throw std::invalid_argument("shape_similarity: window sizes differ");
            for (std::size_t i = 0; i < norm[a].size(); ++i) dev = std::max(dev, std::abs(norm[a][i] - norm[b][i]));
        }
    return dev;
}

}  // namespace qmem
