#include "qmem/model.hpp"

#include "qmem/units.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qmem {

std::string_view field_name(Field f)
{
    switch (f) {
    case Field::probe: return "probe";
    case Field::coupling: return "coupling";
    case Field::aux: return "aux";
    }
    return "?";
}

std::optional<Field> field_from_name(std::string_view name)
{
    if (name == "probe") return Field::probe;
    if (name == "coupling") return Field::coupling;
    if (name == "aux") return Field::aux;
    return std::nullopt;
}

const Transition* LevelSystem::transition(Field f) const
{
    for (const auto& t : transitions)
        if (t.field == f) return &t;
    return nullptr;
}

LevelSystem default_three_level()
{
    LevelSystem s;
    s.n_levels = 3;
    s.transitions = {{Field::probe, 1, 3}, {Field::coupling, 2, 3}};
    s.set_Gamma(3, 1, 0.5);
    s.set_Gamma(3, 2, 0.5);
    s.set_dephasing(3, 1, 25.0);
    s.set_dephasing(3, 2, 25.0);
    s.set_dephasing(2, 1, 1.0);
    s.shift_target = 2;
    return s;
}

LevelSystem default_four_level()
{
    LevelSystem s = default_three_level();
    s.n_levels = 4;
    s.transitions.push_back({Field::aux, 3, 4});
    s.set_Gamma(3, 4, 0.5);
    s.set_dephasing(4, 3, 25.0);
    return s;
}

const FieldDrive* PulseSegment::field(Field f) const
{
    const auto& slot = fields[static_cast<int>(f)];
    return slot ? &*slot : nullptr;
}

PulseSegment& PulseSegment::with(Field f, double amp_khz, double det_khz, double phase_deg)
{
    fields[static_cast<int>(f)] = FieldDrive{amp_khz, det_khz, phase_deg};
    return *this;
}

bool PulseSegment::is_wait() const
{
    return std::none_of(fields.begin(), fields.end(), [](const auto& f) { return f.has_value(); });
}

PulseSequence& PulseSequence::add(PulseSegment s)
{
    items.emplace_back(std::move(s));
    return *this;
}

PulseSequence& PulseSequence::wait(double us)
{
    PulseSegment s;
    s.duration_us = us;
    items.emplace_back(std::move(s));
    return *this;
}

PulseSequence& PulseSequence::mark(std::string name)
{
    items.emplace_back(Mark{std::move(name)});
    return *this;
}

std::array<double, kMaxLevels> PulseSequence::initial_state() const
{
    std::array<double, kMaxLevels> p{};
    if (initial_populations.empty()) {
        p[0] = 1.0;
        return p;
    }
    for (std::size_t i = 0; i < initial_populations.size() && i < p.size(); ++i)
        p[i] = initial_populations[i];
    return p;
}

double generalized_rabi_khz(const PulseSegment& s)
{
    double sum = 0.0;
    for (const auto& f : s.fields)
        if (f) sum += f->amp_khz * f->amp_khz;
    return std::sqrt(sum);
}

double pulse_area(const PulseSegment& s)
{
    if (!s.duration_us)
        throw std::invalid_argument("pulse_area: segment has no resolved duration");
    return to_angular(generalized_rabi_khz(s)) * *s.duration_us;
}

namespace {

PulseSegment resolve_segment(const PulseSegment& s)
{
    PulseSegment r = s;
    if (r.duration_us) {
        r.area_pi.reset();
    } else if (r.area_pi) {
        const double omega = to_angular(generalized_rabi_khz(r));
        if (!(omega > 0.0))
            throw std::invalid_argument("area-specified segment has no active field");
        r.duration_us = *r.area_pi * std::numbers::pi / omega;
        r.area_pi.reset();
    } else {
        throw std::invalid_argument("segment has neither duration nor area");
    }
    if (!(*r.duration_us > 0.0) || !std::isfinite(*r.duration_us))
        throw std::invalid_argument("segment duration must be positive");
    return r;
}

}  // namespace

PulseSequence resolve_durations(const PulseSequence& seq)
{
    PulseSequence out = seq;
    for (auto& item : out.items)
        if (auto* seg = std::get_if<PulseSegment>(&item)) *seg = resolve_segment(*seg);
    return out;
}

std::optional<double> Timeline::marker(std::string_view name) const
{
    for (const auto& [n, t] : markers)
        if (n == name) return t;
    return std::nullopt;
}

double Timeline::require_marker(std::string_view name) const
{
    auto t = marker(name);
    if (!t) throw std::invalid_argument("missing marker '" + std::string(name) + "'");
    return *t;
}

namespace {

void apply_override(RateTable& g, const DecayOverride& ov)
{
    g[ov.i - 1][ov.j - 1] = ov.gamma_khz;
    g[ov.j - 1][ov.i - 1] = ov.gamma_khz;
}

bool override_in_range(const DecayOverride& ov, int n)
{
    return ov.i >= 1 && ov.i <= n && ov.j >= 1 && ov.j <= n && ov.i != ov.j;
}

}  // namespace

Timeline build_timeline(const LevelSystem& sys, const PulseSequence& seq)
{
    Timeline tl;
    tl.initial = seq.initial_state();
    RateTable baseline = sys.gamma;
    double t = 0.0;
    for (const auto& item : seq.items) {
        if (const auto* m = std::get_if<Mark>(&item)) {
            tl.markers.emplace_back(m->name, t);
        } else if (const auto* sd = std::get_if<SetDecay>(&item)) {
            if (!override_in_range(sd->value, sys.n_levels))
                throw std::invalid_argument("set: level index out of range");
            apply_override(baseline, sd->value);
        } else {
            const auto& seg = std::get<PulseSegment>(item);
            TimedSegment ts;
            ts.segment = resolve_segment(seg);
            ts.gamma = baseline;
            for (const auto& ov : seg.overrides) {
                if (!override_in_range(ov, sys.n_levels))
                    throw std::invalid_argument("decay override: level index out of range");
                apply_override(ts.gamma, ov);
            }
            ts.t_start = t;
            t += *ts.segment.duration_us;
            ts.t_end = t;
            tl.segments.push_back(std::move(ts));
        }
    }
    tl.duration = t;
    return tl;
}

std::size_t ValidationReport::error_count() const
{
    return std::count_if(issues.begin(), issues.end(),
                         [](const Issue& i) { return i.severity == Severity::error; });
}

std::size_t ValidationReport::warning_count() const
{
    return issues.size() - error_count();
}

bool ValidationReport::has(std::string_view code) const
{
    return std::any_of(issues.begin(), issues.end(), [&](const Issue& i) { return i.code == code; });
}

void ValidationReport::add(Severity s, std::string code, std::string message)
{
    issues.push_back({s, std::move(code), std::move(message)});
}

void ValidationReport::merge(const ValidationReport& other)
{
    issues.insert(issues.end(), other.issues.begin(), other.issues.end());
}

namespace {

std::string level_pair(int i, int j)
{
    std::ostringstream os;
    os << '(' << i << ',' << j << ')';
    return os.str();
}

}  // namespace

ValidationReport validate_system(const LevelSystem& sys)
{
    ValidationReport r;
    const int n = sys.n_levels;
    if (n != 3 && n != 4) {
        r.add(Severity::error, "levels", "n_levels must be 3 or 4");
        return r;
    }
    for (int i = 1; i <= kMaxLevels; ++i) {
        for (int j = 1; j <= kMaxLevels; ++j) {
            const double G = sys.Gamma(i, j), g = sys.dephasing(i, j);
            const bool inside = i <= n && j <= n;
            if (!std::isfinite(G) || G < 0.0)
                r.add(Severity::error, "rate", "Gamma" + level_pair(i, j) + " must be >= 0");
            if (!std::isfinite(g) || g < 0.0)
                r.add(Severity::error, "rate", "gamma" + level_pair(i, j) + " must be >= 0");
            if (i == j && G != 0.0)
                r.add(Severity::error, "rate", "Gamma" + level_pair(i, i) + " must be 0");
            if (!inside && (G != 0.0 || g != 0.0))
                r.add(Severity::error, "rate", "rate" + level_pair(i, j) + " refers to a missing level");
            if (g != sys.dephasing(j, i))
                r.add(Severity::error, "rate", "gamma" + level_pair(i, j) + " is not symmetric");
        }
    }

    std::set<Field> seen;
    for (const auto& t : sys.transitions) {
        if (!seen.insert(t.field).second)
            r.add(Severity::error, "transition", "duplicate field '" + std::string(field_name(t.field)) + "'");
        if (t.lower == t.upper || t.lower < 1 || t.upper < 1 || t.lower > n || t.upper > n)
            r.add(Severity::error, "transition",
                  "field '" + std::string(field_name(t.field)) + "' must connect two distinct levels");
    }
    if (sys.shift_target < 1 || sys.shift_target > n)
        r.add(Severity::error, "shift_target", "shift_target must name an existing level");

    // Phenomenological dephasing below half the summed out-rates can break positivity.
    std::array<double, kMaxLevels> out{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i] += to_angular(sys.big_gamma[i][j]);
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            const double lam = to_decay_constant(sys.dephasing(i, j));
            const double bound = 0.5 * (out[i - 1] + out[j - 1]);
            if (lam < bound - 1e-15)
                r.add(Severity::warning, "positivity",
                      "gamma" + level_pair(j, i) + " is below the lifetime limit; positivity not guaranteed");
        }
    }
    return r;
}

ValidationReport validate_sequence(const LevelSystem& sys, const PulseSequence& seq)
{
    ValidationReport r;
    const int n = sys.n_levels;

    const auto& p = seq.initial_populations;
    if (!p.empty()) {
        if (static_cast<int>(p.size()) > n)
            r.add(Severity::error, "population", "more initial populations than levels");
        double sum = 0.0;
        for (double v : p) {
            if (!(v >= 0.0 && v <= 1.0))
                r.add(Severity::error, "population", "initial population outside [0, 1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            r.add(Severity::error, "population", "population normalization: initial populations sum to " +
                                                     std::to_string(sum));
    }

    std::set<std::string> marks;
    std::size_t index = 0;
    for (const auto& item : seq.items) {
        ++index;
        const std::string where = "item " + std::to_string(index);
        if (const auto* m = std::get_if<Mark>(&item)) {
            if (m->name.empty()) r.add(Severity::error, "marker", where + ": empty marker name");
            if (!marks.insert(m->name).second)
                r.add(Severity::warning, "marker", where + ": duplicate marker '" + m->name + "'");
            continue;
        }
        if (const auto* sd = std::get_if<SetDecay>(&item)) {
            if (!override_in_range(sd->value, n))
                r.add(Severity::error, "override", where + ": level index out of range");
            if (!(sd->value.gamma_khz >= 0.0))
                r.add(Severity::error, "override", where + ": gamma must be >= 0");
            continue;
        }
        const auto& seg = std::get<PulseSegment>(item);
        for (int f = 0; f < kFieldCount; ++f) {
            if (!seg.fields[f]) continue;
            const auto field = static_cast<Field>(f);
            if (!sys.transition(field))
                r.add(Severity::error, "field", where + ": system has no '" + std::string(field_name(field)) +
                                                    "' transition");
            const auto& d = *seg.fields[f];
            if (!(d.amp_khz >= 0.0) || !std::isfinite(d.amp_khz))
                r.add(Severity::error, "field", where + ": amplitude must be >= 0");
            if (!std::isfinite(d.det_khz) || !std::isfinite(d.phase_deg))
                r.add(Severity::error, "field", where + ": non-finite detuning or phase");
        }
        for (const auto& ov : seg.overrides) {
            if (!override_in_range(ov, n))
                r.add(Severity::error, "override", where + ": level index out of range");
            if (!(ov.gamma_khz >= 0.0))
                r.add(Severity::error, "override", where + ": gamma must be >= 0");
        }
        if (seg.duration_us) {
            if (!(*seg.duration_us > 0.0) || !std::isfinite(*seg.duration_us))
                r.add(Severity::error, "duration", where + ": duration must be positive");
        } else if (seg.area_pi) {
            if (!(*seg.area_pi > 0.0))
                r.add(Severity::error, "duration", where + ": area must be positive");
            if (!(generalized_rabi_khz(seg) > 0.0))
                r.add(Severity::error, "duration", where + ": area given but no active field");
        } else {
            r.add(Severity::error, "duration", where + ": neither duration nor area");
        }
    }
    return r;
}

ValidationReport validate_ensemble(const EnsembleSpec& e)
{
    ValidationReport r;
    if (!(e.spacing_khz > 0.0)) r.add(Severity::error, "ensemble", "spacing must be > 0");
    if (!(e.fwhm_khz >= 0.0)) r.add(Severity::error, "ensemble", "FWHM must be >= 0");
    if (!(e.truncation_khz >= e.fwhm_khz)) r.add(Severity::error, "ensemble", "truncation must be >= FWHM");
    return r;
}

ValidationReport validate(const LevelSystem& sys, const PulseSequence& seq, const EnsembleSpec& ens)
{
    ValidationReport r = validate_system(sys);
    r.merge(validate_sequence(sys, seq));
    r.merge(validate_ensemble(ens));
    if (ens.shift_target != sys.shift_target)
        r.add(Severity::error, "shift_target", "ensemble and system disagree on the shifted level");
    if (r.ok() && ens.spacing_khz > 0.0) {
        // A uniform grid with spacing s is periodic in time with period 1/s.
        const double revival = 1e3 / ens.spacing_khz;
        const double total = build_timeline(sys, seq).duration;
        if (total > revival)
            r.add(Severity::warning, "grid_revival",
                  "sequence lasts " + std::to_string(total) + " us, longer than the grid revival period " +
                      std::to_string(revival) + " us; ghost echoes can appear");
    }
    return r;
}

}  // namespace qmem
