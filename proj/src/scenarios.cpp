#include "qmem/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmem {

namespace {

constexpr std::string_view kTags[] = {"fig1a", "fig1b", "fig1c", "fig1d", "fig2", "weak_probe", "custom"};

std::string bit_label(std::size_t i)
{
    return std::string(1, static_cast<char>('A' + i));
}

PulseSegment raman(double rabi_khz, double area_pi)
{
    PulseSegment s;
    const double each = rabi_khz / std::sqrt(2.0);
    s.with(Field::probe, each).with(Field::coupling, each);
    s.area_pi = area_pi;
    return s;
}

PulseSegment single(Field f, double rabi_khz, double area_pi)
{
    PulseSegment s;
    s.with(f, rabi_khz);
    s.area_pi = area_pi;
    return s;
}

void wait_until(PulseSequence& seq, double& t, double target)
{
    if (target > t + 1e-12) seq.wait(target - t);
    t = std::max(t, target);
}

// Data pulses A, B, C... as Raman pairs; returns the time after the last one.
double write_data(PulseSequence& seq, const ScenarioParams& p, double probe_khz, double coupling_khz)
{
    double t = 0.0;
    for (std::size_t i = 0; i < p.bit_starts.size(); ++i) {
        if (p.bit_starts[i] < t - 1e-12) throw std::invalid_argument("data pulses overlap");
        wait_until(seq, t, p.bit_starts[i]);
        const std::string label = bit_label(i);
        seq.mark(label + "_start");
        PulseSegment s;
        s.with(Field::probe, probe_khz).with(Field::coupling, coupling_khz);
        s.duration_us = p.data_duration_us;
        seq.add(s);
        seq.mark(label + "_end");
        t += p.data_duration_us;
    }
    seq.mark("write_end");
    return t;
}

double first_bit_start(const ScenarioParams& p)
{
    return p.bit_starts.empty() ? 0.0 : p.bit_starts.front();
}

LevelSystem spin_system(const ScenarioParams& p, bool four_level)
{
    LevelSystem sys = four_level ? default_four_level() : default_three_level();
    if (p.gamma21_khz) sys.set_dephasing(2, 1, *p.gamma21_khz);
    return sys;
}

Scenario storage(const ScenarioParams& p, double probe_khz, double coupling_khz, std::string tag)
{
    const double area = p.area_pi.value_or(2.0);
    if (!(area > 0.0)) throw std::invalid_argument("rephasing area must be positive");

    Scenario sc;
    sc.tag = std::move(tag);
    sc.system = spin_system(p, false);
    sc.sequence.initial_populations = p.initial_populations;
    double t = write_data(sc.sequence, p, probe_khz, coupling_khz);
    if (p.delay_us < t - 1e-12) throw std::invalid_argument("rephasing delay collides with data pulses");
    wait_until(sc.sequence, t, p.delay_us);
    sc.sequence.mark("rephase_start");
    sc.sequence.add(raman(p.rephase_rabi_khz, area));
    sc.sequence.mark("rephase_end");
    t += area / (2.0 * p.rephase_rabi_khz * 1e-3);
    const double total = p.delay_us + 2.0 * (p.delay_us - first_bit_start(p)) + 20.0;
    if (total > t) sc.sequence.wait(total - t);
    return sc;
}

}  // namespace

std::string_view variant_tag(Variant v)
{
    return kTags[static_cast<int>(v)];
}

std::optional<Variant> variant_from_tag(std::string_view tag)
{
    for (int i = 0; i < static_cast<int>(std::size(kTags)); ++i)
        if (kTags[i] == tag) return static_cast<Variant>(i);
    return std::nullopt;
}

std::vector<std::string_view> variant_tags()
{
    return {std::begin(kTags), std::end(kTags)};
}

std::vector<BitInfo> bits_of(const Timeline& tl)
{
    double limit = tl.duration;
    if (auto w = tl.marker("write_end"))
        limit = *w;
    else if (auto r = tl.marker("rephase_start"))
        limit = *r;

    std::vector<BitInfo> bits;
    for (const auto& [name, t] : tl.markers) {
        constexpr std::string_view suffix = "_start";
        if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
            continue;
        const std::string label = name.substr(0, name.size() - suffix.size());
        if (label == "rephase" || label == "lock") continue;
        auto end = tl.marker(label + "_end");
        if (!end || *end > limit + 1e-9 || *end <= t) continue;
        bits.push_back({label, t, *end});
    }
    std::sort(bits.begin(), bits.end(), [](const BitInfo& a, const BitInfo& b) { return a.start < b.start; });
    return bits;
}

double expected_echo_time(const Timeline& tl, const BitInfo& bit)
{
    const double ts = tl.require_marker("rephase_start");
    const double te = tl.require_marker("rephase_end");
    return te + (ts - bit.center());
}

double data_pulse_length(const Timeline& tl)
{
    const auto bits = bits_of(tl);
    double tau = 0.0;
    for (const auto& b : bits) tau = std::max(tau, b.end - b.start);
    return tau;
}

Scenario triple_bit_storage(const ScenarioParams& p)
{
    return storage(p, p.data_rabi_khz, p.data_rabi_khz, "fig1a");
}

Scenario photon_echo(const ScenarioParams& p)
{
    const double area = p.area_pi.value_or(1.0);
    if (!(area > 0.0)) throw std::invalid_argument("rephasing area must be positive");

    Scenario sc;
    sc.tag = "fig1b";
    LevelSystem& sys = sc.system;
    sys.n_levels = 3;
    sys.transitions = {{Field::probe, 1, 3}, {Field::coupling, 2, 3}};
    sys.set_Gamma(3, 1, 0.5);
    sys.set_dephasing(3, 1, 2.5);
    sys.shift_target = 3;
    sc.ensemble.shift_target = 3;
    sc.observable = Observable::optical;

    const double start = first_bit_start(p);
    double t = 0.0;
    auto& seq = sc.sequence;
    seq.initial_populations = {1.0, 0.0};
    wait_until(seq, t, start);
    seq.mark("A_start");
    seq.add(single(Field::probe, p.photon_rabi_khz, p.photon_data_area_pi));
    seq.mark("A_end");
    seq.mark("write_end");
    t += p.photon_data_area_pi / (2.0 * p.photon_rabi_khz * 1e-3);
    if (p.photon_delay_us < t - 1e-12) throw std::invalid_argument("rephasing delay collides with data pulse");
    wait_until(seq, t, p.photon_delay_us);
    seq.mark("rephase_start");
    seq.add(single(Field::probe, p.rephase_rabi_khz, area));
    seq.mark("rephase_end");
    seq.wait((p.photon_delay_us - start) + 20.0);
    return sc;
}

std::vector<Scenario> delay_scan(const ScenarioParams& p)
{
    if (!std::is_sorted(p.delays.begin(), p.delays.end()))
        throw std::invalid_argument("delays must be sorted ascending");
    std::vector<Scenario> out;
    for (double d : p.delays) {
        ScenarioParams q = p;
        q.delay_us = d;
        Scenario sc = triple_bit_storage(q);
        sc.tag = "fig1d";
        out.push_back(std::move(sc));
    }
    return out;
}

Scenario locking_protocol(const ScenarioParams& p)
{
    const double final_area = p.final_area_pi;
    if (!(final_area > 0.0)) throw std::invalid_argument("final area must be positive");
    const double pi_len = 1.0 / (2.0 * p.rephase_rabi_khz * 1e-3);
    if (!(p.lock_time_us > pi_len)) throw std::invalid_argument("lock time shorter than the pi_A pulses");
    if (p.lock_gap_us < 0.0) throw std::invalid_argument("gap must be >= 0");

    Scenario sc;
    sc.tag = "fig2";
    sc.system = spin_system(p, true);
    sc.retained_deltas = {-10.0, 10.0};
    auto& seq = sc.sequence;
    seq.initial_populations = p.initial_populations;
    double t = write_data(seq, p, p.data_rabi_khz, p.data_rabi_khz);
    if (p.delay_us < t - 1e-12) throw std::invalid_argument("rephasing delay collides with data pulses");
    wait_until(seq, t, p.delay_us);

    auto gap = [&] {
        if (p.lock_gap_us > 0.0) seq.wait(p.lock_gap_us);
    };
    seq.mark("rephase_start");
    seq.add(raman(p.rephase_rabi_khz, 1.0));
    seq.mark("piR_end");
    gap();
    seq.add(single(Field::aux, p.rephase_rabi_khz, 1.0));
    seq.mark("lock_start");
    PulseSegment lock;
    lock.duration_us = p.lock_time_us;
    lock.overrides.push_back({2, 1, 0.0});
    lock.frozen_shift = p.freeze_lock_precession;
    seq.add(lock);
    seq.mark("lock_end");
    seq.add(single(Field::aux, p.rephase_rabi_khz, 1.0));
    seq.mark("piA2_end");
    gap();
    seq.add(raman(p.rephase_rabi_khz, final_area));
    seq.mark("rephase_end");
    seq.wait((p.delay_us - first_bit_start(p)) + 20.0);
    return sc;
}

Scenario weak_probe(const ScenarioParams& p)
{
    if (!(p.attenuation > 0.0)) throw std::invalid_argument("attenuation must be positive");
    Scenario sc = storage(p, p.data_rabi_khz * p.attenuation, 25.0, "weak_probe");
    sc.phase_cycle = p.phase_cycle.value_or(true);
    return sc;
}

Scenario custom_scenario(LevelSystem sys, PulseSequence seq, EnsembleSpec ens)
{
    Scenario sc;
    sc.tag = "custom";
    sc.observable = sys.shift_target == 3 ? Observable::optical : Observable::spin;
    sc.system = std::move(sys);
    sc.sequence = std::move(seq);
    sc.ensemble = ens;
    return sc;
}

Scenario build_scenario(const ScenarioParams& p)
{
    Scenario sc;
    switch (p.variant) {
    case Variant::fig1a: sc = triple_bit_storage(p); break;
    case Variant::fig1b: sc = photon_echo(p); break;
    case Variant::fig1c:
        sc = triple_bit_storage(p);
        sc.tag = "fig1c";
        sc.retained_deltas = {-10.0, 10.0};
        break;
    case Variant::fig1d: {
        ScenarioParams q = p;
        if (q.delays.empty()) throw std::invalid_argument("fig1d needs at least one delay");
        q.delays.resize(1);
        sc = delay_scan(q).front();
        break;
    }
    case Variant::fig2: sc = locking_protocol(p); break;
    case Variant::weak_probe: sc = weak_probe(p); break;
    case Variant::custom: throw std::invalid_argument("custom scenarios come from a sequence file");
    }
    if (p.phase_cycle) sc.phase_cycle = *p.phase_cycle;
    return sc;
}

PulseSequence shift_probe_phase(const PulseSequence& seq, double degrees, std::string_view until_marker)
{
    PulseSequence out = seq;
    for (auto& item : out.items) {
        if (auto* m = std::get_if<Mark>(&item); m && m->name == until_marker) break;
        if (auto* s = std::get_if<PulseSegment>(&item)) {
            auto& f = s->fields[static_cast<int>(Field::probe)];
            if (f) f->phase_deg += degrees;
        }
    }
    return out;
}

EnsembleTrace simulate(const Scenario& sc, SweepOptions opt)
{
    const Timeline tl = sc.timeline();
    for (const char* name : {"write_end", "rephase_start", "rephase_end"})
        if (tl.marker(name) && std::find(opt.snapshot_markers.begin(), opt.snapshot_markers.end(), name) ==
                                   opt.snapshot_markers.end())
            opt.snapshot_markers.emplace_back(name);
    for (double d : sc.retained_deltas)
        if (std::find(opt.retained_deltas.begin(), opt.retained_deltas.end(), d) == opt.retained_deltas.end())
            opt.retained_deltas.push_back(d);

    const DetuningGrid grid = build_grid(sc.ensemble);
    EnsembleTrace a = sweep(sc.system, sc.sequence, grid, opt);
    if (!sc.phase_cycle) return a;
    const std::string until = tl.marker("write_end") ? "write_end" : "rephase_start";
    EnsembleTrace b = sweep(sc.system, shift_probe_phase(sc.sequence, 180.0, until), grid, opt);
    return combine_phase_cycled(a, b);
}

}  // namespace qmem
