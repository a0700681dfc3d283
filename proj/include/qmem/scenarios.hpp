#pragma once

#include "qmem/ensemble.hpp"
#include "qmem/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qmem {

enum class Variant { fig1a, fig1b, fig1c, fig1d, fig2, weak_probe, custom };

std::string_view variant_tag(Variant v);
std::optional<Variant> variant_from_tag(std::string_view tag);
std::vector<std::string_view> variant_tags();

// Which macroscopic coherence carries the echo.
enum class Observable { spin, optical };

struct ScenarioParams {
    Variant variant = Variant::fig1a;
    std::optional<double> area_pi;     // rephasing area; 2 for fig1a, 1 for fig1b
    double final_area_pi = 3.0;        // last Raman pulse of the locking sequence
    double delay_us = 60.0;            // start of the rephasing pulse
    std::vector<double> delays{60.0, 100.0, 150.0, 200.0, 300.0, 500.0};
    double lock_time_us = 1010.0;
    double attenuation = 0.01;
    std::vector<double> initial_populations{0.5, 0.5};
    std::optional<double> gamma21_khz;

    double data_rabi_khz = 17.0;
    double data_duration_us = 3.0;
    std::vector<double> bit_starts{10.0, 20.0, 30.0};
    // Generalized Rabi frequency of rephasing and auxiliary pulses. 2500 kHz
    // puts a pi area in 0.2 us; at 50 kHz a 2 pi pulse lasts 20 us and no
    // longer refocuses the whole 200 kHz ensemble.
    double rephase_rabi_khz = 2500.0;
    double lock_gap_us = 0.0;
    // Also freeze the inhomogeneous spin precession in the lock window, not
    // only gamma21.
    bool freeze_lock_precession = false;
    std::optional<bool> phase_cycle;   // default: on for weak_probe only

    double photon_rabi_khz = 25.0;
    double photon_data_area_pi = 0.5;
    double photon_delay_us = 30.0;
};

struct BitInfo {
    std::string label;
    double start = 0.0;
    double end = 0.0;
    double center() const { return 0.5 * (start + end); }
};

struct Scenario {
    std::string tag;
    LevelSystem system;
    PulseSequence sequence;
    EnsembleSpec ensemble;
    Observable observable = Observable::spin;
    bool phase_cycle = false;
    std::vector<double> retained_deltas;

    Timeline timeline() const { return build_timeline(system, sequence); }
};

// Bits are marker pairs X_start / X_end that close before the write_end (or
// rephase_start) marker.
std::vector<BitInfo> bits_of(const Timeline& tl);

// Echo of a bit centred at t_b after a rephasing block [t_s, t_e]:
// t_e + (t_s - t_b). Reduces to the mirror time 2 t_R - t_b for a short pulse.
double expected_echo_time(const Timeline& tl, const BitInfo& bit);

double data_pulse_length(const Timeline& tl);

Scenario triple_bit_storage(const ScenarioParams& p);
Scenario photon_echo(const ScenarioParams& p);
std::vector<Scenario> delay_scan(const ScenarioParams& p);
Scenario locking_protocol(const ScenarioParams& p);
Scenario weak_probe(const ScenarioParams& p);
Scenario custom_scenario(LevelSystem sys, PulseSequence seq, EnsembleSpec ens);

// Dispatch on p.variant (fig1d yields its first delay).
Scenario build_scenario(const ScenarioParams& p);

// Adds `degrees` to the probe phase of every segment before `until_marker`.
PulseSequence shift_probe_phase(const PulseSequence& seq, double degrees, std::string_view until_marker);

// Runs the sweep, applying the phase cycle when the scenario asks for it.
// write_end and rephase markers are snapshotted when present.
EnsembleTrace simulate(const Scenario& sc, SweepOptions opt = {});

}  // namespace qmem
