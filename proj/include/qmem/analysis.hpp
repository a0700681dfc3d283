#pragma once

#include "qmem/ensemble.hpp"
#include "qmem/scenarios.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qmem {

struct ExpectedEcho {
    std::string label;
    double time = 0.0;
};

struct Echo {
    double time = 0.0;
    double amplitude = 0.0;
    std::string label;  // empty when unmatched
    std::optional<double> efficiency;
};

struct EchoReport {
    std::vector<Echo> echoes;     // matched peaks, ascending time
    std::vector<Echo> unmatched;  // peaks above the floor with no bit
    bool time_reversed = false;   // matched bits appear in reverse write order
};

struct DetectOptions {
    double floor = 1e-4;
    double tolerance_us = 1.5;
};

// Local maxima of `amplitude` inside [t0, t1] above the floor, refined by a
// three-point parabola. `expected` lists bits in write order; each takes the
// largest peak within the tolerance of its expected time.
EchoReport detect_echoes(const std::vector<double>& times, const std::vector<double>& amplitude, double t0,
                         double t1, const std::vector<ExpectedEcho>& expected = {}, const DetectOptions& opt = {});

// Largest refined sample of `amplitude` within +-tol of t, ignoring any floor.
Echo peak_near(const std::vector<double>& times, const std::vector<double>& amplitude, double t, double tol);

// |S| for spin scenarios, |Im P| for optical ones.
std::vector<double> echo_channel(const EnsembleTrace& trace, Observable obs);

enum class EfficiencyReference {
    // Largest coherence a lossless conjugation of the stored grating could
    // return, evaluated at write completion (see README).
    write_rephased,
    // |S| at the end of the bit's data pulse.
    bit_end,
};

double rephased_reference(const EnsembleTrace& trace, const Timeline& tl, const BitInfo& bit, Observable obs,
                          double step_us = 0.01);

double retrieval_efficiency(const EnsembleTrace& trace, const Timeline& tl, const BitInfo& bit, const Echo& echo,
                            Observable obs, EfficiencyReference ref = EfficiencyReference::write_rephased);

struct BitEfficiency {
    std::string label;
    double expected_time = 0.0;
    double echo_time = 0.0;
    double amplitude = 0.0;
    double reference = 0.0;
    double efficiency = 0.0;
    double storage_time = 0.0;  // abscissa for the decay fit
};

// Per-bit echo near the expected time, efficiency and storage time.
std::vector<BitEfficiency> bit_efficiencies(const Scenario& sc, const EnsembleTrace& trace,
                                            EfficiencyReference ref = EfficiencyReference::write_rephased);

// detect_echoes over everything after the rephasing block, with efficiencies.
EchoReport analyze_echoes(const Scenario& sc, const EnsembleTrace& trace, const DetectOptions& opt = {},
                          EfficiencyReference ref = EfficiencyReference::write_rephased);

struct FitPoint {
    double t = 0.0;
    double value = 0.0;
};

struct FitResult {
    double amplitude = 0.0;
    double tau_us = 0.0;
    double r2 = 0.0;
    bool converged = false;  // decaying slope found
    std::size_t points = 0;
};

// Least squares on ln(value) = ln A - t/tau; R^2 in log space.
FitResult fit_exponential(const std::vector<FitPoint>& points);

struct PhaseReport {
    double re_recovery_error = 0.0;  // |Re after - Re before|
    double im_reversal_error = 0.0;  // |Im after + Im before|
    double im_recovery_error = 0.0;  // |Im after - Im before|
    double swap_error = 0.0;         // |Im after(d) - Im before(-d)|
};

// Max over the members at +d and -d of the rho_12 diagnostics.
PhaseReport phase_diagnostics(const TimeTrace& plus, const TimeTrace& minus, double t_before, double t_after);

// floor(T2 / tau). A zero result adds a warning.
long storage_capacity(double t2s_us, double tau_us, std::vector<std::string>* warnings = nullptr);

// Linear interpolation of `amplitude` on n points spanning center +- half_width.
std::vector<double> echo_window(const std::vector<double>& times, const std::vector<double>& amplitude,
                                double center, double half_width, int n = 121);

// Peak-normalizes each window and returns the largest pointwise difference.
double shape_similarity(const std::vector<std::vector<double>>& windows);

}  // namespace qmem
