#pragma once

// Frequencies are given in kHz, times in microseconds.
//
// Rabi frequencies, detunings and population rates are ordinary frequencies:
// 1 kHz = 2*pi*1e-3 rad/us. Coherence dephasing widths gamma_ij are
// linewidth-like, so the amplitude decay constant is pi*1e-3*gamma per us and
// T2 = 1/(pi*gamma).

#include <numbers>

namespace qmem {

inline constexpr double kTwoPiMilli = 2.0 * std::numbers::pi * 1e-3;
inline constexpr double kPiMilli = std::numbers::pi * 1e-3;

constexpr double to_angular(double khz) { return kTwoPiMilli * khz; }
constexpr double from_angular(double rad_per_us) { return rad_per_us / kTwoPiMilli; }

constexpr double to_decay_constant(double gamma_khz) { return kPiMilli * gamma_khz; }
constexpr double from_decay_constant(double per_us) { return per_us / kPiMilli; }

// 1/(pi*gamma) in us; infinite for gamma == 0.
double coherence_time_us(double gamma_khz);

}  // namespace qmem
