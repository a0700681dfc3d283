#pragma once

#include "qmem/propagate.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace qmem {

struct DetuningGrid {
    std::vector<double> deltas;   // kHz, ascending
    std::vector<double> weights;  // sum to 1
    std::vector<std::string> warnings;
};

// Gaussian weights exp(-4 ln2 d^2 / FWHM^2) on [-truncation, truncation],
// renormalized. A truncation that is not a multiple of the spacing is
// rounded outward with a warning.
DetuningGrid build_grid(const EnsembleSpec& spec);

DetuningGrid single_member_grid(double delta_khz = 0.0);

struct SweepOptions {
    RunOptions run;
    std::vector<double> retained_deltas;      // members whose full trace is kept
    std::vector<std::string> snapshot_markers;  // full per-member state at these markers
    std::size_t chunk_size = 32;
};

struct EnsembleTrace {
    std::vector<double> times;
    std::vector<cplx> S;  // sum w rho_12
    std::vector<cplx> P;  // sum w rho_13
    std::vector<std::array<double, kMaxLevels>> populations;

    std::vector<double> deltas;
    std::vector<double> weights;
    std::vector<TimeTrace> retained;
    std::map<std::string, std::vector<Matrix>, std::less<>> snapshots;  // grid order

    double max_trace_drift = 0.0;
    double max_hermiticity_error = 0.0;

    const TimeTrace* member(double delta_khz) const;
    std::size_t index_at(double t) const;
};

// OpenMP over members in fixed chunks; reduction in ascending delta, so the
// result is bit-identical to sweep_serial for any thread count.
EnsembleTrace sweep(const LevelSystem& sys, const PulseSequence& seq, const DetuningGrid& grid,
                    const SweepOptions& opt = {});

// Reference implementation: one member at a time, same summation order.
EnsembleTrace sweep_serial(const LevelSystem& sys, const PulseSequence& seq, const DetuningGrid& grid,
                           const SweepOptions& opt = {});

// Two-step phase cycle: half the difference of the coherences and snapshots
// of runs with the signal field at phase 0 and 180 degrees. Populations and
// retained traces come from the first run.
EnsembleTrace combine_phase_cycled(const EnsembleTrace& a, const EnsembleTrace& b);

}  // namespace qmem
