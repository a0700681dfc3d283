#pragma once

#include "qmem/liouvillian.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmem {

enum class Integrator { exact, rk4 };

class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double delta_khz, double t_us)
        : std::runtime_error(what), delta_khz(delta_khz), t_us(t_us)
    {
    }
    double delta_khz;
    double t_us;
};

struct RunOptions {
    double sample_interval_us = 0.1;
    Integrator integrator = Integrator::exact;
    double dt_us = 0.005;
    // RK4 substeps are shortened so that h * (|H|_inf + max rate) stays below
    // this cap. Strong rephasing pulses would otherwise dominate the error.
    double rk4_phase_cap = 0.01;
    double trace_tolerance = 1e-6;
};

// Classic RK4 step followed by re-Hermitization. Throws std::invalid_argument
// when dt * (|H|_inf + max rate) > 0.1.
Matrix step_rk4(const Matrix& rho, const Matrix& H, const RelaxationRates& rates, double dt);
Matrix step_rk4(const Matrix& rho, const LevelSystem& sys, const PulseSegment& seg, double delta_khz, double dt);

// exp(L*duration) applied to rho. With samples != nullptr the segment is cut
// into `substeps` equal pieces and the state after each is appended.
Matrix propagate_segment_exact(const Matrix& rho, const LevelSystem& sys, const PulseSegment& seg,
                               double delta_khz, int substeps = 1, std::vector<Matrix>* samples = nullptr);

// One sampling step inside a timeline segment.
struct SampleBlock {
    std::size_t segment = 0;
    int steps = 0;
    double h = 0.0;
};

struct SampleSchedule {
    std::vector<double> times;  // includes t = 0
    std::vector<SampleBlock> blocks;
    // index into `times` of the sample at the end of each segment
    std::vector<std::size_t> segment_end_index;
};

SampleSchedule make_schedule(const Timeline& tl, double sample_interval_us);

// Receives row-major vec(rho) for sample `index`.
using SampleSink = std::function<void(std::size_t index, const Vector& state)>;

void run_member(const LevelSystem& sys, const Timeline& tl, const SampleSchedule& sched, double delta_khz,
                const RunOptions& opt, const SampleSink& sink);

struct TimeTrace {
    double delta_khz = 0.0;
    std::vector<double> times;
    std::vector<Matrix> states;

    std::size_t index_at(double t) const;  // nearest sample
    const Matrix& at(double t) const { return states[index_at(t)]; }
};

TimeTrace run_member(const LevelSystem& sys, const PulseSequence& seq, double delta_khz,
                     const RunOptions& opt = {});

// Max entrywise |rho_exact - rho_rk4| over all samples.
double cross_validate(const LevelSystem& sys, const PulseSequence& seq, double delta_khz, double dt_us,
                      const RunOptions& base = {});

Matrix initial_density(const Timeline& tl, int n);

}  // namespace qmem
