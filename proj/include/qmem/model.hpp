#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qmem {

inline constexpr int kMaxLevels = 4;
inline constexpr int kFieldCount = 3;

enum class Field { probe = 0, coupling = 1, aux = 2 };

std::string_view field_name(Field f);
std::optional<Field> field_from_name(std::string_view name);

// Levels are 1-based in every public interface.
struct Transition {
    Field field;
    int lower;
    int upper;
    bool operator==(const Transition&) const = default;
};

// [i][j] indexed from 0; public accessors take 1-based levels.
using RateTable = std::array<std::array<double, kMaxLevels>, kMaxLevels>;

struct LevelSystem {
    int n_levels = 3;
    std::vector<Transition> transitions;
    RateTable big_gamma{};  // kHz, population transfer |i> -> |j>
    RateTable gamma{};      // kHz, coherence dephasing width, symmetric
    int shift_target = 2;   // level carrying the inhomogeneous shift

    double Gamma(int i, int j) const { return big_gamma[i - 1][j - 1]; }
    double dephasing(int i, int j) const { return gamma[i - 1][j - 1]; }
    void set_Gamma(int i, int j, double khz) { big_gamma[i - 1][j - 1] = khz; }
    void set_dephasing(int i, int j, double khz)
    {
        gamma[i - 1][j - 1] = khz;
        gamma[j - 1][i - 1] = khz;
    }
    const Transition* transition(Field f) const;

    bool operator==(const LevelSystem&) const = default;
};

// Default rates (kHz): Gamma31 = Gamma32 = 0.5, gamma31 = gamma32 = 25, gamma21 = 1.
LevelSystem default_three_level();
// Adds |4>: Gamma34 = 0.5, gamma43 = 25, gamma41 = gamma42 = 0.
LevelSystem default_four_level();

struct FieldDrive {
    double amp_khz = 0.0;
    double det_khz = 0.0;
    double phase_deg = 0.0;
    bool operator==(const FieldDrive&) const = default;
};

struct DecayOverride {
    int i = 2;
    int j = 1;
    double gamma_khz = 0.0;
    bool operator==(const DecayOverride&) const = default;
};

// A rectangular segment. Fields left empty are off; a segment with no field
// at all is a wait.
struct PulseSegment {
    std::array<std::optional<FieldDrive>, kFieldCount> fields{};
    std::optional<double> duration_us;
    std::optional<double> area_pi;  // area in units of pi
    std::vector<DecayOverride> overrides;
    // Drop the inhomogeneous shift for this segment (spin precession frozen).
    bool frozen_shift = false;

    const FieldDrive* field(Field f) const;
    PulseSegment& with(Field f, double amp_khz, double det_khz = 0.0, double phase_deg = 0.0);
    bool is_wait() const;

    bool operator==(const PulseSegment&) const = default;
};

struct Mark {
    std::string name;
    bool operator==(const Mark&) const = default;
};

// Persistent change of a dephasing width from this point on.
struct SetDecay {
    DecayOverride value;
    bool operator==(const SetDecay&) const = default;
};

using SequenceItem = std::variant<PulseSegment, Mark, SetDecay>;

struct PulseSequence {
    std::vector<double> initial_populations;  // empty means all in |1>
    std::vector<SequenceItem> items;

    PulseSequence& add(PulseSegment s);
    PulseSequence& wait(double us);
    PulseSequence& mark(std::string name);

    std::array<double, kMaxLevels> initial_state() const;
    bool operator==(const PulseSequence&) const = default;
};

struct EnsembleSpec {
    double fwhm_khz = 200.0;
    double spacing_khz = 2.0;
    double truncation_khz = 250.0;
    int shift_target = 2;
    bool operator==(const EnsembleSpec&) const = default;
};

// sqrt of the sum of squared active amplitudes, in kHz.
double generalized_rabi_khz(const PulseSegment& s);

// Omega_gen (rad/us) times duration. Throws if the segment has no duration.
double pulse_area(const PulseSegment& s);

// Converts area-specified segments to durations. Idempotent.
PulseSequence resolve_durations(const PulseSequence& seq);

struct TimedSegment {
    PulseSegment segment;  // duration resolved
    double t_start = 0.0;
    double t_end = 0.0;
    RateTable gamma{};  // dephasing widths in force during the segment
};

struct Timeline {
    std::array<double, kMaxLevels> initial{};
    std::vector<TimedSegment> segments;
    std::vector<std::pair<std::string, double>> markers;
    double duration = 0.0;

    std::optional<double> marker(std::string_view name) const;
    double require_marker(std::string_view name) const;
};

// Resolves durations, applies set/with overrides and places markers.
Timeline build_timeline(const LevelSystem& sys, const PulseSequence& seq);

enum class Severity { warning, error };

struct Issue {
    Severity severity;
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Issue> issues;

    bool ok() const { return error_count() == 0; }
    std::size_t error_count() const;
    std::size_t warning_count() const;
    bool has(std::string_view code) const;
    void add(Severity s, std::string code, std::string message);
    void merge(const ValidationReport& other);
};

ValidationReport validate_system(const LevelSystem& sys);
ValidationReport validate_sequence(const LevelSystem& sys, const PulseSequence& seq);
ValidationReport validate_ensemble(const EnsembleSpec& ens);
ValidationReport validate(const LevelSystem& sys, const PulseSequence& seq, const EnsembleSpec& ens);

}  // namespace qmem
