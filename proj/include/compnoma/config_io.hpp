#pragma once

#include <compnoma/harness.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace compnoma {

/// Radio parameters as written in a config file (logarithmic units).
struct RadioConfig {
    double tx_power_dbm = 43.0;
    double noise_density_dbm_per_hz = -139.0;
    double bandwidth_hz = 8.64e6;
    double pathloss_exponent = 4.0;
    /// The published "20 dBm" read as 0.1 W, i.e. a linear gap of 0.1.
    double sic_tolerance_db = -10.0;

    bool operator==(const RadioConfig&) const = default;
    RadioParams to_params() const;
};

struct SweepRange {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    bool operator==(const SweepRange&) const = default;
    std::vector<double> values() const;
};

struct ExperimentConfig {
    int scenario_id = 0;  // required
    std::vector<Scheme> schemes{Scheme::JtNoma, Scheme::JtOma};
    std::optional<SweepRange> sweep;  // scenario default when absent
    std::uint64_t trials = 50'000;
    std::uint64_t seed = 1;
    RadioConfig radio;
    ScenarioGeometry placement;
    InterferenceMode interference_mode = InterferenceMode::Negligible;
    JtSplit jt_split = JtSplit::ProportionalPower;
    std::vector<DecodeCase> decode_cases{DecodeCase::Case1};
    unsigned workers = 0;  // 0: one per hardware thread
    std::string output_path;

    bool operator==(const ExperimentConfig&) const = default;

    SweepRange resolved_sweep() const;
    /// Throws ValidationError naming the first bad field.
    void validate() const;
    SweepSpec to_spec() const;
};

/// Default sweep: cluster-head distance 50..400 m for scenario 1, cell-edge
/// coverage distance 100..300 m otherwise, both in 50 m steps.
SweepRange default_sweep(int scenario_id);

/// Parses a JSON config. Missing keys take defaults, unknown keys raise
/// ParseError naming the key, and the result is validated. An empty document
/// counts as {}.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);  // IoError if unreadable

/// Serializes every field, defaults included.
std::string emit_config(const ExperimentConfig& config);

/// Defaults for a scenario, emitted as JSON.
std::string emit_defaults(int scenario_id = 1);

/// Named setups: fig4 (scenario 1), fig5 (scenario 2), fig6 (scenario 3, both
/// decode cases).
ExperimentConfig preset(const std::string& name);

/// CSV text for a sweep. Throws IoError naming the first non-finite cell.
std::string format_csv(const SweepResult& result);
void emit_csv(const SweepResult& result, const std::string& path);

/// Human-readable table of the rows, with CI and guarantee bookkeeping.
std::string summary_report(const SweepResult& result);

}  // namespace compnoma
