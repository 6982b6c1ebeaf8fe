#pragma once

#include <compnoma/scenarios.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace compnoma {

/// Everything the harness needs for one sweep, already validated and in
/// linear units.
struct SweepSpec {
    int scenario_id = 1;
    std::vector<Scheme> schemes;
    std::vector<double> sweep_values;
    std::vector<DecodeCase> decode_cases{DecodeCase::Case1};
    std::uint64_t trials = 1;
    std::uint64_t seed = 1;
    RadioParams radio;
    ScenarioGeometry geometry;
    InterferenceMode interference = InterferenceMode::Negligible;
    JtSplit jt_split = JtSplit::ProportionalPower;
    unsigned workers = 1;
    bool keep_trial_se = false;
};

struct SweepRow {
    double sweep_m = 0.0;
    std::string scheme;  // label; JT-NOMA carries a -caseN suffix in scenario 3
    double mean_se = 0.0;
    double ci95 = 0.0;
    double infeasible_frac = 0.0;
    std::uint64_t trials = 0;
    double mean_oma_se = 0.0;
    /// Feasible trials in which a guaranteed user fell short of its OMA rate
    /// by more than 1e-9 relative.
    std::uint64_t guarantee_violations = 0;
    /// Smallest rate / guarantee ratio seen over feasible trials (1 if none).
    double min_guarantee_ratio = 1.0;
    std::uint64_t non_finite = 0;
    std::vector<double> trial_se;  // only with keep_trial_se
};

struct SweepResult {
    std::vector<double> sweep_values;
    std::vector<SweepRow> rows;  // sorted by (sweep_m, scheme)

    const SweepRow& row(double sweep_m, const std::string& scheme) const;  // LookupError
};

/// Compensated (Neumaier) sum in index order.
double compensated_sum(const std::vector<double>& values);

/// Runs every (sweep point, scheme variant, trial). Trial t of sweep point s
/// draws from TrialStream(seed, s, t); all variants of one trial share its
/// topology and channel draw. Work is spread over `workers` threads and
/// reduced in index order, so the result does not depend on the thread count.
SweepResult run_sweep(const SweepSpec& spec);

}  // namespace compnoma
