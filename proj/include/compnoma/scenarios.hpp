#pragma once

#include <compnoma/comp_schemes.hpp>
#include <compnoma/noma_core.hpp>
#include <compnoma/power_allocation.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace compnoma {

enum class Scheme { JtNoma, CsNoma, DpsNoma, JtOma, CsOma };

std::string to_string(Scheme s);
/// Accepts the CSV labels (JT-NOMA, ...). "CB" and its variants go through
/// reject_cb; anything else is a ConfigError.
Scheme parse_scheme(const std::string& label);

enum class DecodeCase { Case1 = 1, Case2 = 2 };

enum class CompPlacement { Disc, Annulus };

std::string to_string(CompPlacement p);

/// Deployment geometry. Base stations sit on the x axis; non-CoMP users are
/// placed along the y axis through their own base station.
struct ScenarioGeometry {
    double inter_bs_distance_m = 1000.0;
    double noncomp_radius_m = 400.0;
    double second_user_distance_m = 300.0;   // scenario 1
    double noncomp_distance_m = 250.0;       // scenarios 2 and 3
    double scenario1_edge_radius_m = 200.0;  // scenario 1 CoMP coverage
    /// Disc: uniform in a disc of the coverage radius centred between the two
    /// base stations. Annulus: uniform over points whose distance to the
    /// nearest base station lies in (noncomp_radius, noncomp_radius + coverage].
    /// Either way CoMP users stay strictly outside both non-CoMP discs.
    CompPlacement placement = CompPlacement::Disc;

    bool operator==(const ScenarioGeometry&) const = default;
    void validate() const;  // ValidationError
};

struct ScenarioTopology {
    int scenario_id = 0;
    std::vector<Cell> cells;
    std::vector<UserEquipment> users;
    CompSet comp_set;
    /// Cluster-head distance (scenario 1) or cell-edge coverage distance.
    double sweep_value = 0.0;
    DecodeCase decode_case = DecodeCase::Case1;

    const UserEquipment& user(UserId id) const;
    std::vector<UserId> noncomp_users(CellId cell) const;
    bool is_comp(UserId id) const;
};

/// Valid sweep interval for a scenario: (0, noncomp_radius] for the
/// cluster-head distance, (0, inter_bs_distance/2] for the coverage distance.
std::pair<double, double> sweep_bounds(int scenario_id, const ScenarioGeometry& geometry);

/// User ids: CoMP users first (0, 1 ...), then non-CoMP users cell by cell.
/// Scenario 1: u0 CoMP; u1/u2 in cell 0 at the sweep distance and the second
/// distance; u3/u4 the same in cell 1. Scenario 2: u0, u1 CoMP; u2 in cell 0;
/// u3 in cell 1. Scenario 3: u0, u1 CoMP; u2 in cell 0.
ScenarioTopology build_scenario(int scenario_id, double sweep_value, DecodeCase decode_case,
                                const ScenarioGeometry& geometry, double cell_budget_mw, TrialStream& stream);

/// Joint-transmission clusters, one per cell over the full band. CoMP users
/// come first in a shared order, then the cell's non-CoMP users in ascending
/// gain. No guarantees are attached.
std::vector<NomaCluster> form_jt_clusters(const ScenarioTopology& topo, const ChannelRealization& gains,
                                          double bandwidth_hz);

/// One cluster per cell that serves anybody: each CoMP user joins the cell
/// picked by dps_select_cell, members ordered by ascending gain.
std::vector<NomaCluster> form_dps_clusters(const ScenarioTopology& topo, const ChannelRealization& gains,
                                           double bandwidth_hz);

/// JT-OMA baseline rates with power proportional to spectrum.
std::map<UserId, double> oma_rates(const ScenarioTopology& topo, const ChannelRealization& gains,
                                   const RadioParams& radio);

/// CS-OMA baseline: every band of the CS plan is shared equally by its members.
std::map<UserId, double> cs_oma_rates(const ScenarioTopology& topo, const ChannelRealization& gains,
                                      const RadioParams& radio);

struct TrialResult {
    Scheme scheme = Scheme::JtOma;
    std::map<UserId, double> scheme_rates;  // bits/s after any fallback
    std::map<UserId, double> oma_rates;     // JT-OMA baseline, bits/s
    /// Users holding a rate guarantee and the guarantee itself. For CS the
    /// guarantee of a user is its OMA rate less what it earns on other bands.
    std::map<UserId, double> guarantees;
    double scheme_se = 0.0;
    double oma_se = 0.0;
    bool feasible = true;
    AllocationStatus status = AllocationStatus::Ok;
};

struct TrialOptions {
    RadioParams radio;
    InterferenceMode interference = InterferenceMode::Negligible;
    JtSplit jt_split = JtSplit::ProportionalPower;
};

/// Evaluates one scheme on one topology and channel draw. A NOMA scheme whose
/// allocation is infeasible anywhere falls back to the JT-OMA rates for the
/// whole trial and reports feasible = false. A ConditionViolation is a bug in
/// cluster formation and propagates.
TrialResult run_trial(const ScenarioTopology& topo, const ChannelRealization& gains, Scheme scheme,
                      const TrialOptions& options);

}  // namespace compnoma
