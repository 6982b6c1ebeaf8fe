#pragma once

#include <compnoma/noma_core.hpp>

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace compnoma {

enum class CompScheme { CS, JT, DPS };

struct CompSet {
    std::vector<CellId> cells;
    CompScheme scheme = CompScheme::JT;
    std::vector<UserId> comp_users;

    void validate() const;  // ConfigError
};

/// Checks the two joint-transmission decoding conditions over the clusters of
/// one CoMP set. Condition 1 is checked on every cluster before condition 2.
/// Returns the first violation found, or nothing.
std::optional<ConditionViolation> check_jt_conditions(std::span<const NomaCluster> clusters,
                                                      std::span<const UserId> comp_users);

/// Throwing form of check_jt_conditions.
void validate_jt_conditions(std::span<const NomaCluster> clusters, std::span<const UserId> comp_users);

/// Cell with the largest gain toward the user; ties go to the lowest cell id.
CellId dps_select_cell(UserId comp_user, const ChannelRealization& gains, std::span<const CellId> cells);

struct CsBandAssignment {
    Band band;
    std::vector<UserId> members;  // unordered; decode order is set per trial
    double power_mw = 0.0;
    bool carries_comp_user = false;
};

struct CsBandPlan {
    std::map<CellId, std::vector<CsBandAssignment>> cells;
};

/// Coordinated scheduling: the system band is split into one equal band per
/// cell. On its own band a cell clusters its CoMP user with its non-CoMP users;
/// on every other band it serves only its non-CoMP users. Per-band power is
/// the cell budget times the band fraction. The i-th CoMP user of the set is
/// served by the i-th cell.
CsBandPlan build_cs_band_plan(const CompSet& set, const std::map<CellId, std::vector<UserId>>& noncomp_users,
                              double cell_budget_mw, double system_bandwidth_hz);

/// Coordinated beamforming has no NOMA form with single-antenna nodes; this is
/// the rejection every CB request receives.
ConfigError reject_cb(std::size_t comp_set_size = 2);

}  // namespace compnoma
