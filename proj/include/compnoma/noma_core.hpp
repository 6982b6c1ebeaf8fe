#pragma once

#include <compnoma/channel_model.hpp>
#include <compnoma/types.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace compnoma {

enum class Role { Comp, NonComp };

struct UserEquipment {
    UserId id{};
    Role role = Role::NonComp;
    /// All cells of the CoMP set for CoMP users, the serving cell otherwise.
    std::vector<CellId> serving_cells;
    Point position;
};

struct Cell {
    CellId id{};
    Point position;
    double power_budget_mw = 0.0;
};

/// A slice of the system band. `fraction` is width / system bandwidth; gains
/// normalized over the full system band are divided by it to get the in-band
/// noise-normalized gain.
struct Band {
    int id = 0;
    double width_hz = 1.0;
    double fraction = 1.0;
};

struct NomaCluster {
    CellId cell{};
    Band band;
    /// First element is decoded first at every receiver; last is the cluster-head.
    std::vector<UserId> decode_order;
    /// bits/s; required for every non-head user, optional for the head.
    std::map<UserId, double> rate_guarantees;

    UserId head() const;
    std::size_t position_of(UserId user) const;  // LookupError if absent
    bool contains(UserId user) const;
    void validate() const;                        // DomainError on broken invariants
};

enum class AllocationStatus { Ok, InfeasibleGuarantee, HeadGuaranteeMissed, NonConvergence, BudgetBreach };

std::string to_string(AllocationStatus s);

struct PowerAllocation {
    std::map<UserId, double> powers;  // mW
    bool feasible = false;
    AllocationStatus status = AllocationStatus::Ok;
    std::optional<std::size_t> binding_position;
    std::vector<std::string> diagnostics;
    int iterations = 0;

    double power(UserId user) const;  // LookupError if absent
    double total() const;
};

/// In-band gain of `user` from the cluster's cell: gamma / band.fraction.
double in_band_gain(const NomaCluster& cluster, const ChannelRealization& gains, UserId user);

/// Sum of powers of users decoded after `position` in the cluster.
double power_after(const NomaCluster& cluster, const PowerAllocation& alloc, std::size_t position);

double user_rate_single_cell(const NomaCluster& cluster, const PowerAllocation& alloc,
                             const ChannelRealization& gains, UserId user);

/// Rate of a jointly transmitted user: received powers from every cluster add
/// in the numerator; each cell's later-decoded powers add in the denominator.
double comp_user_rate_jt(std::span<const NomaCluster> clusters, std::span<const PowerAllocation> allocs,
                         const ChannelRealization& gains, UserId user);

enum class InterferenceMode { Negligible, Full };

/// Power another cell radiates on the same band toward this non-CoMP user.
struct InterferingCell {
    CellId cell{};
    double power_mw = 0.0;
};

double noncomp_user_rate(const NomaCluster& cluster, const PowerAllocation& alloc, const ChannelRealization& gains,
                         UserId user, InterferenceMode mode,
                         std::span<const InterferingCell> interferers = {});

/// Effective decoding gain for each user of a cluster: the cluster cell's
/// in-band gain, or for users listed in `comp_cells` the sum over those cells.
std::map<UserId, double> effective_gains(const NomaCluster& cluster, const ChannelRealization& gains,
                                         std::span<const CellId> comp_cells = {},
                                         std::span<const UserId> comp_users = {});

/// SIC power-gap predicate: for each non-head position i and every receiver k
/// at position >= i, (p_i - sum_{j>i} p_j) * gamma_k >= p_tol. A relative
/// slack of 1e-9 absorbs rounding at the exact boundary.
bool sic_feasible(const NomaCluster& cluster, const PowerAllocation& alloc,
                  const std::map<UserId, double>& decoding_gains, double p_tol);

bool sic_feasible(const NomaCluster& cluster, const PowerAllocation& alloc, const ChannelRealization& gains,
                  double p_tol);

}  // namespace compnoma
