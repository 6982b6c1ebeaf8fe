#pragma once

#include <compnoma/noma_core.hpp>

#include <map>
#include <span>
#include <vector>

namespace compnoma {

/// One cell's share of a NOMA power-allocation problem.
///
/// `gains` holds each user's effective in-band decoding gain: the cell's own
/// link gain for single-cell users, the sum over coordinating cells for
/// jointly transmitted users. `link_gains` holds the gain from this cell only;
/// it is only consulted by allocate_jt and defaults to `gains` when empty.
/// `interference` is extra noise-normalized interference per user (0 if absent).
struct AllocationProblem {
    NomaCluster cluster;
    std::map<UserId, double> gains;
    std::map<UserId, double> link_gains;
    double budget = 0.0;
    double p_tol = 0.0;
    std::map<UserId, double> interference;

    double band_width() const { return cluster.band.width_hz; }
    void validate() const;
};

/// SINR target for a rate guarantee over `width_hz`: 2^(rate/width) - 1.
double sinr_target(double rate, double width_hz);

/// Forward solve along the decode order. Each non-head position k takes the
/// larger of the rate-driven and SIC-driven minimum powers given the budget P_k
/// left for positions >= k, evaluated at the worst decoder of its signal:
///
///   rate:  t_k (P_k + (1 + e)/gamma) / (1 + t_k)
///   SIC:   (P_k + p_tol/gamma) / 2
///
/// The head receives whatever remains. Infeasibility is reported through the
/// returned status with the binding position; nothing is thrown.
PowerAllocation allocate_single_cell(const AllocationProblem& problem);

/// Cross-cell gains used when non-CoMP users see interference from the other
/// coordinating cells' non-CoMP transmissions (in-band, noise-normalized).
struct CrossCellGains {
    std::map<std::pair<CellId, UserId>, double> gains;
};

/// How a CoMP user's required received power is shared among the cells where
/// it is not the cluster-head.
///   EqualReceived: every cell delivers the same received power, p_c = X/(M gamma_c).
///   ProportionalPower: every cell spends the same fraction of its remaining
///   power, p_c = f Rem_c with f = X / sum_c gamma_c Rem_c.
enum class JtSplit { EqualReceived, ProportionalPower };

std::string to_string(JtSplit s);

struct JtOptions {
    JtSplit split = JtSplit::EqualReceived;
    double tolerance = 1e-9;
    int max_iterations = 100;
    const CrossCellGains* cross = nullptr;  // null: inter-cell interference negligible
};

/// Joint-transmission allocation across the clusters of one CoMP set.
///
/// Every CoMP user must appear in every cluster, ahead of all non-CoMP users,
/// with a consistent relative order. Per sweep, each CoMP user in decode order
/// gets the combined received power its guarantee needs, split equally across
/// the cells where it is not the head (a cell where it is the head contributes
/// its residual power). Per-cell SIC and worst-decoder minimums may raise a
/// cell's share. Each cell's non-CoMP users are then solved by
/// allocate_single_cell with the CoMP powers pinned. Sweeps repeat until the
/// largest relative power change drops below the tolerance. `iterations` counts
/// the sweeps that changed the allocation.
std::vector<PowerAllocation> allocate_jt(std::span<const AllocationProblem> problems,
                                         std::span<const UserId> comp_users, const JtOptions& options = {});

/// Exhaustive grid search over the power simplex (full-budget face), at most
/// three users, maximizing sum rate subject to guarantees at every decoder and
/// the SIC gap. The best coarse point is refined by a second exhaustive grid
/// over its neighbouring cells. Independent of allocate_single_cell.
PowerAllocation brute_force_oracle(const AllocationProblem& problem, std::size_t grid_points);

/// Sum of user_rate_single_cell over the cluster, using `problem.gains` as the
/// in-band gains.
double cluster_sum_rate(const AllocationProblem& problem, const PowerAllocation& alloc);

}  // namespace compnoma
