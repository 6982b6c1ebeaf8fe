#include <compnoma/noma_core.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace compnoma {

UserId NomaCluster::head() const
{
    if (decode_order.empty()) throw DomainError("empty NOMA cluster has no head");
    return decode_order.back();
}

std::size_t NomaCluster::position_of(UserId user) const
{
    auto it = std::find(decode_order.begin(), decode_order.end(), user);
    if (it == decode_order.end())
        throw LookupError(to_string(user) + " is not in the cluster of " + to_string(cell));
    return static_cast<std::size_t>(it - decode_order.begin());
}

bool NomaCluster::contains(UserId user) const
{
    return std::find(decode_order.begin(), decode_order.end(), user) != decode_order.end();
}

void NomaCluster::validate() const
{
    if (decode_order.empty()) throw DomainError("cluster of " + to_string(cell) + " is empty");
    if (!(band.width_hz > 0.0) || !(band.fraction > 0.0) || band.fraction > 1.0)
        throw DomainError("cluster band must have positive width and fraction in (0, 1]");
    std::set<UserId> seen;
    for (UserId u : decode_order)
        if (!seen.insert(u).second) throw DomainError("duplicate " + to_string(u) + " in decode order");
    for (std::size_t i = 0; i + 1 < decode_order.size(); ++i)
        if (!rate_guarantees.contains(decode_order[i]))
            throw DomainError("non-head " + to_string(decode_order[i]) + " has no rate guarantee");
    for (const auto& [user, rate] : rate_guarantees) {
        if (!contains(user)) throw DomainError("guarantee for " + to_string(user) + " outside the cluster");
        if (!(rate >= 0.0) || !std::isfinite(rate)) throw DomainError("rate guarantees must be finite and >= 0");
    }
}

std::string to_string(AllocationStatus s)
{
    switch (s) {
    case AllocationStatus::Ok: return "ok";
    case AllocationStatus::InfeasibleGuarantee: return "infeasible_guarantee";
    case AllocationStatus::HeadGuaranteeMissed: return "head_guarantee_missed";
    case AllocationStatus::NonConvergence: return "non_convergence";
    case AllocationStatus::BudgetBreach: return "budget_breach";
    }
    return "unknown";
}

double PowerAllocation::power(UserId user) const
{
    auto it = powers.find(user);
    if (it == powers.end()) throw LookupError("no power allocated to " + to_string(user));
    return it->second;
}

double PowerAllocation::total() const
{
    double sum = 0.0;
    for (const auto& [user, p] : powers) sum += p;
    return sum;
}

double in_band_gain(const NomaCluster& cluster, const ChannelRealization& gains, UserId user)
{
    return gains.gain(cluster.cell, user) / cluster.band.fraction;
}

double power_after(const NomaCluster& cluster, const PowerAllocation& alloc, std::size_t position)
{
    double sum = 0.0;
    for (std::size_t j = position + 1; j < cluster.decode_order.size(); ++j) sum += alloc.power(cluster.decode_order[j]);
    return sum;
}

double user_rate_single_cell(const NomaCluster& cluster, const PowerAllocation& alloc,
                             const ChannelRealization& gains, UserId user)
{
    const std::size_t pos = cluster.position_of(user);
    const double gamma = in_band_gain(cluster, gains, user);
    const double signal = alloc.power(user) * gamma;
    const double interference = power_after(cluster, alloc, pos) * gamma;
    return cluster.band.width_hz * std::log2(1.0 + signal / (interference + 1.0));
}

double comp_user_rate_jt(std::span<const NomaCluster> clusters, std::span<const PowerAllocation> allocs,
                         const ChannelRealization& gains, UserId user)
{
    if (clusters.empty() || clusters.size() != allocs.size())
        throw DomainError("comp_user_rate_jt: need one allocation per cluster");
    const double width = clusters.front().band.width_hz;
    double signal = 0.0;
    double interference = 0.0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const NomaCluster& cluster = clusters[c];
        if (!cluster.contains(user))
            throw ConditionViolation(0, cluster.cell, {user},
                                     to_string(user) + " missing from the cluster of " + to_string(cluster.cell));
        if (cluster.band.width_hz != width) throw DomainError("joint transmission clusters must share one band");
        const double gamma = in_band_gain(cluster, gains, user);
        signal += allocs[c].power(user) * gamma;
        interference += power_after(cluster, allocs[c], cluster.position_of(user)) * gamma;
    }
    return width * std::log2(1.0 + signal / (interference + 1.0));
}

double noncomp_user_rate(const NomaCluster& cluster, const PowerAllocation& alloc, const ChannelRealization& gains,
                         UserId user, InterferenceMode mode, std::span<const InterferingCell> interferers)
{
    const std::size_t pos = cluster.position_of(user);
    const double gamma = in_band_gain(cluster, gains, user);
    const double signal = alloc.power(user) * gamma;
    const double intra = power_after(cluster, alloc, pos) * gamma;
    if (mode == InterferenceMode::Negligible)
        return cluster.band.width_hz * std::log2(1.0 + signal / (intra + 1.0));

    double inter = 0.0;
    for (const InterferingCell& other : interferers)
        inter += other.power_mw * (gains.gain(other.cell, user) / cluster.band.fraction);
    return cluster.band.width_hz * std::log2(1.0 + signal / (intra + inter + 1.0));
}

std::map<UserId, double> effective_gains(const NomaCluster& cluster, const ChannelRealization& gains,
                                         std::span<const CellId> comp_cells, std::span<const UserId> comp_users)
{
    std::map<UserId, double> out;
    for (UserId u : cluster.decode_order) {
        const bool joint = !comp_cells.empty() && std::find(comp_users.begin(), comp_users.end(), u) != comp_users.end();
        if (!joint) {
            out[u] = in_band_gain(cluster, gains, u);
            continue;
        }
        double sum = 0.0;
        for (CellId c : comp_cells) sum += gains.gain(c, u) / cluster.band.fraction;
        out[u] = sum;
    }
    return out;
}

bool sic_feasible(const NomaCluster& cluster, const PowerAllocation& alloc,
                  const std::map<UserId, double>& decoding_gains, double p_tol)
{
    const auto& order = cluster.decode_order;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const double p_i = alloc.power(order[i]);
        const double gap = p_i - power_after(cluster, alloc, i);
        for (std::size_t k = i; k < order.size(); ++k) {
            auto it = decoding_gains.find(order[k]);
            if (it == decoding_gains.end()) throw LookupError("no decoding gain for " + to_string(order[k]));
            const double gamma = it->second;
            const double slack = 1e-9 * std::max(p_tol, p_i * gamma);
            if (gap * gamma < p_tol - slack) return false;
        }
    }
    return true;
}

bool sic_feasible(const NomaCluster& cluster, const PowerAllocation& alloc, const ChannelRealization& gains,
                  double p_tol)
{
    return sic_feasible(cluster, alloc, effective_gains(cluster, gains), p_tol);
}

}  // namespace compnoma
