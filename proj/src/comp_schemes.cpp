#include <compnoma/comp_schemes.hpp>

#include <algorithm>
#include <set>

namespace compnoma {

void CompSet::validate() const
{
    if (cells.size() < 2) throw ConfigError("a CoMP set needs at least two cells");
    if (comp_users.empty()) throw ConfigError("a CoMP set needs at least one CoMP user");
}

std::optional<ConditionViolation> check_jt_conditions(std::span<const NomaCluster> clusters,
                                                      std::span<const UserId> comp_users)
{
    const std::set<UserId> comp(comp_users.begin(), comp_users.end());

    for (const NomaCluster& cluster : clusters) {
        std::optional<UserId> first_single;
        for (UserId u : cluster.decode_order) {
            if (!comp.contains(u)) {
                if (!first_single) first_single = u;
            } else if (first_single) {
                return ConditionViolation(1, cluster.cell, {*first_single, u},
                                          to_string(*first_single) + " is decoded before CoMP user " + to_string(u) +
                                              " in the cluster of " + to_string(cluster.cell));
            }
        }
    }

    auto comp_sequence = [&](const NomaCluster& cluster) {
        std::vector<UserId> seq;
        for (UserId u : cluster.decode_order)
            if (comp.contains(u)) seq.push_back(u);
        return seq;
    };
    for (std::size_t a = 0; a < clusters.size(); ++a) {
        const auto seq_a = comp_sequence(clusters[a]);
        for (std::size_t b = a + 1; b < clusters.size(); ++b) {
            const auto seq_b = comp_sequence(clusters[b]);
            std::vector<UserId> common_a, common_b;
            std::copy_if(seq_a.begin(), seq_a.end(), std::back_inserter(common_a),
                         [&](UserId u) { return std::find(seq_b.begin(), seq_b.end(), u) != seq_b.end(); });
            std::copy_if(seq_b.begin(), seq_b.end(), std::back_inserter(common_b),
                         [&](UserId u) { return std::find(seq_a.begin(), seq_a.end(), u) != seq_a.end(); });
            if (common_a != common_b) {
                auto diff = std::mismatch(common_a.begin(), common_a.end(), common_b.begin());
                return ConditionViolation(2, clusters[b].cell, {*diff.first, *diff.second},
                                          "CoMP decoding order in the cluster of " + to_string(clusters[b].cell) +
                                              " differs from the cluster of " + to_string(clusters[a].cell));
            }
        }
    }
    return std::nullopt;
}

void validate_jt_conditions(std::span<const NomaCluster> clusters, std::span<const UserId> comp_users)
{
    if (auto violation = check_jt_conditions(clusters, comp_users)) throw *violation;
}

CellId dps_select_cell(UserId comp_user, const ChannelRealization& gains, std::span<const CellId> cells)
{
    if (cells.empty()) throw DomainError("dps_select_cell: empty cell set");
    std::vector<CellId> sorted(cells.begin(), cells.end());
    std::sort(sorted.begin(), sorted.end());
    CellId best = sorted.front();
    double best_gain = gains.gain(best, comp_user);
    for (CellId c : sorted) {
        const double g = gains.gain(c, comp_user);
        if (g > best_gain) {
            best = c;
            best_gain = g;
        }
    }
    return best;
}

CsBandPlan build_cs_band_plan(const CompSet& set, const std::map<CellId, std::vector<UserId>>& noncomp_users,
                              double cell_budget_mw, double system_bandwidth_hz)
{
    if (set.scheme != CompScheme::CS) throw ConfigError("band plan requested for a non-CS CoMP set");
    set.validate();
    if (set.comp_users.size() != set.cells.size())
        throw ConfigError("CS-CoMP needs exactly one CoMP user per participating cell");
    for (CellId c : set.cells) {
        auto it = noncomp_users.find(c);
        if (it == noncomp_users.end() || it->second.empty())
            throw ConfigError("CS-CoMP needs at least one non-CoMP user in " + to_string(c));
    }

    const std::size_t k = set.cells.size();
    const double fraction = 1.0 / static_cast<double>(k);
    CsBandPlan plan;
    for (std::size_t i = 0; i < k; ++i) {
        const CellId cell = set.cells[i];
        auto& bands = plan.cells[cell];
        for (std::size_t b = 0; b < k; ++b) {
            CsBandAssignment a;
            a.band = Band{static_cast<int>(b), system_bandwidth_hz * fraction, fraction};
            a.power_mw = cell_budget_mw * fraction;
            a.carries_comp_user = (b == i);
            if (a.carries_comp_user) a.members.push_back(set.comp_users[i]);
            const auto& singles = noncomp_users.at(cell);
            a.members.insert(a.members.end(), singles.begin(), singles.end());
            bands.push_back(std::move(a));
        }
    }
    return plan;
}

ConfigError reject_cb(std::size_t comp_set_size)
{
    return ConfigError("CB-CoMP not applicable under single-antenna NOMA: zero-forcing precoders sized to the " +
                       std::to_string(comp_set_size) +
                       "-cell CoMP set do not match the one-dimensional channel of the non-CoMP users sharing the beam");
}

}  // namespace compnoma
