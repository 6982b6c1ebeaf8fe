#include <compnoma/scenarios.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>

namespace compnoma {

namespace {

constexpr int kMaxPlacementAttempts = 1'000'000;

double rate_on(double fraction, double bandwidth_hz, double received)
{
    return fraction * bandwidth_hz * std::log2(1.0 + received);
}

// Rate of `user` on a band of the given fraction, transmitted with power
// proportional to spectrum by every cell in `cells` and combined at the user.
double proportional_rate(const ScenarioTopology& topo, const ChannelRealization& gains, const RadioParams& radio,
                         UserId user, double fraction, std::initializer_list<std::size_t> cells)
{
    double received = 0.0;
    for (std::size_t c : cells) {
        const Cell& cell = topo.cells.at(c);
        const double p = cell.power_budget_mw * fraction;
        const double gamma_w = gains.gain(cell.id, user) / fraction;
        received += p * gamma_w;
    }
    return rate_on(fraction, radio.bandwidth_hz, received);
}

std::vector<UserId> sorted_by_gain(std::vector<UserId> users, const ChannelRealization& gains, CellId cell)
{
    std::stable_sort(users.begin(), users.end(),
                     [&](UserId a, UserId b) { return gains.gain(cell, a) < gains.gain(cell, b); });
    return users;
}

Point sample_comp_position(const ScenarioGeometry& g, double coverage, TrialStream& stream)
{
    const Point bs0{0.0, 0.0};
    const Point bs1{g.inter_bs_distance_m, 0.0};
    const double outer = g.noncomp_radius_m + coverage;
    for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
        Point p;
        if (g.placement == CompPlacement::Disc) {
            const double r = coverage * std::sqrt(stream.uniform());
            const double theta = 2.0 * std::numbers::pi * stream.uniform();
            p = Point{g.inter_bs_distance_m / 2.0 + r * std::cos(theta), r * std::sin(theta)};
        } else {
            p = Point{-outer + (g.inter_bs_distance_m + 2.0 * outer) * stream.uniform(),
                      -outer + 2.0 * outer * stream.uniform()};
        }
        const double nearest = std::min(distance(p, bs0), distance(p, bs1));
        if (nearest <= g.noncomp_radius_m) continue;
        if (g.placement == CompPlacement::Annulus && nearest > outer) continue;
        return p;
    }
    throw ConfigError("CoMP placement region is empty for coverage distance " + std::to_string(coverage) + " m");
}

}  // namespace

std::string to_string(Scheme s)
{
    switch (s) {
    case Scheme::JtNoma: return "JT-NOMA";
    case Scheme::CsNoma: return "CS-NOMA";
    case Scheme::DpsNoma: return "DPS-NOMA";
    case Scheme::JtOma: return "JT-OMA";
    case Scheme::CsOma: return "CS-OMA";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& label)
{
    std::string key;
    for (char ch : label)
        if (ch != '-' && ch != '_' && ch != ' ') key += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (key == "JTNOMA") return Scheme::JtNoma;
    if (key == "CSNOMA") return Scheme::CsNoma;
    if (key == "DPSNOMA") return Scheme::DpsNoma;
    if (key == "JTOMA") return Scheme::JtOma;
    if (key == "CSOMA") return Scheme::CsOma;
    if (key.starts_with("CB")) throw reject_cb();
    throw ConfigError("unknown scheme '" + label + "'");
}

std::string to_string(CompPlacement p) { return p == CompPlacement::Disc ? "disc" : "annulus"; }

void ScenarioGeometry::validate() const
{
    auto positive = [](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(field, "must be positive");
    };
    positive(inter_bs_distance_m, "placement.inter_bs_distance_m");
    positive(noncomp_radius_m, "placement.noncomp_radius_m");
    positive(second_user_distance_m, "placement.second_user_distance_m");
    positive(noncomp_distance_m, "placement.noncomp_distance_m");
    positive(scenario1_edge_radius_m, "placement.scenario1_edge_radius_m");
    if (second_user_distance_m > noncomp_radius_m)
        throw ValidationError("placement.second_user_distance_m", "must lie inside the non-CoMP radius");
    if (noncomp_distance_m > noncomp_radius_m)
        throw ValidationError("placement.noncomp_distance_m", "must lie inside the non-CoMP radius");
}

const UserEquipment& ScenarioTopology::user(UserId id) const
{
    for (const auto& u : users)
        if (u.id == id) return u;
    throw LookupError("no " + to_string(id) + " in topology");
}

std::vector<UserId> ScenarioTopology::noncomp_users(CellId cell) const
{
    std::vector<UserId> out;
    for (const auto& u : users)
        if (u.role == Role::NonComp && u.serving_cells.front() == cell) out.push_back(u.id);
    return out;
}

bool ScenarioTopology::is_comp(UserId id) const { return user(id).role == Role::Comp; }

std::pair<double, double> sweep_bounds(int scenario_id, const ScenarioGeometry& geometry)
{
    if (scenario_id == 1) return {0.0, geometry.noncomp_radius_m};
    if (scenario_id == 2 || scenario_id == 3) return {0.0, geometry.inter_bs_distance_m / 2.0};
    throw ConfigError("unknown scenario " + std::to_string(scenario_id));
}

ScenarioTopology build_scenario(int scenario_id, double sweep_value, DecodeCase decode_case,
                                const ScenarioGeometry& geometry, double cell_budget_mw, TrialStream& stream)
{
    geometry.validate();
    const auto [lo, hi] = sweep_bounds(scenario_id, geometry);
    if (!(sweep_value > lo && sweep_value <= hi))
        throw ConfigError("sweep value " + std::to_string(sweep_value) + " m outside (" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] for scenario " + std::to_string(scenario_id));

    ScenarioTopology topo;
    topo.scenario_id = scenario_id;
    topo.sweep_value = sweep_value;
    topo.decode_case = decode_case;
    const CellId c0{0}, c1{1};
    const double d = geometry.inter_bs_distance_m;
    topo.cells = {Cell{c0, {0.0, 0.0}, cell_budget_mw}, Cell{c1, {d, 0.0}, cell_budget_mw}};
    topo.comp_set.cells = {c0, c1};
    topo.comp_set.scheme = CompScheme::JT;

    const std::size_t num_comp = scenario_id == 1 ? 1 : 2;
    const double coverage = scenario_id == 1 ? geometry.scenario1_edge_radius_m : sweep_value;
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < num_comp; ++i) {
        const UserId id{next++};
        topo.users.push_back(UserEquipment{id, Role::Comp, {c0, c1}, sample_comp_position(geometry, coverage, stream)});
        topo.comp_set.comp_users.push_back(id);
    }
    auto add_single = [&](CellId cell, double x, double y) {
        topo.users.push_back(UserEquipment{UserId{next++}, Role::NonComp, {cell}, Point{x, y}});
    };
    switch (scenario_id) {
    case 1:
        add_single(c0, 0.0, sweep_value);
        add_single(c0, 0.0, -geometry.second_user_distance_m);
        add_single(c1, d, sweep_value);
        add_single(c1, d, -geometry.second_user_distance_m);
        break;
    case 2:
        add_single(c0, 0.0, geometry.noncomp_distance_m);
        add_single(c1, d, geometry.noncomp_distance_m);
        break;
    default:
        add_single(c0, 0.0, geometry.noncomp_distance_m);
        break;
    }
    return topo;
}

std::vector<NomaCluster> form_jt_clusters(const ScenarioTopology& topo, const ChannelRealization& gains,
                                          double bandwidth_hz)
{
    // Cell whose ascending-gain order the CoMP users share.
    CellId reference = topo.cells.front().id;
    if (topo.scenario_id == 3 && topo.decode_case == DecodeCase::Case1) reference = topo.cells.at(1).id;
    const auto comp_order = sorted_by_gain(topo.comp_set.comp_users, gains, reference);

    std::vector<NomaCluster> clusters;
    for (const Cell& cell : topo.cells) {
        NomaCluster cl;
        cl.cell = cell.id;
        cl.band = Band{0, bandwidth_hz, 1.0};
        cl.decode_order = comp_order;
        const auto singles = sorted_by_gain(topo.noncomp_users(cell.id), gains, cell.id);
        cl.decode_order.insert(cl.decode_order.end(), singles.begin(), singles.end());
        clusters.push_back(std::move(cl));
    }
    return clusters;
}

std::vector<NomaCluster> form_dps_clusters(const ScenarioTopology& topo, const ChannelRealization& gains,
                                           double bandwidth_hz)
{
    std::map<CellId, std::vector<UserId>> members;
    for (UserId u : topo.comp_set.comp_users)
        members[dps_select_cell(u, gains, topo.comp_set.cells)].push_back(u);
    std::vector<NomaCluster> clusters;
    for (const Cell& cell : topo.cells) {
        auto users = members[cell.id];
        const auto singles = topo.noncomp_users(cell.id);
        users.insert(users.end(), singles.begin(), singles.end());
        if (users.empty()) continue;
        NomaCluster cl;
        cl.cell = cell.id;
        cl.band = Band{0, bandwidth_hz, 1.0};
        cl.decode_order = sorted_by_gain(std::move(users), gains, cell.id);
        clusters.push_back(std::move(cl));
    }
    return clusters;
}

std::map<UserId, double> oma_rates(const ScenarioTopology& topo, const ChannelRealization& gains,
                                   const RadioParams& radio)
{
    std::map<UserId, double> out;
    const double third = 1.0 / 3.0;
    for (const auto& u : topo.users) {
        const std::size_t own = index_of(u.serving_cells.front());
        if (u.role == Role::NonComp) {
            out[u.id] = proportional_rate(topo, gains, radio, u.id, third, {own});
        } else if (topo.scenario_id == 3) {
            out[u.id] = proportional_rate(topo, gains, radio, u.id, third, {0, 1}) +
                        proportional_rate(topo, gains, radio, u.id, 1.0 / 6.0, {1});
        } else {
            out[u.id] = proportional_rate(topo, gains, radio, u.id, third, {0, 1});
        }
    }
    return out;
}

namespace {

CsBandPlan cs_plan(const ScenarioTopology& topo, const RadioParams& radio)
{
    CompSet set = topo.comp_set;
    set.scheme = CompScheme::CS;
    std::map<CellId, std::vector<UserId>> singles;
    for (const Cell& c : topo.cells) singles[c.id] = topo.noncomp_users(c.id);
    return build_cs_band_plan(set, singles, topo.cells.front().power_budget_mw, radio.bandwidth_hz);
}

}  // namespace

std::map<UserId, double> cs_oma_rates(const ScenarioTopology& topo, const ChannelRealization& gains,
                                      const RadioParams& radio)
{
    std::map<UserId, double> out;
    for (const auto& u : topo.users) out[u.id] = 0.0;
    for (const auto& [cell, bands] : cs_plan(topo, radio).cells) {
        for (const auto& band : bands) {
            const double share = band.band.fraction / static_cast<double>(band.members.size());
            for (UserId u : band.members)
                out[u] += proportional_rate(topo, gains, radio, u, share, {index_of(cell)});
        }
    }
    return out;
}

namespace {

void fallback(TrialResult& r, AllocationStatus status)
{
    r.feasible = false;
    r.status = status;
    r.scheme_rates = r.oma_rates;
}

CrossCellGains cross_gains(const ScenarioTopology& topo, const ChannelRealization& gains)
{
    CrossCellGains cross;
    for (const auto& u : topo.users) {
        if (u.role == Role::Comp) continue;
        for (const Cell& c : topo.cells)
            if (c.id != u.serving_cells.front()) cross.gains[{c.id, u.id}] = gains.gain(c.id, u.id);
    }
    return cross;
}

AllocationProblem single_cell_problem(NomaCluster cluster, const ChannelRealization& gains, double budget,
                                      double p_tol)
{
    AllocationProblem pr;
    for (UserId u : cluster.decode_order) pr.gains[u] = in_band_gain(cluster, gains, u);
    pr.cluster = std::move(cluster);
    pr.budget = budget;
    pr.p_tol = p_tol;
    return pr;
}

void run_jt_noma(const ScenarioTopology& topo, const ChannelRealization& gains, const TrialOptions& opt,
                 TrialResult& r)
{
    auto clusters = form_jt_clusters(topo, gains, opt.radio.bandwidth_hz);
    const auto& comp = topo.comp_set.comp_users;
    validate_jt_conditions(clusters, comp);

    for (auto& cl : clusters)
        for (std::size_t i = 0; i + 1 < cl.decode_order.size(); ++i) {
            const UserId u = cl.decode_order[i];
            cl.rate_guarantees[u] = r.oma_rates.at(u);
            r.guarantees[u] = r.oma_rates.at(u);
        }
    // A CoMP user heading one cluster is guaranteed through the others; the
    // solver reads its guarantee from any cluster that carries it.

    std::vector<AllocationProblem> problems;
    for (const auto& cl : clusters) {
        AllocationProblem pr;
        pr.cluster = cl;
        pr.gains = effective_gains(cl, gains, topo.comp_set.cells, comp);
        for (UserId u : cl.decode_order) pr.link_gains[u] = in_band_gain(cl, gains, u);
        pr.budget = topo.cells.at(index_of(cl.cell)).power_budget_mw;
        pr.p_tol = opt.radio.sic_tolerance;
        problems.push_back(std::move(pr));
    }

    JtOptions jt;
    jt.split = opt.jt_split;
    CrossCellGains cross;
    if (opt.interference == InterferenceMode::Full) {
        cross = cross_gains(topo, gains);
        jt.cross = &cross;
    }
    const auto allocs = allocate_jt(problems, comp, jt);
    for (const auto& a : allocs)
        if (!a.feasible) return fallback(r, a.status);

    for (UserId u : comp) r.scheme_rates[u] = comp_user_rate_jt(clusters, allocs, gains, u);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        std::vector<InterferingCell> others;
        for (std::size_t o = 0; o < clusters.size(); ++o) {
            if (o == c) continue;
            double p = 0.0;
            for (UserId u : clusters[o].decode_order)
                if (!topo.is_comp(u)) p += allocs[o].power(u);
            others.push_back(InterferingCell{clusters[o].cell, p});
        }
        for (UserId u : clusters[c].decode_order)
            if (!topo.is_comp(u))
                r.scheme_rates[u] = noncomp_user_rate(clusters[c], allocs[c], gains, u, opt.interference, others);
    }
}

void run_dps_noma(const ScenarioTopology& topo, const ChannelRealization& gains, const TrialOptions& opt,
                  TrialResult& r)
{
    for (auto cl : form_dps_clusters(topo, gains, opt.radio.bandwidth_hz)) {
        for (std::size_t i = 0; i + 1 < cl.decode_order.size(); ++i) {
            const UserId u = cl.decode_order[i];
            cl.rate_guarantees[u] = r.oma_rates.at(u);
            r.guarantees[u] = r.oma_rates.at(u);
        }
        const double budget = topo.cells.at(index_of(cl.cell)).power_budget_mw;
        const auto pr = single_cell_problem(cl, gains, budget, opt.radio.sic_tolerance);
        const auto alloc = allocate_single_cell(pr);
        if (!alloc.feasible) return fallback(r, alloc.status);
        for (UserId u : cl.decode_order) r.scheme_rates[u] = user_rate_single_cell(cl, alloc, gains, u);
    }
}

void run_cs_noma(const ScenarioTopology& topo, const ChannelRealization& gains, const TrialOptions& opt,
                 TrialResult& r)
{
    for (const Cell& c : topo.cells)
        if (topo.noncomp_users(c.id).size() != 1)
            throw ConfigError("CS-NOMA needs exactly one non-CoMP user per cell");
    const CsBandPlan plan = cs_plan(topo, opt.radio);
    for (const auto& u : topo.users) r.scheme_rates[u.id] = 0.0;

    // Bands without a CoMP user first: what a non-CoMP user earns there counts
    // toward its guarantee on the shared band.
    for (const bool with_comp : {false, true}) {
        for (const auto& [cell, bands] : plan.cells) {
            for (const auto& band : bands) {
                if (band.carries_comp_user != with_comp) continue;
                NomaCluster cl;
                cl.cell = cell;
                cl.band = band.band;
                cl.decode_order = band.members;
                std::stable_sort(cl.decode_order.begin(), cl.decode_order.end(),
                                 [&](UserId a, UserId b) { return gains.gain(cell, a) < gains.gain(cell, b); });
                for (std::size_t i = 0; i + 1 < cl.decode_order.size(); ++i) {
                    const UserId u = cl.decode_order[i];
                    cl.rate_guarantees[u] = std::max(0.0, r.oma_rates.at(u) - r.scheme_rates.at(u));
                    r.guarantees[u] = r.oma_rates.at(u);
                }
                const auto pr = single_cell_problem(cl, gains, band.power_mw, opt.radio.sic_tolerance);
                const auto alloc = allocate_single_cell(pr);
                if (!alloc.feasible) return fallback(r, alloc.status);
                for (UserId u : cl.decode_order) r.scheme_rates[u] += user_rate_single_cell(cl, alloc, gains, u);
            }
        }
    }
}

double spectral_efficiency(const std::map<UserId, double>& rates, double bandwidth_hz)
{
    double sum = 0.0;
    for (const auto& [u, rate] : rates) sum += rate;
    return sum / bandwidth_hz;
}

}  // namespace

TrialResult run_trial(const ScenarioTopology& topo, const ChannelRealization& gains, Scheme scheme,
                      const TrialOptions& options)
{
    TrialResult r;
    r.scheme = scheme;
    r.oma_rates = oma_rates(topo, gains, options.radio);
    switch (scheme) {
    case Scheme::JtOma: r.scheme_rates = r.oma_rates; break;
    case Scheme::CsOma: r.scheme_rates = cs_oma_rates(topo, gains, options.radio); break;
    case Scheme::JtNoma: run_jt_noma(topo, gains, options, r); break;
    case Scheme::DpsNoma: run_dps_noma(topo, gains, options, r); break;
    case Scheme::CsNoma: run_cs_noma(topo, gains, options, r); break;
    }
    r.scheme_se = spectral_efficiency(r.scheme_rates, options.radio.bandwidth_hz);
    r.oma_se = spectral_efficiency(r.oma_rates, options.radio.bandwidth_hz);
    return r;
}

}  // namespace compnoma
