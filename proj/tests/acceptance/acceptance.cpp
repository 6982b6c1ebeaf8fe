// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <compnoma/comp_schemes.hpp>
#include <compnoma/config_io.hpp>
#include <compnoma/harness.hpp>
#include <compnoma/power_allocation.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>
#include <vector>

using namespace compnoma;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string& what)
{
    std::printf("[%s] C%d %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Average ranks, ties share the mean rank.
std::vector<double> ranks(const std::vector<double>& v)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------

void criterion_oracle()
{
    constexpr int kProblems = 1000;
    constexpr std::size_t kGrid = 1000;
    constexpr double kRelTol = 1e-3;
    const double budget = dbm_to_mw(43.0);
    const double width = 8.64e6;

    const auto t0 = Clock::now();
    TrialStream s(2024, 0, 0);
    int both_feasible = 0, rate_mismatch = 0, verdict_mismatch = 0, boundary_excused = 0;
    double worst = 0.0;
    for (int i = 0; i < kProblems; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(i % 2);
        const double p_tol = (i / 2) % 2 == 0 ? 0.0 : 100.0;
        std::vector<double> g(n);
        for (auto& x : g) x = std::pow(10.0, -5.0 + 3.0 * s.uniform());
        std::sort(g.begin(), g.end());

        AllocationProblem pr;
        pr.cluster.cell = CellId{0};
        pr.cluster.band = Band{0, width, 1.0};
        pr.budget = budget;
        pr.p_tol = p_tol;
        for (std::uint32_t k = 0; k < n; ++k) {
            const UserId u{k};
            pr.cluster.decode_order.push_back(u);
            pr.gains[u] = g[k];
            // Guarantee = OMA rate on an equal 1/n share with proportional power.
            if (k + 1 < n) pr.cluster.rate_guarantees[u] = width / static_cast<double>(n) * std::log2(1.0 + budget * g[k]);
        }

        const PowerAllocation closed = allocate_single_cell(pr);
        const PowerAllocation grid = brute_force_oracle(pr, kGrid);
        if (closed.feasible != grid.feasible) {
            // Excused when the closed-form verdict itself flips within one grid
            // step of budget.
            AllocationProblem lo = pr, hi = pr;
            lo.budget = budget * (1.0 - 1.0 / static_cast<double>(kGrid));
            hi.budget = budget * (1.0 + 1.0 / static_cast<double>(kGrid));
            if (allocate_single_cell(lo).feasible != allocate_single_cell(hi).feasible)
                ++boundary_excused;
            else
                ++verdict_mismatch;
            continue;
        }
        if (!closed.feasible) continue;
        ++both_feasible;
        const double a = cluster_sum_rate(pr, closed), b = cluster_sum_rate(pr, grid);
        const double rel = std::abs(a - b) / b;
        worst = std::max(worst, rel);
        if (rel > kRelTol) ++rate_mismatch;
    }
    const double secs = seconds_since(t0);
    const bool pass = rate_mismatch == 0 && verdict_mismatch == 0 && secs < 120.0;
    report(1, pass,
           "oracle equivalence: 1000 problems (n=2,3; gamma log-uniform [1e-5,1e-2]/mW; p_tol in {0,100}; grid 1000), " +
               std::to_string(both_feasible) + " both feasible, worst sum-rate gap " + fmt("%.3e", worst) +
               " (tol 1e-3), rate mismatches " + std::to_string(rate_mismatch) + ", verdict mismatches " +
               std::to_string(verdict_mismatch) + " (+" + std::to_string(boundary_excused) +
               " within one grid step), " + fmt("%.1f", secs) + " s (limit 120 s)");
}

// ---------------------------------------------------------------------------

struct PresetRun {
    std::string name;
    SweepResult result;
    std::string csv;
    double seconds = 0.0;
};

PresetRun run_preset(const std::string& name, unsigned workers)
{
    ExperimentConfig cfg = preset(name);
    cfg.workers = workers;
    const auto t0 = Clock::now();
    PresetRun run{name, run_sweep(cfg.to_spec()), "", 0.0};
    run.seconds = seconds_since(t0);
    try {
        run.csv = format_csv(run.result);
    } catch (const IoError&) {
        run.csv.clear();
    }
    return run;
}

void criterion_guarantees(const std::vector<PresetRun>& runs)
{
    std::uint64_t violations = 0, feasible = 0;
    double min_ratio = 1.0;
    for (const auto& run : runs)
        for (const auto& row : run.result.rows) {
            violations += row.guarantee_violations;
            min_ratio = std::min(min_ratio, row.min_guarantee_ratio);
            feasible += static_cast<std::uint64_t>(std::llround((1.0 - row.infeasible_frac) * static_cast<double>(row.trials)));
        }
    report(2, violations == 0 && min_ratio >= 1.0 - 1e-9,
           "guarantee invariant: " + std::to_string(feasible) + " feasible scheme-trials across fig4/fig5/fig6, " +
               std::to_string(violations) + " violations, min rate/guarantee " + fmt("%.12f", min_ratio) +
               " (tol 1 - 1e-9)");
}

void criterion_fig4(const PresetRun& run, double& min_gap)
{
    const auto& r = run.result;
    bool ordered = true;
    std::vector<double> d, noma;
    min_gap = INFINITY;
    std::string detail;
    for (double x : r.sweep_values) {
        const double a = r.row(x, "JT-NOMA").mean_se, b = r.row(x, "JT-OMA").mean_se;
        if (!(a > b)) ordered = false;
        min_gap = std::min(min_gap, (a - b) / b);
        d.push_back(x);
        noma.push_back(a);
        detail += " " + fmt("%.0f", x) + ":" + fmt("%.3f", a) + "/" + fmt("%.3f", b);
    }
    const double rho = spearman(d, noma);
    report(3, ordered && rho < -0.9 && run.seconds < 1200.0,
           "fig4 ordering: JT-NOMA > JT-OMA at every point, Spearman rho " + fmt("%.4f", rho) +
               " (limit < -0.9), 50000 trials/point in " + fmt("%.1f", run.seconds) +
               " s (limit 1200 s); NOMA/OMA SE by distance:" + detail);
}

void criterion_fig5(const PresetRun& run)
{
    const auto& r = run.result;
    bool ordered = true;
    std::string detail;
    for (double x : r.sweep_values) {
        const double jt = r.row(x, "JT-NOMA").mean_se, cs = r.row(x, "CS-NOMA").mean_se, oma = r.row(x, "JT-OMA").mean_se;
        if (!(jt > cs && cs > oma)) ordered = false;
        detail += " " + fmt("%.0f", x) + ":" + fmt("%.3f", jt) + "/" + fmt("%.3f", cs) + "/" + fmt("%.3f", oma);
    }
    report(4, ordered, "fig5 ordering: JT-NOMA > CS-NOMA > JT-OMA at every point; SE by coverage:" + detail);
}

void criterion_fig6(const PresetRun& run, double fig4_min_gap)
{
    const auto& r = run.result;
    bool ordered = true;
    double max_gap = 0.0;
    std::string detail;
    for (double x : r.sweep_values) {
        const double c1 = r.row(x, "JT-NOMA-case1").mean_se, c2 = r.row(x, "JT-NOMA-case2").mean_se;
        if (!(c1 >= c2)) ordered = false;
        max_gap = std::max(max_gap, (c1 - c2) / c2);
        detail += " " + fmt("%.0f", x) + ":" + fmt("%.3f", c1) + "/" + fmt("%.3f", c2);
    }
    report(5, ordered && max_gap < fig4_min_gap,
           "fig6 ordering: case1 >= case2 at every point, max relative gap " + fmt("%.4f", max_gap) +
               " < min fig4 NOMA/OMA gap " + fmt("%.4f", fig4_min_gap) + "; SE by coverage:" + detail);
}

// ---------------------------------------------------------------------------

void criterion_mutants()
{
    const RadioParams radio = preset("fig5").radio.to_params();
    int generated = 0, detected = 0, originals_ok = 0, originals = 0;
    for (std::uint64_t t = 0; generated < 200; ++t) {
        TrialStream s(77, 0, t);
        const int scenario = t % 2 == 0 ? 2 : 3;
        const auto dc = s.uniform() < 0.5 ? DecodeCase::Case1 : DecodeCase::Case2;
        const auto topo = build_scenario(scenario, 150.0 + 100.0 * s.uniform(), dc, ScenarioGeometry{},
                                         radio.tx_power_mw, s);
        const auto gains = draw_realization(topo.cells, topo.users, radio, s);
        const auto clusters = form_jt_clusters(topo, gains, radio.bandwidth_hz);
        const auto& comp = topo.comp_set.comp_users;
        ++originals;
        if (!check_jt_conditions(clusters, comp)) ++originals_ok;

        // Swap the CoMP pair in one cluster: condition 2.
        {
            auto m = clusters;
            auto& order = m[static_cast<std::size_t>(s.uniform() * static_cast<double>(m.size()))].decode_order;
            std::swap(order[0], order[1]);
            const auto v = check_jt_conditions(m, comp);
            ++generated;
            if (v && v->which() == 2) ++detected;
        }
        // Move a non-CoMP user ahead of a CoMP user in cell 0: condition 1.
        {
            auto m = clusters;
            auto& order = m[0].decode_order;
            const std::size_t from = comp.size() + static_cast<std::size_t>(s.uniform() * static_cast<double>(order.size() - comp.size()));
            const std::size_t to = static_cast<std::size_t>(s.uniform() * static_cast<double>(comp.size()));
            const UserId moved = order[from];
            order.erase(order.begin() + static_cast<std::ptrdiff_t>(from));
            order.insert(order.begin() + static_cast<std::ptrdiff_t>(to), moved);
            const auto v = check_jt_conditions(m, comp);
            ++generated;
            if (v && v->which() == 1) ++detected;
        }
    }
    report(6, detected == generated && originals_ok == originals,
           "condition enforcement: " + std::to_string(detected) + "/" + std::to_string(generated) +
               " mutants rejected with the right code (required 100%), " + std::to_string(originals_ok) + "/" +
               std::to_string(originals) + " builder outputs accepted");
}

void criterion_determinism(const std::vector<PresetRun>& serial)
{
    bool same = true;
    std::string detail;
    for (const auto& base : serial) {
        for (unsigned w : {4u, 16u}) {
            const auto other = run_preset(base.name, w);
            const bool eq = !base.csv.empty() && other.csv == base.csv;
            same = same && eq;
            detail += " " + base.name + "@" + std::to_string(w) + (eq ? "=" : "!=");
        }
    }
    report(7, same, "determinism: byte-identical CSV at 1, 4 and 16 workers for every preset;" + detail);
}

void criterion_hygiene(const std::vector<PresetRun>& runs)
{
    // Bit-exact single-cell reduction of the joint rate.
    TrialStream s(99, 0, 0);
    int mismatches = 0;
    for (int i = 0; i < 10'000; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(i % 4);
        ChannelRealization g(1, n);
        NomaCluster cl;
        cl.cell = CellId{0};
        cl.band = Band{0, 8.64e6, 1.0};
        PowerAllocation a;
        for (std::uint32_t k = 0; k < n; ++k) {
            cl.decode_order.push_back(UserId{k});
            g.set(CellId{0}, UserId{k}, std::pow(10.0, -6.0 + 5.0 * s.uniform()));
            a.powers[UserId{k}] = 2e4 * s.uniform();
        }
        const std::vector<NomaCluster> one{cl};
        const std::vector<PowerAllocation> one_alloc{a};
        for (UserId u : cl.decode_order)
            if (comp_user_rate_jt(one, one_alloc, g, u) != user_rate_single_cell(cl, a, g, u)) ++mismatches;
    }

    // Zero fading gives exactly zero rate on every rate path.
    ChannelRealization z(2, 2);
    for (CellId c : {CellId{0}, CellId{1}}) {
        z.set(c, UserId{0}, 0.0);
        z.set(c, UserId{1}, 0.0);
    }
    NomaCluster c0, c1;
    c0.cell = CellId{0};
    c1.cell = CellId{1};
    c0.decode_order = c1.decode_order = {UserId{0}, UserId{1}};
    PowerAllocation a;
    a.powers = {{UserId{0}, 10.0}, {UserId{1}, 5.0}};
    const std::vector<NomaCluster> both{c0, c1};
    const std::vector<PowerAllocation> allocs{a, a};
    const std::vector<InterferingCell> other{{CellId{1}, 5.0}};
    const bool zero = user_rate_single_cell(c0, a, z, UserId{0}) == 0.0 &&
                      user_rate_single_cell(c0, a, z, UserId{1}) == 0.0 &&
                      comp_user_rate_jt(both, allocs, z, UserId{0}) == 0.0 &&
                      noncomp_user_rate(c0, a, z, UserId{1}, InterferenceMode::Full, other) == 0.0;

    std::uint64_t non_finite = 0;
    bool csv_ok = true;
    for (const auto& run : runs) {
        csv_ok = csv_ok && !run.csv.empty();
        for (const auto& row : run.result.rows) non_finite += row.non_finite;
    }
    report(8, mismatches == 0 && zero && non_finite == 0 && csv_ok,
           "numerical hygiene: " + std::to_string(mismatches) + " bitwise mismatches of JT vs single-cell rate in " +
               "10000 clusters, zero-gain rates exactly 0: " + (zero ? "yes" : "no") + ", non-finite trial values " +
               std::to_string(non_finite) + ", CSV written for every preset: " + (csv_ok ? "yes" : "no"));
}

}  // namespace

int main()
{
    try {
        criterion_oracle();

        std::vector<PresetRun> runs;
        for (const char* name : {"fig4", "fig5", "fig6"}) runs.push_back(run_preset(name, 1));
        for (const auto& run : runs) {
            std::printf("--- %s (%.1f s)\n%s", run.name.c_str(), run.seconds, summary_report(run.result).c_str());
        }

        criterion_guarantees(runs);
        double fig4_min_gap = 0.0;
        criterion_fig4(runs[0], fig4_min_gap);
        criterion_fig5(runs[1]);
        criterion_fig6(runs[2], fig4_min_gap);
        criterion_mutants();
        criterion_determinism(runs);
        criterion_hygiene(runs);
    } catch (const std::exception& e) {
        std::printf("[FAIL] acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
