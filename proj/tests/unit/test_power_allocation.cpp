#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <compnoma/power_allocation.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace compnoma;

namespace {

const CellId c0{0}, c1{1};
const UserId u0{0}, u1{1}, u2{2}, u3{3};

AllocationProblem problem(std::vector<UserId> order, std::map<UserId, double> gains,
                          std::map<UserId, double> guarantees, double budget, double p_tol, double width = 1.0)
{
    AllocationProblem p;
    p.cluster.cell = c0;
    p.cluster.band = Band{0, width, 1.0};
    p.cluster.decode_order = std::move(order);
    p.cluster.rate_guarantees = std::move(guarantees);
    p.gains = std::move(gains);
    p.budget = budget;
    p.p_tol = p_tol;
    return p;
}

// Smallest p1 with log2(1 + p1 g / ((B - p1) g + 1)) >= r, by bisection.
double bisect_first_power(double budget, double g, double r)
{
    double lo = 0.0, hi = budget;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::log2(1.0 + mid * g / ((budget - mid) * g + 1.0)) >= r ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

TEST_CASE("two-user forward solve")
{
    const auto p = problem({u0, u1}, {{u0, 1.0}, {u1, 10.0}}, {{u0, 0.5}}, 1.0, 0.0);
    const auto a = allocate_single_cell(p);
    REQUIRE(a.feasible);
    CHECK(a.status == AllocationStatus::Ok);
    CHECK(sinr_target(0.5, 1.0) == doctest::Approx(0.41421356).epsilon(1e-8));
    CHECK(a.power(u0) == doctest::Approx(0.58578644).epsilon(1e-8));
    CHECK(a.power(u0) == doctest::Approx(bisect_first_power(1.0, 1.0, 0.5)).epsilon(1e-12));
    CHECK(a.power(u1) == doctest::Approx(0.41421356).epsilon(1e-8));
    CHECK(a.total() == doctest::Approx(1.0).epsilon(1e-15));
    // Exact head rate is log2(1 + 10 (sqrt2 - 1)) = 2.3623677...
    CHECK(std::log2(1.0 + a.power(u1) * 10.0) == doctest::Approx(2.3623677).epsilon(1e-7));
    CHECK(cluster_sum_rate(p, a) == doctest::Approx(0.5 + std::log2(1.0 + a.power(u1) * 10.0)).epsilon(1e-12));
}

TEST_CASE("guarantee beyond the budget is infeasible and names the position")
{
    const auto a = allocate_single_cell(problem({u0, u1}, {{u0, 1.0}, {u1, 10.0}}, {{u0, 1.1}}, 1.0, 0.0));
    CHECK_FALSE(a.feasible);
    CHECK(a.status == AllocationStatus::InfeasibleGuarantee);
    REQUIRE(a.binding_position.has_value());
    CHECK(*a.binding_position == 0);
    CHECK_FALSE(a.diagnostics.empty());

    // R = 1 bit/s is the boundary: the first user takes everything.
    const auto edge = allocate_single_cell(problem({u0, u1}, {{u0, 1.0}, {u1, 10.0}}, {{u0, 1.0}}, 1.0, 0.0));
    CHECK(edge.feasible);
    CHECK(edge.power(u1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("SIC gap can bind before the rate does")
{
    // Zero guarantee: the gap alone sets p0 = (B + p_tol/g_min)/2.
    const auto a = allocate_single_cell(problem({u0, u1}, {{u0, 2.0}, {u1, 4.0}}, {{u0, 0.0}}, 10.0, 4.0));
    REQUIRE(a.feasible);
    CHECK(a.power(u0) == doctest::Approx(6.0).epsilon(1e-14));
    const auto p = problem({u0, u1}, {{u0, 2.0}, {u1, 4.0}}, {{u0, 0.0}}, 10.0, 4.0);
    CHECK(sic_feasible(p.cluster, a, p.gains, 4.0));
}

TEST_CASE("head guarantee is checked")
{
    const auto a = allocate_single_cell(problem({u0, u1}, {{u0, 1.0}, {u1, 1.0}}, {{u0, 0.5}, {u1, 5.0}}, 1.0, 0.0));
    CHECK_FALSE(a.feasible);
    CHECK(a.status == AllocationStatus::HeadGuaranteeMissed);
    CHECK(*a.binding_position == 1);
}

TEST_CASE("forward solve meets every guarantee and spends the whole budget")
{
    TrialStream s(21, 0, 0);
    int feasible = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 2 + trial % 3;
        std::vector<double> g(n);
        for (auto& x : g) x = std::pow(10.0, -1.0 + 4.0 * s.uniform());
        std::sort(g.begin(), g.end());
        std::vector<UserId> order;
        std::map<UserId, double> gains, guarantees;
        for (std::uint32_t k = 0; k < n; ++k) {
            order.push_back(UserId{k});
            gains[UserId{k}] = g[k];
            if (k + 1 < n) guarantees[UserId{k}] = 2.0 * s.uniform();
        }
        const double p_tol = s.uniform() < 0.5 ? 0.0 : s.uniform();
        const auto p = problem(order, gains, guarantees, 100.0, p_tol);
        const auto a = allocate_single_cell(p);
        if (!a.feasible) continue;
        ++feasible;
        CHECK(a.total() == doctest::Approx(100.0).epsilon(1e-12));
        CHECK(sic_feasible(p.cluster, a, gains, p_tol));
        for (std::size_t k = 0; k + 1 < n; ++k) {
            for (std::size_t j = k; j < n; ++j) {
                const double after = power_after(p.cluster, a, k);
                const double rate = std::log2(1.0 + a.power(order[k]) * g[j] / (after * g[j] + 1.0));
                CHECK(rate >= guarantees[order[k]] * (1.0 - 1e-9));
            }
        }
    }
    CHECK(feasible > 500);
}

TEST_CASE("forward solve agrees with the grid oracle on small problems")
{
    TrialStream s(22, 0, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + trial % 2;
        std::vector<double> g(n);
        for (auto& x : g) x = std::pow(10.0, -1.0 + 3.0 * s.uniform());
        std::sort(g.begin(), g.end());
        std::vector<UserId> order;
        std::map<UserId, double> gains, guarantees;
        for (std::uint32_t k = 0; k < n; ++k) {
            order.push_back(UserId{k});
            gains[UserId{k}] = g[k];
            if (k + 1 < n) guarantees[UserId{k}] = 0.3 * s.uniform();
        }
        const auto p = problem(order, gains, guarantees, 10.0, 0.0);
        const auto fwd = allocate_single_cell(p);
        const auto grid = brute_force_oracle(p, 1000);
        REQUIRE(fwd.feasible == grid.feasible);
        if (!fwd.feasible) continue;
        const double a = cluster_sum_rate(p, fwd), b = cluster_sum_rate(p, grid);
        CHECK(a >= b * (1.0 - 1e-3));
        CHECK(std::abs(a - b) <= 1e-3 * b);
    }
}

TEST_CASE("oracle limits")
{
    const auto p = problem({u0, u1, u2, u3}, {{u0, 1.0}, {u1, 1.0}, {u2, 1.0}, {u3, 1.0}},
                           {{u0, 0.1}, {u1, 0.1}, {u2, 0.1}}, 1.0, 0.0);
    CHECK_THROWS_AS(brute_force_oracle(p, 1000), DomainError);
    const auto q = problem({u0, u1}, {{u0, 1.0}, {u1, 1.0}}, {{u0, 0.1}}, 1.0, 0.0);
    CHECK_THROWS_AS(brute_force_oracle(q, 999), DomainError);
    const auto solo = brute_force_oracle(problem({u0}, {{u0, 3.0}}, {}, 1.0, 0.0), 1000);
    CHECK(solo.feasible);
    CHECK(solo.power(u0) == 1.0);
}

TEST_CASE("symmetric joint transmission converges in one sweep with equal shares")
{
    for (JtSplit split : {JtSplit::EqualReceived, JtSplit::ProportionalPower}) {
        CAPTURE(to_string(split));
        std::vector<AllocationProblem> ps;
        for (CellId c : {c0, c1}) {
            auto p = problem({u0, u1}, {{u0, 2.0}, {u1, 2.0}}, {{u0, 1.2}}, 1.0, 0.0);
            p.cluster.cell = c;
            p.link_gains = {{u0, 1.0}, {u1, 1.0}};
            ps.push_back(p);
        }
        const std::vector<UserId> comp{u0, u1};
        JtOptions opt;
        opt.split = split;
        const auto a = allocate_jt(ps, comp, opt);
        REQUIRE(a.size() == 2);
        REQUIRE(a[0].feasible);
        CHECK(a[0].iterations == 1);
        CHECK(a[0].power(u0) == a[1].power(u0));
        CHECK(a[0].power(u1) == a[1].power(u1));
        CHECK(a[0].total() == doctest::Approx(1.0).epsilon(1e-12));

        // Combined SINR of u0 at u0 and at u1 meets the guarantee.
        const double rx = a[0].power(u0) + a[1].power(u0);
        const double after = a[0].power(u1) + a[1].power(u1);
        CHECK(std::log2(1.0 + rx / (after + 1.0)) >= 1.2 * (1.0 - 1e-9));
    }
}

TEST_CASE("splits differ when links are asymmetric")
{
    auto build = [](JtSplit split) {
        std::vector<AllocationProblem> ps;
        const std::map<UserId, double> link0{{u0, 1.0}, {u1, 8.0}}, link1{{u0, 0.25}, {u2, 6.0}};
        auto p = problem({u0, u1}, {{u0, 1.25}, {u1, 8.0}}, {{u0, 1.0}}, 10.0, 0.0);
        p.link_gains = link0;
        ps.push_back(p);
        auto q = problem({u0, u2}, {{u0, 1.25}, {u2, 6.0}}, {{u0, 1.0}}, 10.0, 0.0);
        q.cluster.cell = c1;
        q.link_gains = link1;
        ps.push_back(q);
        const std::vector<UserId> comp{u0};
        JtOptions opt;
        opt.split = split;
        return allocate_jt(ps, comp, opt);
    };
    const auto eq = build(JtSplit::EqualReceived);
    const auto pr = build(JtSplit::ProportionalPower);
    REQUIRE(pr[0].feasible);
    // Equal budgets: proportional split spends the same power in each cell.
    CHECK(pr[0].power(u0) == doctest::Approx(pr[1].power(u0)).epsilon(1e-12));
    if (eq[0].feasible) {
        // Equal received power: the weak link pays four times as much.
        CHECK(eq[1].power(u0) >= eq[0].power(u0));
    }
}

TEST_CASE("joint transmission rejects broken decoding conditions")
{
    std::vector<AllocationProblem> ps;
    ps.push_back(problem({u0, u1}, {{u0, 1.0}, {u1, 4.0}}, {{u0, 0.5}}, 1.0, 0.0));
    auto q = problem({u2, u0}, {{u0, 1.0}, {u2, 4.0}}, {{u2, 0.5}}, 1.0, 0.0);
    q.cluster.cell = c1;
    ps.push_back(q);
    const std::vector<UserId> comp{u0};
    CHECK_THROWS_AS(allocate_jt(ps, comp), ConditionViolation);
}

TEST_CASE("joint transmission with no CoMP users falls back to single-cell solves")
{
    const std::vector<AllocationProblem> ps{problem({u0, u1}, {{u0, 1.0}, {u1, 10.0}}, {{u0, 0.5}}, 1.0, 0.0)};
    const auto a = allocate_jt(ps, std::span<const UserId>{});
    REQUIRE(a.size() == 1);
    CHECK(a[0].powers == allocate_single_cell(ps[0]).powers);
}

TEST_CASE("full interference mode iterates to a fixed point")
{
    std::vector<AllocationProblem> ps;
    auto p = problem({u0, u1}, {{u0, 2.0}, {u1, 50.0}}, {{u0, 0.5}, {u1, 0.5}}, 10.0, 0.0);
    p.link_gains = {{u0, 1.0}, {u1, 50.0}};
    ps.push_back(p);
    auto q = problem({u0, u2}, {{u0, 2.0}, {u2, 40.0}}, {{u0, 0.5}, {u2, 0.5}}, 10.0, 0.0);
    q.cluster.cell = c1;
    q.link_gains = {{u0, 1.0}, {u2, 40.0}};
    ps.push_back(q);
    CrossCellGains cross;
    cross.gains[{c1, u1}] = 0.5;
    cross.gains[{c0, u2}] = 0.4;
    JtOptions opt;
    opt.split = JtSplit::ProportionalPower;
    opt.cross = &cross;
    const std::vector<UserId> comp{u0};
    const auto a = allocate_jt(ps, comp, opt);
    REQUIRE(a[0].feasible);
    CHECK(a[0].iterations >= 1);
    CHECK(a[0].iterations < 100);
    // u1's own power faces the other cell's non-CoMP power as interference.
    const double sinr = a[0].power(u1) * 50.0 / (1.0 + 0.5 * a[1].power(u2));
    CHECK(std::log2(1.0 + sinr) >= 0.5 * (1.0 - 1e-6));

    opt.max_iterations = 1;
    const auto b = allocate_jt(ps, comp, opt);
    CHECK_FALSE(b[0].feasible);
    CHECK(b[0].status == AllocationStatus::NonConvergence);
}
