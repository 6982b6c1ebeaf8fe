#include <compnoma/power_allocation.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace compnoma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lookup_or(const std::map<UserId, double>& m, UserId u, double fallback)
{
    auto it = m.find(u);
    return it == m.end() ? fallback : it->second;
}

double lookup(const std::map<UserId, double>& m, UserId u, const char* what)
{
    auto it = m.find(u);
    if (it == m.end()) throw LookupError(std::string("no ") + what + " for " + to_string(u));
    return it->second;
}

// Noise-plus-interference over gain; infinite for a zero-gain receiver.
double noise_over_gain(double noise, double gamma) { return gamma > 0.0 ? noise / gamma : kInf; }

double sic_offset(double p_tol, double gamma)
{
    if (p_tol == 0.0) return 0.0;
    return gamma > 0.0 ? p_tol / gamma : kInf;
}

void mark_infeasible(PowerAllocation& out, AllocationStatus status, std::size_t position, std::string why)
{
    out.feasible = false;
    out.status = status;
    out.binding_position = position;
    out.diagnostics.push_back(std::move(why));
}

}  // namespace

std::string to_string(JtSplit s) { return s == JtSplit::EqualReceived ? "equal_received" : "proportional_power"; }

double sinr_target(double rate, double width_hz) { return std::exp2(rate / width_hz) - 1.0; }

void AllocationProblem::validate() const
{
    cluster.validate();
    if (!(budget > 0.0) || !std::isfinite(budget)) throw DomainError("allocation budget must be positive");
    if (!(p_tol >= 0.0)) throw DomainError("p_tol must be non-negative");
    for (UserId u : cluster.decode_order) {
        const double g = lookup(gains, u, "gain");
        if (!(g >= 0.0)) throw DomainError("gains must be non-negative");
    }
}

PowerAllocation allocate_single_cell(const AllocationProblem& problem)
{
    problem.validate();
    const auto& order = problem.cluster.decode_order;
    const std::size_t n = order.size();
    const double width = problem.band_width();

    PowerAllocation out;
    out.feasible = true;
    for (UserId u : order) out.powers[u] = 0.0;

    double remaining = problem.budget;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const UserId user = order[k];
        double worst_noise = 0.0;
        double min_gamma = kInf;
        for (std::size_t j = k; j < n; ++j) {
            const double gamma = problem.gains.at(order[j]);
            const double noise = 1.0 + lookup_or(problem.interference, order[j], 0.0);
            worst_noise = std::max(worst_noise, noise_over_gain(noise, gamma));
            min_gamma = std::min(min_gamma, gamma);
        }
        const double t = sinr_target(problem.cluster.rate_guarantees.at(user), width);
        const double p_rate = t > 0.0 ? t * (remaining + worst_noise) / (1.0 + t) : 0.0;
        const double p_sic = 0.5 * (remaining + sic_offset(problem.p_tol, min_gamma));
        const double p = std::max(p_rate, p_sic);
        if (!(p <= remaining)) {
            out.powers[user] = remaining;
            mark_infeasible(out, AllocationStatus::InfeasibleGuarantee, k,
                            "position " + std::to_string(k) + " (" + to_string(user) + ") needs " +
                                (p_rate >= p_sic ? "rate" : "sic") + " power beyond the remaining budget");
            return out;
        }
        out.powers[user] = p;
        remaining -= p;
    }

    const UserId head = order.back();
    out.powers[head] = remaining;
    if (auto it = problem.cluster.rate_guarantees.find(head); it != problem.cluster.rate_guarantees.end()) {
        const double noise = 1.0 + lookup_or(problem.interference, head, 0.0);
        const double rate = width * std::log2(1.0 + remaining * problem.gains.at(head) / noise);
        if (rate < it->second * (1.0 - 1e-12))
            mark_infeasible(out, AllocationStatus::HeadGuaranteeMissed, n - 1, "cluster-head misses its guarantee");
    }
    return out;
}

double cluster_sum_rate(const AllocationProblem& problem, const PowerAllocation& alloc)
{
    const auto& order = problem.cluster.decode_order;
    double sum = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const double gamma = problem.gains.at(order[k]);
        const double noise = 1.0 + lookup_or(problem.interference, order[k], 0.0);
        const double after = power_after(problem.cluster, alloc, k);
        sum += problem.band_width() * std::log2(1.0 + alloc.power(order[k]) * gamma / (after * gamma + noise));
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Joint transmission

namespace {

struct JtSweep {
    std::vector<std::map<UserId, double>> powers;
    bool feasible = true;
    AllocationStatus status = AllocationStatus::Ok;
    std::optional<std::size_t> binding_position;
    std::string diagnostic;
};

class JtSolver {
public:
    JtSolver(std::span<const AllocationProblem> problems, std::span<const UserId> comp_users, const JtOptions& options)
        : problems_(problems), options_(options)
    {
        if (problems_.empty()) throw DomainError("allocate_jt: no problems");
        for (const auto& p : problems_) p.validate();
        width_ = problems_.front().band_width();

        // Joint order is taken from the first cluster; every other cluster must
        // open with the same CoMP users in the same order.
        const std::set<UserId> comp(comp_users.begin(), comp_users.end());
        for (UserId u : problems_.front().cluster.decode_order)
            if (comp.contains(u)) order_.push_back(u);
        if (order_.size() != comp.size())
            throw ConditionViolation(0, problems_.front().cluster.cell, {comp_users.begin(), comp_users.end()},
                                     "every CoMP user must be in every joint cluster");
        for (const auto& p : problems_) {
            const auto& dec = p.cluster.decode_order;
            if (p.band_width() != width_) throw DomainError("allocate_jt: clusters must share one band");
            for (std::size_t i = 0; i < order_.size(); ++i) {
                if (i >= dec.size() || !p.cluster.contains(order_[i]))
                    throw ConditionViolation(0, p.cluster.cell, {order_[i]}, "CoMP user missing from a joint cluster");
                if (!comp.contains(dec[i]))
                    throw ConditionViolation(1, p.cluster.cell, {dec[i]}, "non-CoMP user decoded before a CoMP user");
                if (dec[i] != order_[i])
                    throw ConditionViolation(2, p.cluster.cell, {dec[i], order_[i]},
                                             "CoMP decoding order differs between clusters");
            }
        }
    }

    std::vector<PowerAllocation> solve()
    {
        const std::size_t cells = problems_.size();
        JtSweep state;
        state.powers.assign(cells, {});
        for (std::size_t c = 0; c < cells; ++c)
            for (UserId u : problems_[c].cluster.decode_order) state.powers[c][u] = 0.0;

        int changed_sweeps = 0;
        bool converged = false;
        for (int it = 0; it < options_.max_iterations; ++it) {
            JtSweep next = sweep(state);
            if (!next.feasible) return finish(next, changed_sweeps + 1);
            const double change = max_relative_change(state, next);
            state = std::move(next);
            if (change < options_.tolerance) {
                converged = true;
                break;
            }
            ++changed_sweeps;
            // Without cross-cell coupling a sweep ignores its input, so the
            // first sweep is already the fixed point.
            if (options_.cross == nullptr) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            state.feasible = false;
            state.status = AllocationStatus::NonConvergence;
            state.diagnostic = "no fixed point within " + std::to_string(options_.max_iterations) + " sweeps";
        }
        for (std::size_t c = 0; c < cells && state.feasible; ++c) {
            double total = 0.0;
            for (const auto& [u, p] : state.powers[c]) total += p;
            if (total > problems_[c].budget * (1.0 + 1e-12)) {
                state.feasible = false;
                state.status = AllocationStatus::BudgetBreach;
                state.diagnostic = "cell budget exceeded in " + to_string(problems_[c].cluster.cell);
            }
        }
        return finish(state, changed_sweeps);
    }

private:
    double link_gain(std::size_t c, UserId u) const
    {
        const auto& p = problems_[c];
        return p.link_gains.empty() ? p.gains.at(u) : lookup(p.link_gains, u, "link gain");
    }

    double guarantee(UserId u) const
    {
        double g = -1.0;
        for (const auto& p : problems_)
            if (auto it = p.cluster.rate_guarantees.find(u); it != p.cluster.rate_guarantees.end())
                g = std::max(g, it->second);
        if (g < 0.0) throw DomainError("CoMP user " + to_string(u) + " has no rate guarantee");
        return g;
    }

    JtSweep sweep(const JtSweep& prev) const
    {
        const std::size_t cells = problems_.size();
        const std::size_t m = order_.size();
        JtSweep out;
        out.powers.assign(cells, {});
        std::vector<double> remaining(cells);
        for (std::size_t c = 0; c < cells; ++c) remaining[c] = problems_[c].budget;

        auto fail = [&](AllocationStatus s, std::size_t pos, std::string why) {
            out.feasible = false;
            out.status = s;
            out.binding_position = pos;
            out.diagnostic = std::move(why);
            return out;
        };

        for (std::size_t k = 0; k < m; ++k) {
            const UserId u = order_[k];
            std::vector<std::size_t> head_cells, shared_cells;
            for (std::size_t c = 0; c < cells; ++c)
                (problems_[c].cluster.head() == u ? head_cells : shared_cells).push_back(c);

            std::vector<double> share(cells, 0.0);
            double head_rx = 0.0;
            for (std::size_t c : head_cells) {
                share[c] = remaining[c];
                head_rx += link_gain(c, u) * remaining[c];
            }

            if (!shared_cells.empty()) {
                const double t = sinr_target(guarantee(u), width_);
                const double noise = 1.0 + lookup_or(problems_.front().interference, u, 0.0);
                double reach = 0.0;  // received power if every shared cell spent all it has left
                std::vector<std::size_t> contributing;
                for (std::size_t c : shared_cells) {
                    reach += link_gain(c, u) * remaining[c];
                    if (link_gain(c, u) > 0.0) contributing.push_back(c);
                }
                // SINR = (X + head_rx) / (reach - X + noise) = t
                const double needed = std::max(0.0, (t * (reach + noise) - head_rx) / (1.0 + t));
                if (needed > 0.0 && contributing.empty())
                    return fail(AllocationStatus::InfeasibleGuarantee, k, to_string(u) + " unreachable from every cell");
                if (options_.split == JtSplit::EqualReceived) {
                    for (std::size_t c : contributing)
                        share[c] = needed / (static_cast<double>(contributing.size()) * link_gain(c, u));
                } else if (reach > 0.0) {
                    for (std::size_t c : contributing) share[c] = needed / reach * remaining[c];
                }

                // Per-cell floors: SIC gap and decodability at this cell's
                // single-cell receivers.
                for (std::size_t c : shared_cells) {
                    const auto& pr = problems_[c];
                    const auto& dec = pr.cluster.decode_order;
                    double min_gamma = kInf;
                    double floor = 0.0;
                    for (std::size_t j = k; j < dec.size(); ++j) {
                        const double g = pr.gains.at(dec[j]);
                        min_gamma = std::min(min_gamma, g);
                        if (j >= m && t > 0.0) {
                            const double e = 1.0 + lookup_or(pr.interference, dec[j], 0.0);
                            floor = std::max(floor, t * (remaining[c] + noise_over_gain(e, g)) / (1.0 + t));
                        }
                    }
                    floor = std::max(floor, 0.5 * (remaining[c] + sic_offset(pr.p_tol, min_gamma)));
                    share[c] = std::max(share[c], floor);
                }

                // Later CoMP receivers combine all cells; scale this user's
                // pattern up until each of them can decode it at rate t.
                double scale = 1.0;
                for (std::size_t v = k + 1; v < m && t > 0.0; ++v) {
                    double rx = 0.0, avail = 0.0;
                    for (std::size_t c : shared_cells) {
                        rx += share[c] * link_gain(c, order_[v]);
                        avail += remaining[c] * link_gain(c, order_[v]);
                    }
                    const double noise_v = 1.0 + lookup_or(problems_.front().interference, order_[v], 0.0);
                    if (rx <= 0.0) return fail(AllocationStatus::InfeasibleGuarantee, k,
                                               to_string(order_[v]) + " cannot decode " + to_string(u));
                    scale = std::max(scale, t * (avail + noise_v) / ((1.0 + t) * rx));
                }
                for (std::size_t c : shared_cells) share[c] *= scale;
            }

            for (std::size_t c = 0; c < cells; ++c) {
                if (!(share[c] <= remaining[c]))
                    return fail(AllocationStatus::InfeasibleGuarantee, k,
                                to_string(u) + " needs more than the remaining power of " +
                                    to_string(problems_[c].cluster.cell));
                out.powers[c][u] = share[c];
                remaining[c] -= share[c];
            }
        }

        // Non-CoMP tail of each cluster, CoMP powers pinned.
        for (std::size_t c = 0; c < cells; ++c) {
            const auto& pr = problems_[c];
            const auto& dec = pr.cluster.decode_order;
            if (dec.size() == m) continue;

            AllocationProblem sub;
            sub.cluster.cell = pr.cluster.cell;
            sub.cluster.band = pr.cluster.band;
            sub.cluster.decode_order.assign(dec.begin() + static_cast<std::ptrdiff_t>(m), dec.end());
            for (UserId u : sub.cluster.decode_order) {
                if (auto it = pr.cluster.rate_guarantees.find(u); it != pr.cluster.rate_guarantees.end())
                    sub.cluster.rate_guarantees[u] = it->second;
                sub.gains[u] = pr.gains.at(u);
                sub.interference[u] = lookup_or(pr.interference, u, 0.0) + cross_interference(prev, c, u);
            }
            sub.budget = remaining[c];
            sub.p_tol = pr.p_tol;
            if (!(sub.budget > 0.0))
                return fail(AllocationStatus::InfeasibleGuarantee, m,
                            "no power left for the non-CoMP users of " + to_string(pr.cluster.cell));
            PowerAllocation tail = allocate_single_cell(sub);
            for (const auto& [u, p] : tail.powers) out.powers[c][u] = p;
            if (!tail.feasible)
                return fail(tail.status, m + tail.binding_position.value_or(0),
                            tail.diagnostics.empty() ? "non-CoMP allocation infeasible" : tail.diagnostics.back());
        }
        return out;
    }

    // In-band interference a non-CoMP user of cell c receives from the other
    // cells' non-CoMP transmissions, taken from the previous sweep.
    double cross_interference(const JtSweep& prev, std::size_t c, UserId u) const
    {
        if (options_.cross == nullptr) return 0.0;
        double sum = 0.0;
        for (std::size_t o = 0; o < problems_.size(); ++o) {
            if (o == c) continue;
            const CellId other = problems_[o].cluster.cell;
            const auto it = options_.cross->gains.find({other, u});
            if (it == options_.cross->gains.end()) throw LookupError("no cross-cell gain " + to_string(other) + "->" + to_string(u));
            double power = 0.0;
            const auto& dec = problems_[o].cluster.decode_order;
            for (std::size_t j = order_.size(); j < dec.size(); ++j) power += prev.powers[o].at(dec[j]);
            sum += power * it->second;
        }
        return sum;
    }

    double max_relative_change(const JtSweep& a, const JtSweep& b) const
    {
        double worst = 0.0;
        for (std::size_t c = 0; c < a.powers.size(); ++c) {
            const double floor = problems_[c].budget * 1e-15;
            for (const auto& [u, pa] : a.powers[c]) {
                const double pb = b.powers[c].at(u);
                const double scale = std::max({std::abs(pa), std::abs(pb), floor});
                worst = std::max(worst, std::abs(pa - pb) / scale);
            }
        }
        return worst;
    }

    std::vector<PowerAllocation> finish(const JtSweep& s, int iterations) const
    {
        std::vector<PowerAllocation> out(problems_.size());
        for (std::size_t c = 0; c < problems_.size(); ++c) {
            auto& a = out[c];
            for (UserId u : problems_[c].cluster.decode_order) a.powers[u] = 0.0;
            for (const auto& [u, p] : s.powers[c]) a.powers[u] = p;
            a.feasible = s.feasible;
            a.status = s.status;
            a.binding_position = s.binding_position;
            a.iterations = iterations;
            if (!s.diagnostic.empty()) a.diagnostics.push_back(s.diagnostic);
        }
        return out;
    }

    std::span<const AllocationProblem> problems_;
    JtOptions options_;
    double width_ = 0.0;
    std::vector<UserId> order_;
};

}  // namespace

std::vector<PowerAllocation> allocate_jt(std::span<const AllocationProblem> problems,
                                         std::span<const UserId> comp_users, const JtOptions& options)
{
    if (comp_users.empty()) {
        std::vector<PowerAllocation> out;
        for (const auto& p : problems) out.push_back(allocate_single_cell(p));
        return out;
    }
    return JtSolver(problems, comp_users, options).solve();
}

// ---------------------------------------------------------------------------
// Grid-search oracle

namespace {

struct OracleInstance {
    std::size_t n = 0;
    std::array<double, 3> gamma{};
    std::array<double, 3> noise{};
    std::array<double, 3> target{};  // SINR targets; negative = none
    double p_tol = 0.0;
    double width = 0.0;

    // Returns the sum rate, or a negative value if the point is infeasible.
    double evaluate(const std::array<double, 3>& p) const
    {
        std::array<double, 3> after{};
        for (std::size_t k = n; k-- > 1;) after[k - 1] = after[k] + p[k];
        double product = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (target[k] >= 0.0) {
                // every receiver of signal k must decode it at the guaranteed rate
                for (std::size_t j = k; j < n; ++j) {
                    const double sinr = p[k] * gamma[j] / (after[k] * gamma[j] + noise[j]);
                    if (sinr < target[k] * (1.0 - 1e-12)) return -1.0;
                }
            }
            if (k + 1 < n) {
                const double gap = p[k] - after[k];
                for (std::size_t j = k; j < n; ++j)
                    if (gap * gamma[j] < p_tol - 1e-9 * std::max(p_tol, p[k] * gamma[j])) return -1.0;
            }
            product *= 1.0 + p[k] * gamma[k] / (after[k] * gamma[k] + noise[k]);
        }
        return width * std::log2(product);
    }
};

}  // namespace

PowerAllocation brute_force_oracle(const AllocationProblem& problem, std::size_t grid_points)
{
    problem.validate();
    const auto& order = problem.cluster.decode_order;
    if (order.size() > 3) throw DomainError("brute_force_oracle supports at most three users");
    if (grid_points < 1000) throw DomainError("brute_force_oracle needs at least 1000 grid points per dimension");

    OracleInstance inst;
    inst.n = order.size();
    inst.p_tol = problem.p_tol;
    inst.width = problem.band_width();
    for (std::size_t k = 0; k < inst.n; ++k) {
        inst.gamma[k] = problem.gains.at(order[k]);
        inst.noise[k] = 1.0 + lookup_or(problem.interference, order[k], 0.0);
        auto it = problem.cluster.rate_guarantees.find(order[k]);
        inst.target[k] = it == problem.cluster.rate_guarantees.end() ? -1.0 : sinr_target(it->second, inst.width);
    }

    const double budget = problem.budget;
    const double step = budget / static_cast<double>(grid_points);
    double best = -1.0;
    std::array<double, 3> best_p{};

    auto consider = [&](const std::array<double, 3>& p) {
        const double v = inst.evaluate(p);
        if (v > best) {
            best = v;
            best_p = p;
        }
    };

    // Sum rate is maximized on the full-budget face: scaling every power by
    // budget/sum raises every SINR and every SIC gap. Search that face only.
    if (inst.n == 1) {
        consider({budget, 0.0, 0.0});
    } else if (inst.n == 2) {
        for (std::size_t i = 0; i <= grid_points; ++i) {
            const double p1 = step * static_cast<double>(i);
            consider({p1, std::max(0.0, budget - p1), 0.0});
        }
        if (best >= 0.0) {
            const double lo = std::max(0.0, best_p[0] - step), hi = std::min(budget, best_p[0] + step);
            constexpr std::size_t fine = 2000;
            for (std::size_t i = 0; i <= fine; ++i) {
                const double p1 = lo + (hi - lo) * static_cast<double>(i) / fine;
                consider({p1, std::max(0.0, budget - p1), 0.0});
            }
        }
    } else {
        for (std::size_t i = 0; i <= grid_points; ++i) {
            const double p1 = step * static_cast<double>(i);
            for (std::size_t j = 0; i + j <= grid_points; ++j) {
                const double p2 = step * static_cast<double>(j);
                consider({p1, p2, std::max(0.0, budget - p1 - p2)});
            }
        }
        if (best >= 0.0) {
            const double lo1 = std::max(0.0, best_p[0] - step), hi1 = std::min(budget, best_p[0] + step);
            const double lo2 = std::max(0.0, best_p[1] - step), hi2 = std::min(budget, best_p[1] + step);
            constexpr std::size_t fine = 200;
            for (std::size_t i = 0; i <= fine; ++i) {
                const double p1 = lo1 + (hi1 - lo1) * static_cast<double>(i) / fine;
                for (std::size_t j = 0; j <= fine; ++j) {
                    const double p2 = lo2 + (hi2 - lo2) * static_cast<double>(j) / fine;
                    if (p1 + p2 > budget) continue;
                    consider({p1, p2, budget - p1 - p2});
                }
            }
        }
    }

    PowerAllocation out;
    for (std::size_t k = 0; k < inst.n; ++k) out.powers[order[k]] = best >= 0.0 ? best_p[k] : 0.0;
    out.feasible = best >= 0.0;
    out.status = out.feasible ? AllocationStatus::Ok : AllocationStatus::InfeasibleGuarantee;
    if (!out.feasible) out.diagnostics.push_back("no feasible grid point");
    return out;
}

}  // namespace compnoma
