#include <compnoma/harness.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace compnoma {

namespace {

struct Variant {
    Scheme scheme;
    DecodeCase decode_case;
    std::string label;
};

std::vector<Variant> variants_of(const SweepSpec& spec)
{
    std::vector<Variant> out;
    for (Scheme s : spec.schemes) {
        if (spec.scenario_id == 3 && s == Scheme::JtNoma) {
            for (DecodeCase c : spec.decode_cases)
                out.push_back({s, c, to_string(s) + "-case" + std::to_string(static_cast<int>(c))});
        } else {
            out.push_back({s, spec.decode_cases.front(), to_string(s)});
        }
    }
    return out;
}

struct TrialRecord {
    double se = 0.0;
    double oma_se = 0.0;
    bool feasible = true;
    bool violation = false;
    double ratio = 1.0;
};

}  // namespace

const SweepRow& SweepResult::row(double sweep_m, const std::string& scheme) const
{
    for (const auto& r : rows)
        if (r.sweep_m == sweep_m && r.scheme == scheme) return r;
    throw LookupError("no row for " + scheme + " at " + std::to_string(sweep_m));
}

double compensated_sum(const std::vector<double>& values)
{
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

SweepResult run_sweep(const SweepSpec& spec)
{
    if (spec.trials < 1) throw ValidationError("trials", "must be at least 1");
    if (spec.schemes.empty()) throw ValidationError("schemes", "must not be empty");
    if (spec.decode_cases.empty()) throw ValidationError("decode_cases", "must not be empty");
    spec.radio.validate();

    const auto variants = variants_of(spec);
    const std::size_t nv = variants.size();
    const std::size_t n = static_cast<std::size_t>(spec.trials);
    const TrialOptions options{spec.radio, spec.interference, spec.jt_split};

    SweepResult result;
    result.sweep_values = spec.sweep_values;

    for (std::size_t s = 0; s < spec.sweep_values.size(); ++s) {
        const double sweep = spec.sweep_values[s];
        std::vector<std::vector<TrialRecord>> records(nv, std::vector<TrialRecord>(n));

        auto run_one = [&](std::size_t t) {
            // Topology and fading do not depend on the decode case, so one
            // draw per trial serves every variant.
            TrialStream stream(spec.seed, s, t);
            ScenarioTopology base = build_scenario(spec.scenario_id, sweep, spec.decode_cases.front(), spec.geometry,
                                                   spec.radio.tx_power_mw, stream);
            const ChannelRealization gains = draw_realization(base.cells, base.users, spec.radio, stream);
            for (std::size_t v = 0; v < nv; ++v) {
                ScenarioTopology topo = base;
                topo.decode_case = variants[v].decode_case;
                const TrialResult tr = run_trial(topo, gains, variants[v].scheme, options);
                TrialRecord& rec = records[v][t];
                rec.se = tr.scheme_se;
                rec.oma_se = tr.oma_se;
                rec.feasible = tr.feasible;
                if (tr.feasible) {
                    for (const auto& [u, g] : tr.guarantees) {
                        const double rate = tr.scheme_rates.at(u);
                        if (g > 0.0) rec.ratio = std::min(rec.ratio, rate / g);
                        if (rate < g * (1.0 - 1e-9)) rec.violation = true;
                    }
                }
            }
        };

        const unsigned workers = std::max(1u, std::min<unsigned>(spec.workers, static_cast<unsigned>(n)));
        if (workers == 1) {
            for (std::size_t t = 0; t < n; ++t) run_one(t);
        } else {
            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::mutex failure_mutex;
            std::atomic<bool> abort{false};
            constexpr std::size_t chunk = 64;
            auto work = [&] {
                try {
                    while (!abort.load()) {
                        const std::size_t begin = next.fetch_add(chunk);
                        if (begin >= n) break;
                        const std::size_t end = std::min(n, begin + chunk);
                        for (std::size_t t = begin; t < end; ++t) run_one(t);
                    }
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    abort = true;
                }
            };
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& th : pool) th.join();
            if (failure) std::rethrow_exception(failure);
        }

        for (std::size_t v = 0; v < nv; ++v) {
            const auto& recs = records[v];
            SweepRow row;
            row.sweep_m = sweep;
            row.scheme = variants[v].label;
            row.trials = spec.trials;
            std::vector<double> se(n), oma(n);
            std::uint64_t infeasible = 0;
            for (std::size_t t = 0; t < n; ++t) {
                se[t] = recs[t].se;
                oma[t] = recs[t].oma_se;
                if (!recs[t].feasible) ++infeasible;
                if (recs[t].violation) ++row.guarantee_violations;
                row.min_guarantee_ratio = std::min(row.min_guarantee_ratio, recs[t].ratio);
                if (!std::isfinite(se[t]) || !std::isfinite(oma[t])) ++row.non_finite;
            }
            const double count = static_cast<double>(n);
            row.mean_se = compensated_sum(se) / count;
            row.mean_oma_se = compensated_sum(oma) / count;
            row.infeasible_frac = static_cast<double>(infeasible) / count;
            if (n >= 2) {
                std::vector<double> sq(n);
                for (std::size_t t = 0; t < n; ++t) sq[t] = (se[t] - row.mean_se) * (se[t] - row.mean_se);
                const double var = compensated_sum(sq) / (count - 1.0);
                row.ci95 = 1.96 * std::sqrt(var / count);
            }
            if (spec.keep_trial_se) row.trial_se = std::move(se);
            result.rows.push_back(std::move(row));
        }
    }

    std::stable_sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.sweep_m != b.sweep_m) return a.sweep_m < b.sweep_m;
        return a.scheme < b.scheme;
    });
    return result;
}

}  // namespace compnoma
