#include "adinvest/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace adinvest {

namespace {

constexpr double kFeasibilityTol = 1e-9;

struct SiteArrays {
    std::vector<double> p, g, tau;  // tau = expected frame length f + t_freeze
};

std::vector<SiteArrays> site_arrays(const SystemSpec& spec) {
    std::vector<SiteArrays> out;
    out.reserve(spec.sites.size());
    for (const auto& site : spec.sites) {
        SiteArrays sa;
        for (std::size_t i = 0; i < site.actions.size(); ++i) {
            sa.p.push_back(site.actions[i].p);
            sa.g.push_back(site.g[i]);
            sa.tau.push_back(site.f[i] + site.actions[i].t_freeze);
            if (sa.tau.back() <= 0.0) {
                throw DegenerateFrameError(fmt::format(
                    "site {}: action {} has zero expected frame length", site.id, i));
            }
        }
        out.push_back(std::move(sa));
    }
    return out;
}

StationaryPolicy pure_policy(const SystemSpec& spec, const std::vector<int>& choice) {
    StationaryPolicy policy;
    for (std::size_t s = 0; s < spec.sites.size(); ++s) {
        std::vector<double> w(spec.sites[s].actions.size(), 0.0);
        w[choice[s]] = 1.0;
        policy.weights.push_back(std::move(w));
    }
    return policy;
}

// Value of a pure assignment; separable across sites.
PolicyValue pure_value(const std::vector<SiteArrays>& arr, const std::vector<int>& choice) {
    PolicyValue v;
    for (std::size_t s = 0; s < arr.size(); ++s) {
        const int i = choice[s];
        v.profit_rate += arr[s].g[i] / arr[s].tau[i];
        v.expenditure_rate += arr[s].p[i] / arr[s].tau[i];
    }
    return v;
}

int sweep_selection(const SiteArrays& sa, double w) {
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sa.p.size(); ++i) {
        const double val = (sa.g[i] - w * sa.p[i]) / sa.tau[i];
        if (val > best_val) {
            best_val = val;
            best = static_cast<int>(i);
        }
    }
    return best;
}

struct Best {
    double profit = -std::numeric_limits<double>::infinity();
    double expenditure = 0.0;
    StationaryPolicy policy;

    void offer(double profit_rate, double expenditure_rate, StationaryPolicy p) {
        if (profit_rate > profit) {
            profit = profit_rate;
            expenditure = expenditure_rate;
            policy = std::move(p);
        }
    }
};

}  // namespace

PolicyValue evaluate_policy(const StationaryPolicy& policy, const SystemSpec& spec) {
    if (policy.weights.size() != spec.sites.size()) {
        throw ContractViolation("policy does not cover every site");
    }
    PolicyValue v;
    for (std::size_t s = 0; s < spec.sites.size(); ++s) {
        const auto& site = spec.sites[s];
        const auto& w = policy.weights[s];
        if (w.size() != site.actions.size()) {
            throw ContractViolation(
                fmt::format("site {}: weight vector does not match the action list", site.id));
        }
        double sum = 0.0, rev = 0.0, len = 0.0, exp = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w[i] < 0.0) {
                throw ContractViolation(fmt::format("site {}: negative weight", site.id));
            }
            sum += w[i];
            rev += w[i] * site.g[i];
            len += w[i] * (site.f[i] + site.actions[i].t_freeze);
            exp += w[i] * site.actions[i].p;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw ContractViolation(
                fmt::format("site {}: weights sum to {}, expected 1", site.id, sum));
        }
        if (len <= 0.0) {
            throw DegenerateFrameError(
                fmt::format("site {}: policy puts all weight on zero-length frames", site.id));
        }
        v.profit_rate += rev / len;
        v.expenditure_rate += exp / len;
    }
    return v;
}

OracleResult compute_optimal(const SystemSpec& spec, double b_av, const OracleOptions& opt) {
    const auto arr = site_arrays(spec);
    const std::size_t n = arr.size();
    const Bounds bounds = derive_bounds(spec);

    Best best;
    auto offer_pure = [&](const std::vector<int>& choice) {
        const PolicyValue v = pure_value(arr, choice);
        if (v.expenditure_rate <= b_av + kFeasibilityTol) {
            best.offer(v.profit_rate, v.expenditure_rate, pure_policy(spec, choice));
        }
    };

    // Always-feasible fallback: every site on its first zero-investment action.
    {
        std::vector<int> zeros(n, -1);
        bool all = true;
        for (std::size_t s = 0; s < n && all; ++s) {
            for (std::size_t i = 0; i < arr[s].p.size(); ++i) {
                if (arr[s].p[i] == 0.0) {
                    zeros[s] = static_cast<int>(i);
                    break;
                }
            }
            all = zeros[s] >= 0;
        }
        if (all) offer_pure(zeros);
    }

    // (i) Multiplier sweep: per-site pure selections along w, plus one refined
    // pass around the best feasible grid point.
    std::vector<std::vector<int>> sweep_choices;
    double best_sweep_w = -1.0;
    auto sweep_pass = [&](double w_lo, double w_hi) {
        const int points = opt.lambda_grid;
        for (int k = 0; k <= points; ++k) {
            const double w = w_lo + (w_hi - w_lo) * k / points;
            std::vector<int> choice(n);
            for (std::size_t s = 0; s < n; ++s) choice[s] = sweep_selection(arr[s], w);
            const PolicyValue v = pure_value(arr, choice);
            if (v.expenditure_rate <= b_av + kFeasibilityTol && v.profit_rate > best.profit) {
                best_sweep_w = w;
            }
            offer_pure(choice);
            if (sweep_choices.empty() || sweep_choices.back() != choice) {
                sweep_choices.push_back(std::move(choice));
            }
        }
    };
    const double w_max = std::max(bounds.nu, 1e-12);
    sweep_pass(0.0, w_max);
    if (best_sweep_w >= 0.0) {
        const double step = w_max / opt.lambda_grid;
        sweep_pass(std::max(0.0, best_sweep_w - step), std::min(w_max, best_sweep_w + step));
    }

    // (iii) Exhaustive pure enumeration at desk scale.
    {
        double combos = 1.0;
        for (const auto& sa : arr) combos *= static_cast<double>(sa.p.size());
        if (combos <= static_cast<double>(opt.pure_limit)) {
            std::vector<int> choice(n, 0);
            for (;;) {
                offer_pure(choice);
                std::size_t s = 0;
                while (s < n) {
                    if (++choice[s] < static_cast<int>(arr[s].p.size())) break;
                    choice[s] = 0;
                    ++s;
                }
                if (s == n) break;
            }
        }
    }

    // (ii) Exactly one site randomizing over two actions, mixing weight solved
    // so the total expenditure binds the budget, every other site pure.
    auto other_assignments = [&](std::size_t s) {
        std::vector<std::vector<int>> out;
        double combos = 1.0;
        for (std::size_t t = 0; t < n; ++t) {
            if (t != s) combos *= static_cast<double>(arr[t].p.size());
        }
        if (combos <= 100000.0) {
            std::vector<int> choice(n, 0);
            for (;;) {
                out.push_back(choice);
                std::size_t t = 0;
                while (t < n) {
                    if (t == s) {
                        ++t;
                        continue;
                    }
                    if (++choice[t] < static_cast<int>(arr[t].p.size())) break;
                    choice[t] = 0;
                    ++t;
                }
                if (t == n) break;
            }
        } else {
            // Too many pure combinations; reuse the profiles the sweep visited.
            out = sweep_choices;
        }
        return out;
    };

    for (std::size_t s = 0; s < n; ++s) {
        const auto& sa = arr[s];
        for (const auto& others : other_assignments(s)) {
            double rest_exp = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                if (t != s) rest_exp += arr[t].p[others[t]] / arr[t].tau[others[t]];
            }
            const double residual = b_av - rest_exp;
            if (residual < -1e-12) continue;
            for (std::size_t i = 0; i < sa.p.size(); ++i) {
                for (std::size_t j = i + 1; j < sa.p.size(); ++j) {
                    const double denom =
                        (sa.p[i] - sa.p[j]) - residual * (sa.tau[i] - sa.tau[j]);
                    if (std::abs(denom) < 1e-15) continue;
                    double theta = (residual * sa.tau[j] - sa.p[j]) / denom;
                    if (theta < -1e-12 || theta > 1.0 + 1e-12) continue;
                    theta = std::clamp(theta, 0.0, 1.0);

                    StationaryPolicy policy = pure_policy(spec, others);
                    auto& w = policy.weights[s];
                    std::fill(w.begin(), w.end(), 0.0);
                    w[i] = theta;
                    w[j] = 1.0 - theta;
                    const PolicyValue v = evaluate_policy(policy, spec);
                    if (v.expenditure_rate <= b_av + kFeasibilityTol) {
                        best.offer(v.profit_rate, v.expenditure_rate, std::move(policy));
                    }
                }
            }
        }
    }

    if (!std::isfinite(best.profit)) {
        throw ContractViolation("no feasible stationary policy found");
    }
    return {best.profit, best.expenditure, std::move(best.policy)};
}

OracleResult exhaustive_mixture_search(const SystemSpec& spec, double b_av, double weight_step) {
    if (!(weight_step > 0.0 && weight_step < 1.0)) {
        throw ContractViolation("weight_step must lie in (0, 1)");
    }
    const auto arr = site_arrays(spec);
    const std::size_t n = arr.size();

    struct Cand {
        double profit, exp;
        int i, j;       // j < 0 marks a pure candidate
        double theta;
    };
    std::vector<std::vector<Cand>> cands(n);
    double total = 1.0;
    const int steps = static_cast<int>(std::lround(1.0 / weight_step));
    for (std::size_t s = 0; s < n; ++s) {
        const auto& sa = arr[s];
        for (std::size_t i = 0; i < sa.p.size(); ++i) {
            cands[s].push_back({sa.g[i] / sa.tau[i], sa.p[i] / sa.tau[i],
                                static_cast<int>(i), -1, 1.0});
        }
        for (std::size_t i = 0; i < sa.p.size(); ++i) {
            for (std::size_t j = i + 1; j < sa.p.size(); ++j) {
                for (int k = 1; k < steps; ++k) {
                    const double theta = k * weight_step;
                    const double rev = theta * sa.g[i] + (1.0 - theta) * sa.g[j];
                    const double len = theta * sa.tau[i] + (1.0 - theta) * sa.tau[j];
                    const double exp = theta * sa.p[i] + (1.0 - theta) * sa.p[j];
                    cands[s].push_back({rev / len, exp / len, static_cast<int>(i),
                                        static_cast<int>(j), theta});
                }
            }
        }
        total *= static_cast<double>(cands[s].size());
    }
    if (total > 2e8) {
        throw ContractViolation("instance too large for the exhaustive grid cross-check");
    }

    std::vector<std::size_t> pick(n, 0), best_pick;
    double best_profit = -std::numeric_limits<double>::infinity();
    double best_exp = 0.0;

    std::vector<std::size_t> idx(n, 0);
    // Depth-first product with running sums.
    std::vector<double> profit_acc(n + 1, 0.0), exp_acc(n + 1, 0.0);
    std::size_t depth = 0;
    for (;;) {
        if (idx[depth] < cands[depth].size()) {
            profit_acc[depth + 1] = profit_acc[depth] + cands[depth][idx[depth]].profit;
            exp_acc[depth + 1] = exp_acc[depth] + cands[depth][idx[depth]].exp;
            if (depth + 1 == n) {
                if (exp_acc[n] <= b_av + kFeasibilityTol && profit_acc[n] > best_profit) {
                    best_profit = profit_acc[n];
                    best_exp = exp_acc[n];
                    best_pick = idx;
                }
                ++idx[depth];
            } else {
                ++depth;
                idx[depth] = 0;
            }
        } else {
            if (depth == 0) break;
            --depth;
            ++idx[depth];
        }
    }

    if (!std::isfinite(best_profit)) {
        throw ContractViolation("no feasible policy on the grid");
    }
    StationaryPolicy policy;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> w(arr[s].p.size(), 0.0);
        const Cand& c = cands[s][best_pick[s]];
        if (c.j < 0) {
            w[c.i] = 1.0;
        } else {
            w[c.i] = c.theta;
            w[c.j] = 1.0 - c.theta;
        }
        policy.weights.push_back(std::move(w));
    }
    return {best_profit, best_exp, std::move(policy)};
}

bool BoundReport::ok() const {
    return std::all_of(lines.begin(), lines.end(), [](const auto& l) { return l.pass; });
}

BoundReport verify_bounds(double profit_star, const std::vector<VAggregate>& aggregates,
                          const Bounds& bounds,
                          const std::optional<EstimationBoundInput>& est) {
    BoundReport report;
    const int n_sites = static_cast<int>(bounds.per_site.size());
    for (const auto& agg : aggregates) {
        const double stat_tol = 3.0 * agg.profit_stderr + 1e-12;
        if (est) {
            const ErrorBounds eb =
                error_bounds(bounds, agg.v, est->rho_g, est->rho_f, n_sites, bounds.g_max);
            const double floor = eb.revenue_factor * est->profit_star_scaled - eb.theta_slack -
                                 eb.additive_penalty - stat_tol;
            report.lines.push_back({"profit_lower_estimated", agg.v, agg.profit_mean, floor,
                                    agg.profit_mean - floor, agg.profit_mean >= floor});
            report.lines.push_back({"queue_bound_estimated", agg.v, agg.max_q_max,
                                    eb.queue_bound, eb.queue_bound - agg.max_q_max,
                                    agg.max_q_max <= eb.queue_bound});
            // Budget holds with b_av inflated by (1 + rho_f); the small
            // absolute slack absorbs finite-horizon fluctuation.
            const double exp_cap = (1.0 + est->rho_f) * est->controller_budget + 0.005;
            report.lines.push_back({"expenditure_relaxed_budget", agg.v, agg.expenditure_max,
                                    exp_cap, exp_cap - agg.expenditure_max,
                                    agg.expenditure_max <= exp_cap});
        } else {
            const double floor = profit_star - bounds.c1 / agg.v -
                                 bounds.c0 / (agg.v * bounds.t_min) - stat_tol;
            report.lines.push_back({"profit_lower", agg.v, agg.profit_mean, floor,
                                    agg.profit_mean - floor, agg.profit_mean >= floor});
            const double cap = profit_star + stat_tol;
            report.lines.push_back({"profit_upper", agg.v, agg.profit_mean, cap,
                                    cap - agg.profit_mean, agg.profit_mean <= cap});
            const double q_cap = agg.v * bounds.nu + 2.0 * bounds.c_max;
            report.lines.push_back({"queue_bound", agg.v, agg.max_q_max, q_cap,
                                    q_cap - agg.max_q_max, agg.max_q_max <= q_cap});
        }
    }
    return report;
}

}  // namespace adinvest
