#pragma once

#include <optional>
#include <vector>

#include "adinvest/core_model.hpp"
#include "adinvest/estimation.hpp"
#include "adinvest/simulator.hpp"

namespace adinvest {

/// Per-site probability distribution over the action list; one draw per
/// frame, independent across sites.
struct StationaryPolicy {
    std::vector<std::vector<double>> weights;
};

struct PolicyValue {
    double profit_rate = 0.0;
    double expenditure_rate = 0.0;
};

/// Ratio of expected per-frame revenue (investment) to expected frame length,
/// per site, summed across sites. Expected values only, no sampling.
PolicyValue evaluate_policy(const StationaryPolicy& policy, const SystemSpec& spec);

struct OracleResult {
    double profit = 0.0;
    double expenditure = 0.0;
    StationaryPolicy policy;
};

struct OracleOptions {
    int lambda_grid = 2000;           // points per multiplier pass, refined once
    std::size_t pure_limit = 1000000; // enumerate all pure combos up to this count
};

/// Best stationary randomized policy found by (i) a dense Lagrange-multiplier
/// sweep with per-site pure selections, (ii) every configuration with exactly
/// one site randomizing over two actions and the mixing weight solved to bind
/// the budget, and (iii) exhaustive pure enumeration at desk scale. The
/// returned policy is budget-feasible.
OracleResult compute_optimal(const SystemSpec& spec, double b_av, const OracleOptions& opt = {});

/// Independent cross-check: per-site two-action mixtures on a fixed weight
/// grid, exhaustively combined across sites. Intended for small instances.
OracleResult exhaustive_mixture_search(const SystemSpec& spec, double b_av,
                                       double weight_step = 0.01);

struct BoundCheckLine {
    std::string name;
    double v = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // slack in the direction of the inequality
    bool pass = false;
};

struct BoundReport {
    std::vector<BoundCheckLine> lines;
    bool ok() const;
};

struct EstimationBoundInput {
    double rho_g = 0.0;
    double rho_f = 0.0;
    double profit_star_scaled = 0.0;  // optimum of the scaled-budget problem
    double controller_budget = 0.0;   // b_av the queue actually ran with
};

/// Checks sweep aggregates against the theoretical guarantees: the revenue
/// lower bound with the c0/c1 terms, the statistical upper bound against the
/// optimum, and the queue bound; with estimation input, the degraded revenue
/// bound and widened queue bound instead.
BoundReport verify_bounds(double profit_star, const std::vector<VAggregate>& aggregates,
                          const Bounds& bounds,
                          const std::optional<EstimationBoundInput>& est = std::nullopt);

}  // namespace adinvest
