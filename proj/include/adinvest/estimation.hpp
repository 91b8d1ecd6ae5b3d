#pragma once

#include <vector>

#include "adinvest/core_model.hpp"

namespace adinvest {

/// Relative error level of an estimated model: |g_hat - g| <= rho_g * g and
/// |f_hat - f| <= rho_f * f on every action. Both indices live in [0, 1).
struct QualityIndex {
    double rho_g = 0.0;
    double rho_f = 0.0;
};

enum class PerturbMode {
    Plus,        // f_hat = (1 + rho_f) f, g_hat = (1 + rho_g) g
    Minus,       // f_hat = (1 - rho_f) f, g_hat = (1 - rho_g) g
    PerAction,   // caller-supplied multiplicative factor per action
};

/// Multiplicative factors, one per action, parallel to each site's action
/// list. Only consulted in PerAction mode.
struct PerturbFactors {
    std::vector<std::vector<double>> f_factor;
    std::vector<std::vector<double>> g_factor;
};

/// Static multiplicative perturbation of the true expected-value maps.
/// Factors must stay within [1 - rho, 1 + rho]; zero-investment actions come
/// out unperturbed because their true values are zero.
Model perturb_model(const SystemSpec& spec, double rho_g, double rho_f, PerturbMode mode,
                    const PerturbFactors* factors = nullptr);

/// Tightest quality index the estimated model satisfies against the truth,
/// by exhaustive scan. Throws QualityUndefinedError when a nonzero estimate
/// sits on a zero true value or when no index < 1 works.
QualityIndex verify_quality(const SystemSpec& spec, const Model& estimated);

/// Budget to feed the controller so the original b_av holds despite duration
/// estimation error: b_av / (1 + rho_f).
double scaled_budget(double b_av, double rho_f);

/// Constants describing how estimation error degrades the guarantees.
struct ErrorBounds {
    double c_hat_max = 0.0;      // largest per-interval queue change under the estimated model
    double c2 = 0.0;
    double c3 = 0.0;
    double queue_bound = 0.0;       // v*(1+rho_g)*nu + 2*c_hat_max
    double revenue_factor = 0.0;    // (1-rho_f) / ((1+rho_f)(1+rho_g))
    double additive_penalty = 0.0;  // n*rho_g*g_max / ((1+rho_g)*t_min)
    double theta_slack = 0.0;       // (c2 + t_min*c3)(1-rho_f) / (v*t_min*(1+rho_g))
};

ErrorBounds error_bounds(const Bounds& bounds, double v, double rho_g, double rho_f,
                         int n_sites, double g_max);

}  // namespace adinvest
