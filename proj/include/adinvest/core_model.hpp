#pragma once

#include <functional>
#include <string>
#include <vector>

#include "adinvest/errors.hpp"

namespace adinvest {

/// One admissible control at a site: invest p, freeze for t_freeze after the
/// money is depleted, operate under configuration m. m is opaque to the
/// controller; only the site's duration/revenue maps interpret it.
struct ActionTriple {
    double p = 0.0;
    double t_freeze = 0.0;
    double m = 0.0;

    bool operator==(const ActionTriple&) const = default;
};

/// Relative half-widths of the uniform noise around the expected advertising
/// duration and revenue. 0.2 means actual values land in [0.8x, 1.2x].
struct NoiseModel {
    double duration_halfwidth = 0.0;
    double revenue_halfwidth = 0.0;

    bool operator==(const NoiseModel&) const = default;
};

/// A renewal site: a finite action list plus per-action expected advertising
/// durations (f) and revenues (g), resolved once at construction.
struct SiteSpec {
    int id = 0;
    std::vector<ActionTriple> actions;
    std::vector<double> f;
    std::vector<double> g;
    NoiseModel noise;

    bool operator==(const SiteSpec&) const = default;
};

struct SystemSpec {
    std::vector<SiteSpec> sites;
    double b_av = 0.0;  // average budget, money per unit time
    double v = 1.0;     // control parameter, >= 1

    bool operator==(const SystemSpec&) const = default;
};

/// Expected-value maps a controller believes in, parallel to each site's
/// action list. The exact model mirrors SiteSpec::f/g; estimation mode swaps
/// in perturbed copies.
struct SiteModel {
    std::vector<double> f;
    std::vector<double> g;
};

struct Model {
    std::vector<SiteModel> sites;
};

struct SiteBounds {
    double t_min = 0.0;  // smallest realizable frame at this site
    double t_max = 0.0;  // largest realizable frame at this site
    double p_max = 0.0;
};

/// Derived constants used by the performance bounds. Realizable frame lengths
/// include the noise half-width, so t_min/t_max bound actual frames, not just
/// expected ones.
struct Bounds {
    double t_min = 0.0;
    double t_max = 0.0;
    double p_max = 0.0;
    double g_max = 0.0;
    double nu = 0.0;    // smallest factor with g <= nu * p over actions with p > 0
    double c_max = 0.0; // largest per-interval queue change
    double c0 = 0.0;
    double c1 = 0.0;           // sum over sites of 2 * t_max * c_max * p_max_n / t_min_n
    double c1_lemma_body = 0.0; // smaller variant 2 * t_max * sum_n p_max_n / t_min_n, kept for comparison
    double b_av = 0.0;
    std::vector<SiteBounds> per_site;
};

struct Violation {
    std::string code;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Build a site by evaluating duration/revenue maps once per action.
SiteSpec make_site(int id, std::vector<ActionTriple> actions,
                   const std::function<double(double, double)>& f_of,
                   const std::function<double(double, double)>& g_of,
                   NoiseModel noise = {});

/// Closed forms used by the bundled configs: expected depletion time
/// proportional to p/m, revenue gamma * sqrt(p/m) * m^q.
double power_law_duration(double kappa, double p, double m);
double sqrt_revenue(double gamma, double q, double p, double m);

/// Index of the action matching (p, t_freeze, m) exactly, or -1.
int find_action(const SiteSpec& site, const ActionTriple& a);

/// Expected advertising duration / revenue for a (p, m) pair from the site's
/// action set. Throws InvalidActionError for unknown pairs.
double eval_F(const SiteSpec& site, double p, double m);
double eval_G(const SiteSpec& site, double p, double m);

/// The model the controller uses when it knows the system exactly.
Model exact_model(const SystemSpec& spec);

/// Exhaustive scan of the finite action sets. Throws DegenerateFrameError if
/// some action admits a zero-length frame.
Bounds derive_bounds(const SystemSpec& spec);

/// Checks every standing assumption; returns violations instead of throwing.
ValidationReport validate_spec(const SystemSpec& spec);

}  // namespace adinvest
