#pragma once

#include <span>
#include <vector>

#include "adinvest/core_model.hpp"

namespace adinvest {

/// Virtual queue tracking the budget deficit accumulated so far. Updated once
/// per inter-decision interval; q never goes negative.
struct DeficitQueue {
    double q = 0.0;
    double last_update = 0.0;
};

/// Outcome of one per-site maximization at a decision point.
struct Decision {
    int site_id = 0;
    int action_index = 0;
    ActionTriple action;
    double psi = 0.0;        // attained objective value, always >= 0
    double q_observed = 0.0;
};

/// Drift-plus-penalty ratio (v*g - q*p) / (f + t_freeze) for one action,
/// evaluated with the supplied (possibly estimated) expected-value maps.
double psi_value(double v, double q, const SiteSpec& site, const SiteModel& model,
                 int action_index);
double psi_value(double v, double q, const SiteSpec& site, const SiteModel& model,
                 const ActionTriple& a);

/// Exhaustive maximization of psi over the site's action list. Ties go to the
/// lowest index in the declared ordering.
Decision select_action(double v, double q, const SiteSpec& site, const SiteModel& model);

/// Effective budget consumption rate p / (f + t_freeze) of an action.
double consumption_rate(const SiteSpec& site, const SiteModel& model, int action_index);
double consumption_rate(const SiteSpec& site, const SiteModel& model, const ActionTriple& a);

/// Effective revenue generation rate g / (f + t_freeze).
double revenue_rate(const SiteSpec& site, const SiteModel& model, int action_index);
double revenue_rate(const SiteSpec& site, const SiteModel& model, const ActionTriple& a);

/// One queue step over an interval of length delta: the allowance delta*b_av
/// drains the queue (clamped at zero), then the aggregate consumption
/// delta * sum(active_rates) arrives. active_rates must cover the in-effect
/// action of every site, not only the ones that just updated.
DeficitQueue update_queue(DeficitQueue dq, double delta, std::span<const double> active_rates,
                          double b_av);

/// A recorded decision-point transition, sufficient to re-check the drift
/// inequality and the approximate-maximization property after the fact.
struct TransitionSnapshot {
    double q_before = 0.0;
    double q_after = 0.0;
    double delta = 0.0;
    double consumed = 0.0;            // aggregate budget consumed over the interval
    std::vector<int> active_action;   // in-effect action per site during the interval
    std::vector<int> updating;        // sites that re-decided at the interval start
};

struct DriftCheck {
    std::string what;
    std::size_t interval = 0;
    int site = -1;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct DriftReport {
    std::vector<DriftCheck> violations;
    std::size_t transitions_checked = 0;
    bool ok() const { return violations.empty(); }
};

/// Re-derives, for every snapshot: the one-step drift bound
/// 0.5*q'^2 - 0.5*q^2 <= c0 - q*(delta*b_av - consumed); that each updating
/// site's in-effect psi equals the enumerated maximum; and that each
/// non-updating site's in-effect psi trails the maximum by at most its
/// 2*t_max*c_max*p_max_n/t_min_n allowance.
DriftReport verify_drift_bound(const SystemSpec& spec, const Model& model, const Bounds& bounds,
                               double v, double b_av,
                               std::span<const TransitionSnapshot> transitions,
                               double tol = 1e-9);

}  // namespace adinvest
