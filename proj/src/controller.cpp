#include "adinvest/controller.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace adinvest {

namespace {

double frame_denominator(const SiteSpec& site, const SiteModel& model, int i) {
    const double denom = model.f[i] + site.actions[i].t_freeze;
    if (denom <= 0.0) {
        throw DegenerateFrameError(fmt::format(
            "site {}: action {} has zero expected frame length", site.id, i));
    }
    return denom;
}

int resolve(const SiteSpec& site, const ActionTriple& a) {
    int i = find_action(site, a);
    if (i < 0) {
        throw InvalidActionError(fmt::format(
            "site {}: action (p={}, t_freeze={}, m={}) not in the feasible set",
            site.id, a.p, a.t_freeze, a.m));
    }
    return i;
}

}  // namespace

double psi_value(double v, double q, const SiteSpec& site, const SiteModel& model,
                 int action_index) {
    const double denom = frame_denominator(site, model, action_index);
    return (v * model.g[action_index] - q * site.actions[action_index].p) / denom;
}

double psi_value(double v, double q, const SiteSpec& site, const SiteModel& model,
                 const ActionTriple& a) {
    return psi_value(v, q, site, model, resolve(site, a));
}

Decision select_action(double v, double q, const SiteSpec& site, const SiteModel& model) {
    Decision best;
    best.site_id = site.id;
    best.q_observed = q;
    best.action_index = -1;
    for (std::size_t i = 0; i < site.actions.size(); ++i) {
        const double psi = psi_value(v, q, site, model, static_cast<int>(i));
        if (best.action_index < 0 || psi > best.psi) {
            best.action_index = static_cast<int>(i);
            best.psi = psi;
        }
    }
    best.action = site.actions[best.action_index];
    return best;
}

double consumption_rate(const SiteSpec& site, const SiteModel& model, int action_index) {
    return site.actions[action_index].p / frame_denominator(site, model, action_index);
}

double consumption_rate(const SiteSpec& site, const SiteModel& model, const ActionTriple& a) {
    return consumption_rate(site, model, resolve(site, a));
}

double revenue_rate(const SiteSpec& site, const SiteModel& model, int action_index) {
    return model.g[action_index] / frame_denominator(site, model, action_index);
}

double revenue_rate(const SiteSpec& site, const SiteModel& model, const ActionTriple& a) {
    return revenue_rate(site, model, resolve(site, a));
}

DeficitQueue update_queue(DeficitQueue dq, double delta, std::span<const double> active_rates,
                          double b_av) {
    if (!(delta > 0.0)) {
        throw ContractViolation(fmt::format("update_queue: delta must be > 0, got {}", delta));
    }
    const double arrivals =
        delta * std::accumulate(active_rates.begin(), active_rates.end(), 0.0);
    dq.q = std::max(dq.q - delta * b_av, 0.0) + arrivals;
    dq.last_update += delta;
    return dq;
}

DriftReport verify_drift_bound(const SystemSpec& spec, const Model& model, const Bounds& bounds,
                               double v, double b_av,
                               std::span<const TransitionSnapshot> transitions, double tol) {
    DriftReport report;
    const std::size_t n = spec.sites.size();
    for (std::size_t d = 0; d < transitions.size(); ++d) {
        const auto& tr = transitions[d];
        ++report.transitions_checked;

        const double drift = 0.5 * tr.q_after * tr.q_after - 0.5 * tr.q_before * tr.q_before;
        const double drift_cap = bounds.c0 - tr.q_before * (tr.delta * b_av - tr.consumed);
        if (drift > drift_cap + tol) {
            report.violations.push_back({"drift_bound", d, -1, drift, drift_cap});
        }

        for (std::size_t s = 0; s < n; ++s) {
            const auto& site = spec.sites[s];
            const auto& sm = model.sites[s];
            const bool updated = std::find(tr.updating.begin(), tr.updating.end(),
                                           static_cast<int>(s)) != tr.updating.end();
            const double in_effect = psi_value(v, tr.q_before, site, sm, tr.active_action[s]);
            const double attainable = select_action(v, tr.q_before, site, sm).psi;
            if (updated) {
                if (std::abs(in_effect - attainable) > tol) {
                    report.violations.push_back(
                        {"updating_site_not_maximal", d, static_cast<int>(s), in_effect,
                         attainable});
                }
            } else {
                const double allowance = 2.0 * bounds.t_max * bounds.c_max *
                                         bounds.per_site[s].p_max / bounds.per_site[s].t_min;
                if (in_effect < attainable - allowance - tol) {
                    report.violations.push_back(
                        {"stale_site_below_allowance", d, static_cast<int>(s), in_effect,
                         attainable - allowance});
                }
            }
        }
    }
    return report;
}

}  // namespace adinvest
