#include "adinvest/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace adinvest {

namespace {

void check_rho(double rho, const char* name) {
    if (rho < 0.0 || rho >= 1.0) {
        throw ContractViolation(fmt::format("{} must lie in [0, 1), got {}", name, rho));
    }
}

double apply_factor(double truth, double factor, double rho, const char* what, int site_id,
                    std::size_t idx) {
    if (factor < 1.0 - rho || factor > 1.0 + rho) {
        throw ContractViolation(
            fmt::format("site {}: {} factor {} for action {} outside [1-rho, 1+rho]", site_id,
                        what, factor, idx));
    }
    return truth * factor;
}

}  // namespace

Model perturb_model(const SystemSpec& spec, double rho_g, double rho_f, PerturbMode mode,
                    const PerturbFactors* factors) {
    check_rho(rho_g, "rho_g");
    check_rho(rho_f, "rho_f");
    if (mode == PerturbMode::PerAction && factors == nullptr) {
        throw ContractViolation("PerAction mode requires explicit factors");
    }

    Model model;
    model.sites.reserve(spec.sites.size());
    for (std::size_t s = 0; s < spec.sites.size(); ++s) {
        const auto& site = spec.sites[s];
        SiteModel sm;
        sm.f.reserve(site.actions.size());
        sm.g.reserve(site.actions.size());
        for (std::size_t i = 0; i < site.actions.size(); ++i) {
            double ff = 1.0, gf = 1.0;
            switch (mode) {
                case PerturbMode::Plus: ff = 1.0 + rho_f; gf = 1.0 + rho_g; break;
                case PerturbMode::Minus: ff = 1.0 - rho_f; gf = 1.0 - rho_g; break;
                case PerturbMode::PerAction:
                    ff = factors->f_factor.at(s).at(i);
                    gf = factors->g_factor.at(s).at(i);
                    break;
            }
            sm.f.push_back(apply_factor(site.f[i], ff, rho_f, "F", site.id, i));
            sm.g.push_back(apply_factor(site.g[i], gf, rho_g, "G", site.id, i));
        }
        model.sites.push_back(std::move(sm));
    }
    return model;
}

QualityIndex verify_quality(const SystemSpec& spec, const Model& estimated) {
    QualityIndex q;
    for (std::size_t s = 0; s < spec.sites.size(); ++s) {
        const auto& site = spec.sites[s];
        const auto& sm = estimated.sites.at(s);
        if (sm.f.size() != site.actions.size() || sm.g.size() != site.actions.size()) {
            throw ContractViolation(
                fmt::format("site {}: estimated model does not cover the action set", site.id));
        }
        for (std::size_t i = 0; i < site.actions.size(); ++i) {
            auto ratio = [&](double est, double truth, const char* what) {
                if (truth == 0.0) {
                    if (est != 0.0) {
                        throw QualityUndefinedError(fmt::format(
                            "site {}: estimated {} is nonzero where the true value is zero",
                            site.id, what));
                    }
                    return 0.0;
                }
                return std::abs(est - truth) / truth;
            };
            q.rho_g = std::max(q.rho_g, ratio(sm.g[i], site.g[i], "G"));
            q.rho_f = std::max(q.rho_f, ratio(sm.f[i], site.f[i], "F"));
        }
    }
    if (q.rho_g >= 1.0 || q.rho_f >= 1.0) {
        throw QualityUndefinedError(
            fmt::format("no quality index below 1 fits: rho_g={}, rho_f={}", q.rho_g, q.rho_f));
    }
    return q;
}

double scaled_budget(double b_av, double rho_f) {
    check_rho(rho_f, "rho_f");
    return b_av / (1.0 + rho_f);
}

ErrorBounds error_bounds(const Bounds& bounds, double v, double rho_g, double rho_f,
                         int n_sites, double g_max) {
    check_rho(rho_g, "rho_g");
    check_rho(rho_f, "rho_f");

    double rate_sum = 0.0;
    for (const auto& sb : bounds.per_site) rate_sum += sb.p_max / ((1.0 - rho_f) * sb.t_min);

    ErrorBounds e;
    e.c_hat_max = (1.0 + rho_f) * bounds.t_max * std::max(rate_sum, bounds.b_av);
    const double scaled_tmax = (1.0 + rho_f) * bounds.t_max;
    e.c2 = 0.5 * scaled_tmax * scaled_tmax * (rate_sum * rate_sum + bounds.b_av * bounds.b_av);
    e.c3 = 2.0 * n_sites * bounds.t_max * e.c_hat_max * bounds.p_max /
           ((1.0 - rho_f) * bounds.t_min);
    e.queue_bound = v * (1.0 + rho_g) * bounds.nu + 2.0 * e.c_hat_max;
    e.revenue_factor = (1.0 - rho_f) / ((1.0 + rho_f) * (1.0 + rho_g));
    e.additive_penalty = n_sites * rho_g * g_max / ((1.0 + rho_g) * bounds.t_min);
    e.theta_slack = (e.c2 + bounds.t_min * e.c3) * (1.0 - rho_f) /
                    (v * bounds.t_min * (1.0 + rho_g));
    return e;
}

}  // namespace adinvest
