#include "adinvest/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace adinvest {

double power_law_duration(double kappa, double p, double m) {
    if (p == 0.0) return 0.0;
    return kappa * p / m;
}

double sqrt_revenue(double gamma, double q, double p, double m) {
    if (p == 0.0) return 0.0;
    return gamma * std::sqrt(p / m) * std::pow(m, q);
}

SiteSpec make_site(int id, std::vector<ActionTriple> actions,
                   const std::function<double(double, double)>& f_of,
                   const std::function<double(double, double)>& g_of, NoiseModel noise) {
    SiteSpec site;
    site.id = id;
    site.actions = std::move(actions);
    site.noise = noise;
    site.f.reserve(site.actions.size());
    site.g.reserve(site.actions.size());
    for (const auto& a : site.actions) {
        site.f.push_back(f_of(a.p, a.m));
        site.g.push_back(g_of(a.p, a.m));
    }
    return site;
}

int find_action(const SiteSpec& site, const ActionTriple& a) {
    for (std::size_t i = 0; i < site.actions.size(); ++i) {
        if (site.actions[i] == a) return static_cast<int>(i);
    }
    return -1;
}

namespace {

int find_pm(const SiteSpec& site, double p, double m) {
    for (std::size_t i = 0; i < site.actions.size(); ++i) {
        if (site.actions[i].p == p && site.actions[i].m == m) return static_cast<int>(i);
    }
    return -1;
}

}  // namespace

double eval_F(const SiteSpec& site, double p, double m) {
    int i = find_pm(site, p, m);
    if (i < 0) {
        throw InvalidActionError(
            fmt::format("site {}: no action with p={} m={}", site.id, p, m));
    }
    return site.f[i];
}

double eval_G(const SiteSpec& site, double p, double m) {
    int i = find_pm(site, p, m);
    if (i < 0) {
        throw InvalidActionError(
            fmt::format("site {}: no action with p={} m={}", site.id, p, m));
    }
    return site.g[i];
}

Model exact_model(const SystemSpec& spec) {
    Model model;
    model.sites.reserve(spec.sites.size());
    for (const auto& s : spec.sites) model.sites.push_back(SiteModel{s.f, s.g});
    return model;
}

Bounds derive_bounds(const SystemSpec& spec) {
    Bounds b;
    b.b_av = spec.b_av;
    b.t_min = std::numeric_limits<double>::infinity();
    b.per_site.reserve(spec.sites.size());

    double rate_sum = 0.0;  // sum over sites of p_max_n / t_min_n
    for (const auto& site : spec.sites) {
        SiteBounds sb;
        sb.t_min = std::numeric_limits<double>::infinity();
        const double lo = 1.0 - site.noise.duration_halfwidth;
        const double hi = 1.0 + site.noise.duration_halfwidth;
        for (std::size_t i = 0; i < site.actions.size(); ++i) {
            const auto& a = site.actions[i];
            const double shortest = lo * site.f[i] + a.t_freeze;
            const double longest = hi * site.f[i] + a.t_freeze;
            if (shortest <= 0.0) {
                throw DegenerateFrameError(fmt::format(
                    "site {}: action {} (p={}, t_freeze={}, m={}) admits a zero-length frame",
                    site.id, i, a.p, a.t_freeze, a.m));
            }
            sb.t_min = std::min(sb.t_min, shortest);
            sb.t_max = std::max(sb.t_max, longest);
            sb.p_max = std::max(sb.p_max, a.p);
            b.g_max = std::max(b.g_max, site.g[i]);
            if (a.p > 0.0) b.nu = std::max(b.nu, site.g[i] / a.p);
        }
        b.t_min = std::min(b.t_min, sb.t_min);
        b.t_max = std::max(b.t_max, sb.t_max);
        b.p_max = std::max(b.p_max, sb.p_max);
        rate_sum += sb.p_max / sb.t_min;
        b.per_site.push_back(sb);
    }

    b.c_max = b.t_max * std::max(rate_sum, spec.b_av);
    b.c0 = 0.5 * b.t_max * b.t_max * (rate_sum * rate_sum + spec.b_av * spec.b_av);
    b.c1_lemma_body = 2.0 * b.t_max * rate_sum;
    for (const auto& sb : b.per_site) {
        b.c1 += 2.0 * b.t_max * b.c_max * sb.p_max / sb.t_min;
    }
    return b;
}

namespace {

void check_site(const SiteSpec& site, std::vector<Violation>& out) {
    auto add = [&](std::string code, std::string detail) {
        out.push_back({std::move(code), fmt::format("site {}: {}", site.id, detail)});
    };
    if (site.actions.empty()) {
        add("empty_action_set", "action list is empty");
        return;
    }
    if (site.f.size() != site.actions.size() || site.g.size() != site.actions.size()) {
        add("unresolved_values", "cached F/G values do not cover the action list");
        return;
    }
    if (site.noise.duration_halfwidth < 0.0 || site.noise.duration_halfwidth >= 1.0) {
        add("bad_noise", "duration half-width must lie in [0, 1)");
    }
    if (site.noise.revenue_halfwidth < 0.0 || site.noise.revenue_halfwidth > 1.0) {
        add("bad_noise", "revenue half-width must lie in [0, 1]");
    }

    bool has_zero = false;
    const double lo = 1.0 - site.noise.duration_halfwidth;
    const double hi = 1.0 + site.noise.duration_halfwidth;
    for (std::size_t i = 0; i < site.actions.size(); ++i) {
        const auto& a = site.actions[i];
        if (a.p < 0.0) add("negative_investment", fmt::format("action {} has p < 0", i));
        if (a.t_freeze < 0.0) add("negative_freeze", fmt::format("action {} has t_freeze < 0", i));
        if (site.f[i] < 0.0) add("negative_duration", fmt::format("action {} has F < 0", i));
        if (site.g[i] < 0.0) add("negative_revenue", fmt::format("action {} has G < 0", i));
        if (a.p == 0.0) {
            has_zero = true;
            if (site.g[i] != 0.0) {
                add("nonzero_revenue_at_zero_investment",
                    fmt::format("action {}: G(0,.) != 0", i));
            }
        }
        if (lo * site.f[i] + a.t_freeze <= 0.0) {
            add("degenerate_frame",
                fmt::format("action {}: minimum realizable frame is not positive", i));
        }
        if (!std::isfinite(hi * site.f[i] + a.t_freeze)) {
            add("nonfinite_frame", fmt::format("action {}: frame length is unbounded", i));
        }
    }
    if (!has_zero) add("missing_zero_investment_option", "no action with p = 0");
}

}  // namespace

ValidationReport validate_spec(const SystemSpec& spec) {
    ValidationReport report;
    if (spec.sites.empty()) {
        report.violations.push_back({"no_sites", "at least one site is required"});
    }
    if (!(spec.b_av > 0.0)) {
        report.violations.push_back({"nonpositive_budget", "b_av must be > 0"});
    }
    if (!(spec.v >= 1.0)) {
        report.violations.push_back({"v_below_one", "control parameter v must be >= 1"});
    }
    for (const auto& site : spec.sites) check_site(site, report.violations);
    return report;
}

}  // namespace adinvest
