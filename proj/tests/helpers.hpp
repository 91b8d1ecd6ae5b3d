#pragma once

#include <random>
#include <vector>

#include "adinvest/core_model.hpp"

namespace testutil {

/// The bundled two-site benchmark system: closed-form duration kappa*p/m and
/// revenue gamma*sqrt(p/m)*m^0.2 with kappa = gamma = site id, budget 0.2,
/// investment-freeze pairs {(0,5),(5,0),(5,5),(10,0),(10,5)} crossed with
/// m in {0.1, 0.2}, and 20% uniform noise on durations and revenues.
inline adinvest::SystemSpec two_site_system(double v = 20.0) {
    using namespace adinvest;
    std::vector<ActionTriple> actions;
    const double pairs[5][2] = {{0, 5}, {5, 0}, {5, 5}, {10, 0}, {10, 5}};
    for (const auto& pt : pairs) {
        for (double m : {0.1, 0.2}) actions.push_back({pt[0], pt[1], m});
    }
    SystemSpec spec;
    spec.b_av = 0.2;
    spec.v = v;
    for (int sid : {1, 2}) {
        const double kappa = sid, gamma = sid;
        spec.sites.push_back(make_site(
            sid, actions,
            [kappa](double p, double m) { return power_law_duration(kappa, p, m); },
            [gamma](double p, double m) { return sqrt_revenue(gamma, 0.2, p, m); },
            NoiseModel{0.2, 0.2}));
    }
    return spec;
}

/// Arbitrary valid system with up to 3 sites and 6 actions per site, table
/// form with a zero-investment option first.
inline adinvest::SystemSpec random_small_system(std::mt19937_64& rng) {
    using namespace adinvest;
    auto unif = [&](double a, double b) {
        return a + (b - a) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    auto unifi = [&](int a, int b) { return a + static_cast<int>(rng() % (b - a + 1)); };

    SystemSpec spec;
    spec.b_av = unif(0.05, 2.0);
    spec.v = unif(1.0, 100.0);
    const int n = unifi(1, 3);
    for (int s = 0; s < n; ++s) {
        SiteSpec site;
        site.id = s + 1;
        site.noise = {unif(0.0, 0.5), unif(0.0, 0.5)};
        site.actions.push_back({0.0, unif(1.0, 10.0), 0.0});
        site.f.push_back(0.0);
        site.g.push_back(0.0);
        const int n_act = unifi(2, 6);
        for (int a = 1; a < n_act; ++a) {
            const double p = unif(0.5, 20.0);
            site.actions.push_back({p, unif(0.0, 10.0), static_cast<double>(a)});
            site.f.push_back(unif(1.0, 100.0));
            site.g.push_back(unif(0.0, 3.0) * p);
        }
        spec.sites.push_back(std::move(site));
    }
    return spec;
}

}  // namespace testutil
