#include <cmath>
#include <random>

#include "doctest.h"

#include "adinvest/estimation.hpp"
#include "helpers.hpp"

using namespace adinvest;
using testutil::two_site_system;

TEST_CASE("perturbation scales the expected values within the declared band") {
    const SystemSpec spec = two_site_system();
    const Model plus = perturb_model(spec, 0.05, 0.1, PerturbMode::Plus);

    // F1(5, 0.1) = 50 scaled by 1.1.
    const int idx = find_action(spec.sites[0], ActionTriple{5, 0, 0.1});
    REQUIRE(idx >= 0);
    CHECK(plus.sites[0].f[idx] == doctest::Approx(55.0).epsilon(1e-12));
    CHECK(plus.sites[0].g[idx] == doctest::Approx(1.05 * spec.sites[0].g[idx]).epsilon(1e-12));

    // Zero-investment actions stay at zero under any factor.
    CHECK(plus.sites[0].f[0] == 0.0);
    CHECK(plus.sites[0].g[0] == 0.0);
}

TEST_CASE("zero error level reproduces the model exactly") {
    const SystemSpec spec = two_site_system();
    const Model id = perturb_model(spec, 0.0, 0.0, PerturbMode::Plus);
    const Model truth = exact_model(spec);
    for (std::size_t s = 0; s < spec.sites.size(); ++s) {
        CHECK(id.sites[s].f == truth.sites[s].f);
        CHECK(id.sites[s].g == truth.sites[s].g);
    }
}

TEST_CASE("out-of-band factors are contract violations") {
    const SystemSpec spec = two_site_system();
    PerturbFactors factors;
    for (const auto& site : spec.sites) {
        factors.f_factor.emplace_back(site.actions.size(), 1.0);
        factors.g_factor.emplace_back(site.actions.size(), 1.0);
    }
    factors.f_factor[0][2] = 1.2;  // outside [0.9, 1.1]
    CHECK_THROWS_AS(perturb_model(spec, 0.05, 0.1, PerturbMode::PerAction, &factors),
                    ContractViolation);
    CHECK_THROWS_AS(perturb_model(spec, 1.0, 0.0, PerturbMode::Plus), ContractViolation);
    CHECK_THROWS_AS(perturb_model(spec, 0.0, 0.0, PerturbMode::PerAction, nullptr),
                    ContractViolation);
}

TEST_CASE("verify_quality recovers the tightest indices") {
    const SystemSpec spec = two_site_system();

    const QualityIndex zero = verify_quality(spec, exact_model(spec));
    CHECK(zero.rho_g == 0.0);
    CHECK(zero.rho_f == 0.0);

    const Model plus = perturb_model(spec, 0.05, 0.1, PerturbMode::Plus);
    const QualityIndex q = verify_quality(spec, plus);
    CHECK(q.rho_g == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(q.rho_f == doctest::Approx(0.1).epsilon(1e-9));

    Model doubled = exact_model(spec);
    doubled.sites[0].g[2] *= 2.0;  // relative error 1 on one action
    CHECK_THROWS_AS(verify_quality(spec, doubled), QualityUndefinedError);

    Model ghost = exact_model(spec);
    ghost.sites[0].g[0] = 0.5;  // nonzero estimate over a zero true value
    CHECK_THROWS_AS(verify_quality(spec, ghost), QualityUndefinedError);
}

TEST_CASE("round trip: perturb then verify stays within the requested band") {
    const SystemSpec spec = two_site_system();
    std::mt19937_64 rng(5);
    auto unif = [&](double a, double b) {
        return a + (b - a) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    for (int k = 0; k < 20; ++k) {
        const double rho_g = unif(0.0, 0.6);
        const double rho_f = unif(0.0, 0.6);
        PerturbFactors factors;
        for (const auto& site : spec.sites) {
            std::vector<double> ff, gf;
            for (std::size_t i = 0; i < site.actions.size(); ++i) {
                ff.push_back(unif(1.0 - rho_f, 1.0 + rho_f));
                gf.push_back(unif(1.0 - rho_g, 1.0 + rho_g));
            }
            factors.f_factor.push_back(std::move(ff));
            factors.g_factor.push_back(std::move(gf));
        }
        const Model est = perturb_model(spec, rho_g, rho_f, PerturbMode::PerAction, &factors);
        const QualityIndex q = verify_quality(spec, est);
        CHECK(q.rho_g <= rho_g + 1e-12);
        CHECK(q.rho_f <= rho_f + 1e-12);
    }
}

TEST_CASE("scaled budget divides by one plus the duration error") {
    CHECK(scaled_budget(0.2, 0.1) == doctest::Approx(0.18181818181818182).epsilon(1e-15));
    CHECK(scaled_budget(0.2, 0.0) == 0.2);
    CHECK(scaled_budget(1.0, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("error bounds reduce to the exact-knowledge constants at zero error") {
    const SystemSpec spec = two_site_system();
    const Bounds b = derive_bounds(spec);
    const ErrorBounds e = error_bounds(b, 200.0, 0.0, 0.0, 2, b.g_max);
    CHECK(e.revenue_factor == 1.0);
    CHECK(e.c_hat_max == doctest::Approx(b.c_max).epsilon(1e-12));
    CHECK(e.c2 == doctest::Approx(b.c0).epsilon(1e-12));
    CHECK(e.queue_bound == doctest::Approx(200.0 * b.nu + 2.0 * b.c_max).epsilon(1e-12));
    CHECK(e.additive_penalty == 0.0);
}

TEST_CASE("error bounds at the benchmark error levels") {
    const SystemSpec spec = two_site_system();
    const Bounds b = derive_bounds(spec);
    const ErrorBounds e = error_bounds(b, 200.0, 0.05, 0.1, 2, b.g_max);
    CHECK(e.revenue_factor == doctest::Approx(0.779220779220779).epsilon(1e-12));
    CHECK(e.c_hat_max == doctest::Approx(1197.7777777777778).epsilon(1e-12));
    CHECK(e.c2 == doctest::Approx(718788.4074691358).epsilon(1e-12));
    CHECK(e.c3 == doctest::Approx(2608493.827160494).epsilon(1e-12));
    CHECK(e.queue_bound == doctest::Approx(2770.3250977695326).epsilon(1e-12));
    CHECK(e.additive_penalty == doctest::Approx(0.24036470265912124).epsilon(1e-12));
}
