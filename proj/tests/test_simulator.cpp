#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "adinvest/csv.hpp"
#include "adinvest/simulator.hpp"
#include "helpers.hpp"

using namespace adinvest;
using testutil::two_site_system;

namespace {

SystemSpec single_site_system(NoiseModel noise = {}) {
    SystemSpec spec;
    spec.b_av = 0.2;
    spec.v = 20.0;
    spec.sites.push_back(make_site(
        1, {{0, 5, 0.1}, {5, 0, 0.1}},
        [](double p, double m) { return power_law_duration(1.0, p, m); },
        [](double p, double m) { return sqrt_revenue(1.0, 0.2, p, m); }, noise));
    return spec;
}

}  // namespace

TEST_CASE("sampled frames stay in the noise support and average to the model") {
    const SystemSpec spec = two_site_system();
    const auto& site = spec.sites[0];
    const int idx = find_action(site, ActionTriple{5, 0, 0.1});
    REQUIRE(idx >= 0);
    const double f = site.f[idx], g = site.g[idx];

    auto rng = site_stream(123, site.id);
    double dur_sum = 0.0, rev_sum = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const FrameSample s = sample_frame(site, idx, rng);
        CHECK(s.ad_duration >= 0.8 * f);
        CHECK(s.ad_duration <= 1.2 * f);
        CHECK(s.revenue >= 0.8 * g);
        CHECK(s.revenue <= 1.2 * g);
        dur_sum += s.ad_duration;
        rev_sum += s.revenue;
    }
    CHECK(std::abs(dur_sum / n - f) < 0.5);
    CHECK(std::abs(rev_sum / n - g) < 0.01 * g);

    const FrameSample idle = sample_frame(site, 0, rng);  // p = 0
    CHECK(idle.ad_duration == 0.0);
    CHECK(idle.revenue == 0.0);
}

TEST_CASE("a deterministic single-action renewal reproduces the analytic rates") {
    const SystemSpec spec = single_site_system();  // no noise
    const RunResult r = run(spec, exact_config(spec), 1e4, 1);
    CHECK(r.metrics.profit_av ==
          doctest::Approx(4.461542169214011 / 50.0).epsilon(1e-9));
    CHECK(r.metrics.expenditure_av == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(r.metrics.frames_total == 200);
    CHECK(r.metrics.span == doctest::Approx(1e4));
}

TEST_CASE("too short a horizon is rejected") {
    const SystemSpec spec = two_site_system();
    CHECK_THROWS_AS(run(spec, exact_config(spec), 0.0, 1), InsufficientHorizonError);
    CHECK_THROWS_AS(run(spec, exact_config(spec), 100.0, 1), InsufficientHorizonError);
}

TEST_CASE("metrics are ratios of sums over completed frames") {
    Trace trace;
    trace.n_sites = 1;
    // Two completed frames (R=1, len=10) and (R=3, len=10); the third record
    // only closes the second frame.
    trace.decisions.push_back({0, 0, 0, {2, 0, 0.1}, 0, 0, 10, 1});
    trace.decisions.push_back({10, 0, 0, {2, 0, 0.1}, 0, 0, 10, 3});
    trace.decisions.push_back({20, 0, 0, {2, 0, 0.1}, 0, 0, 10, 2});
    trace.intervals.push_back({0, 10, 7, 7, 0, 0, {0}, {0}});
    trace.intervals.push_back({10, 10, 7, 7, 0, 0, {0}, {0}});

    const Metrics m = compute_metrics(trace);
    CHECK(m.profit_av == doctest::Approx(0.2));
    CHECK(m.expenditure_av == doctest::Approx(0.2));
    CHECK(m.frames_total == 2);
    CHECK(m.avg_q == doctest::Approx(7.0));
    CHECK(m.span == doctest::Approx(20.0));
}

TEST_CASE("an all-idle trace has zero rates and a site without frames is skipped") {
    Trace trace;
    trace.n_sites = 2;
    trace.decisions.push_back({0, 0, 0, {0, 5, 0.1}, 0, 0, 0, 0});
    trace.decisions.push_back({0, 1, 0, {0, 5, 0.1}, 0, 0, 0, 0});
    trace.decisions.push_back({5, 0, 0, {0, 5, 0.1}, 0, 0, 0, 0});
    trace.intervals.push_back({0, 5, 0, 0, 0, 1, {0, 1}, {0, 0}});

    const Metrics m = compute_metrics(trace);
    CHECK(m.profit_av == 0.0);
    CHECK(m.expenditure_av == 0.0);
    CHECK(m.frames_total == 1);
    REQUIRE(m.sites_excluded.size() == 1);
    CHECK(m.sites_excluded[0] == 1);  // site 1 never completed a frame
}

TEST_CASE("runs are deterministic in (spec, seed)") {
    const SystemSpec spec = two_site_system();
    const RunResult a = run(spec, exact_config(spec), 2e4, 42);
    const RunResult b = run(spec, exact_config(spec), 2e4, 42);
    const RunResult c = run(spec, exact_config(spec), 2e4, 43);
    CHECK(trace_csv(a.trace, spec) == trace_csv(b.trace, spec));
    CHECK(trace_csv(a.trace, spec) != trace_csv(c.trace, spec));
}

TEST_CASE("the timeline is tiled by the decision intervals") {
    const SystemSpec spec = two_site_system();
    const Bounds bounds = derive_bounds(spec);
    const RunResult r = run(spec, exact_config(spec), 5e4, 3);

    double sum = 0.0;
    for (const auto& iv : r.trace.intervals) {
        CHECK(iv.delta > 0.0);
        CHECK(iv.delta <= bounds.t_max + 1e-9);
        sum += iv.delta;
    }
    const auto& last = r.trace.intervals.back();
    CHECK(sum == doctest::Approx(last.t + last.delta).epsilon(1e-9));
    CHECK(last.t + last.delta <= 5e4);

    // Interval ends line up with the last decision record's timestamp.
    CHECK(r.trace.decisions.back().t == doctest::Approx(last.t + last.delta));
}

TEST_CASE("queue stays within the theoretical band along a run") {
    const SystemSpec spec = two_site_system(20.0);
    const Bounds bounds = derive_bounds(spec);
    const RunResult r = run(spec, exact_config(spec), 1e5, 5);
    CHECK(r.metrics.max_q <= 20.0 * bounds.nu + 2.0 * bounds.c_max);
    for (const auto& iv : r.trace.intervals) {
        CHECK(iv.q_before >= 0.0);
        CHECK(std::abs(iv.q_after - iv.q_before) <= bounds.c_max + 1e-9);
    }
}

TEST_CASE("site state mirrors the trace") {
    const SystemSpec spec = two_site_system(20.0);
    const RunResult r = run(spec, exact_config(spec), 5e4, 13);
    REQUIRE(r.final_states.size() == spec.sites.size());

    double profit = 0.0, expenditure = 0.0;
    long frames = 0;
    for (const auto& st : r.final_states) {
        CHECK(st.frame_end >= st.ad_end);
        CHECK(st.ad_end >= st.frame_start);
        CHECK(st.frames_completed > 0);
        profit += st.revenue / st.frame_time;
        expenditure += st.expenditure / st.frame_time;
        frames += st.frames_completed;
    }
    CHECK(profit == doctest::Approx(r.metrics.profit_av).epsilon(1e-12));
    CHECK(expenditure == doctest::Approx(r.metrics.expenditure_av).epsilon(1e-12));
    CHECK(frames == r.metrics.frames_total);
}

TEST_CASE("the model hook can swap estimates between frames") {
    const SystemSpec spec = two_site_system(20.0);
    ControllerConfig cfg = exact_config(spec);
    // From t = 10^4 on, site 1 is believed to earn nothing, so the controller
    // must idle it from its next update onward.
    cfg.model_update = [&](double t, Model& model) {
        if (t >= 1e4) {
            std::fill(model.sites[0].g.begin(), model.sites[0].g.end(), 0.0);
        }
    };
    const RunResult r = run(spec, cfg, 3e4, 19);
    bool saw_late_decision = false;
    for (const auto& d : r.trace.decisions) {
        if (d.site != 0 || d.t < 1e4) continue;
        saw_late_decision = true;
        CHECK(d.action.p == 0.0);
    }
    CHECK(saw_late_decision);

    // An inert hook changes nothing.
    ControllerConfig noop = exact_config(spec);
    noop.model_update = [](double, Model&) {};
    const RunResult plain = run(spec, exact_config(spec), 3e4, 19);
    const RunResult hooked = run(spec, noop, 3e4, 19);
    CHECK(trace_csv(plain.trace, spec) == trace_csv(hooked.trace, spec));
}

TEST_CASE("sites update asynchronously") {
    const SystemSpec spec = two_site_system(20.0);
    const RunResult r = run(spec, exact_config(spec), 1e5, 9);
    std::size_t solo = 0;
    for (const auto& iv : r.trace.intervals) {
        if (iv.updating.size() == 1) ++solo;
    }
    CHECK(static_cast<double>(solo) / r.trace.intervals.size() >= 0.5);
}

TEST_CASE("estimation mode drives the queue with the estimated model only") {
    const SystemSpec spec = two_site_system(20.0);
    const Model est = perturb_model(spec, 0.05, 0.1, PerturbMode::Minus);
    ControllerConfig cfg{20.0, scaled_budget(spec.b_av, 0.1), &est, {}};
    const RunResult r = run(spec, cfg, 5e4, 21);

    std::size_t di = 0;
    for (const auto& iv : r.trace.intervals) {
        double want = 0.0;
        for (std::size_t s = 0; s < spec.sites.size(); ++s) {
            want += consumption_rate(spec.sites[s], est.sites[s], iv.active_action[s]);
        }
        CHECK(iv.consumed == doctest::Approx(iv.delta * want).epsilon(1e-12));
        CHECK(iv.allowed == doctest::Approx(iv.delta * cfg.budget).epsilon(1e-12));
        for (std::size_t k = 0; k < iv.updating.size(); ++k, ++di) {
            const auto& d = r.trace.decisions[di];
            CHECK(d.psi == psi_value(20.0, d.q_observed, spec.sites[d.site],
                                     est.sites[d.site], d.action_index));
        }
    }

    // Sampling still follows the true model: actual durations live in the
    // true noise support, which the shrunken estimate would not cover.
    for (const auto& d : r.trace.decisions) {
        if (d.action.p == 0.0) continue;
        const double f_true = spec.sites[d.site].f[d.action_index];
        CHECK(d.ad_duration >= 0.8 * f_true - 1e-12);
        CHECK(d.ad_duration <= 1.2 * f_true + 1e-12);
    }
}

TEST_CASE("overestimated durations still respect the relaxed budget guarantee") {
    // With f_hat = 1.1 f and the scaled allowance b_av/1.1, the real
    // expenditure settles at b_av itself; finite horizons add only small
    // fluctuation around it.
    const SystemSpec spec = two_site_system(20.0);
    const Model est = perturb_model(spec, 0.05, 0.1, PerturbMode::Plus);
    ControllerConfig cfg{20.0, scaled_budget(spec.b_av, 0.1), &est, {}};
    const RunResult r = run(spec, cfg, 1e6, 4);
    CHECK(r.metrics.expenditure_av <= (1.0 + 0.1) * cfg.budget + 0.005);
}

TEST_CASE("a zero-error estimated run is bit-identical to the exact run") {
    const SystemSpec spec = two_site_system(20.0);
    const Model est = perturb_model(spec, 0.0, 0.0, PerturbMode::Plus);
    ControllerConfig est_cfg{spec.v, spec.b_av, &est, {}};
    const RunResult exact = run(spec, exact_config(spec), 3e4, 17);
    const RunResult mirrored = run(spec, est_cfg, 3e4, 17);
    CHECK(trace_csv(exact.trace, spec) == trace_csv(mirrored.trace, spec));
}

TEST_CASE("sweeps are reproducible and worker-count independent") {
    const SystemSpec spec = two_site_system();
    SweepConfig cfg;
    cfg.v_values = {5, 20};
    cfg.replications = 2;
    cfg.horizon = 1e4;
    cfg.base_seed = 42;
    cfg.jobs = 1;

    const SweepResult a = sweep(spec, cfg);
    const SweepResult b = sweep(spec, cfg);
    cfg.jobs = 4;
    const SweepResult c = sweep(spec, cfg);

    REQUIRE(a.rows.size() == 4);
    REQUIRE(a.aggregates.size() == 2);
    CHECK(summary_csv(a.rows) == summary_csv(b.rows));
    CHECK(summary_csv(a.rows) == summary_csv(c.rows));

    // Replication seeds are shared across v values (common random numbers).
    CHECK(a.rows[0].seed == a.rows[2].seed);
    CHECK(a.rows[0].seed != a.rows[1].seed);
}

TEST_CASE("sweep validates its configuration") {
    const SystemSpec spec = two_site_system();
    SweepConfig cfg;
    cfg.v_values = {};
    CHECK_THROWS_AS(sweep(spec, cfg), ContractViolation);
    cfg.v_values = {20};
    cfg.replications = 0;
    CHECK_THROWS_AS(sweep(spec, cfg), ContractViolation);
}
