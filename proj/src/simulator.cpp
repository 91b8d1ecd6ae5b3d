#include "adinvest/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <thread>

namespace adinvest {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Portable uniform draw; uniform_real_distribution is not bit-stable across
// standard libraries and trace determinism is part of the contract.
double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

}  // namespace

std::mt19937_64 site_stream(std::uint64_t run_seed, int site_id) {
    return std::mt19937_64(splitmix64(run_seed ^ splitmix64(static_cast<uint64_t>(site_id))));
}

std::uint64_t replication_seed(std::uint64_t base_seed, int rep) {
    return splitmix64(base_seed + 0x9e3779b97f4a7c15ull * static_cast<uint64_t>(rep));
}

FrameSample sample_frame(const SiteSpec& site, int action_index, std::mt19937_64& rng) {
    const auto& a = site.actions[action_index];
    if (a.p == 0.0) return {0.0, 0.0};
    const double f = site.f[action_index];
    const double g = site.g[action_index];
    FrameSample s;
    s.ad_duration = uniform(rng, (1.0 - site.noise.duration_halfwidth) * f,
                            (1.0 + site.noise.duration_halfwidth) * f);
    s.revenue = uniform(rng, (1.0 - site.noise.revenue_halfwidth) * g,
                        (1.0 + site.noise.revenue_halfwidth) * g);
    return s;
}

FrameSample sample_frame(const SiteSpec& site, const ActionTriple& a, std::mt19937_64& rng) {
    int i = find_action(site, a);
    if (i < 0) {
        throw InvalidActionError(fmt::format(
            "site {}: action (p={}, t_freeze={}, m={}) not in the feasible set", site.id, a.p,
            a.t_freeze, a.m));
    }
    return sample_frame(site, i, rng);
}

ControllerConfig exact_config(const SystemSpec& spec) {
    ControllerConfig cfg;
    cfg.v = spec.v;
    cfg.budget = spec.b_av;
    return cfg;
}

RunResult run(const SystemSpec& spec, const ControllerConfig& cfg, double horizon,
              std::uint64_t seed) {
    if (spec.sites.empty()) throw ContractViolation("run needs at least one site");
    const Bounds bounds = derive_bounds(spec);
    if (horizon < bounds.t_max) {
        throw InsufficientHorizonError(fmt::format(
            "horizon {} is shorter than the longest possible frame {}", horizon, bounds.t_max));
    }
    // The working model is owned here whenever it can change or must be
    // materialized from the spec.
    Model working;
    const Model* model = cfg.model;
    if (cfg.model_update) {
        working = cfg.model ? *cfg.model : exact_model(spec);
        model = &working;
    } else if (!cfg.model) {
        working = exact_model(spec);
        model = &working;
    }
    if (model->sites.size() != spec.sites.size()) {
        throw ContractViolation("controller model does not cover the system's sites");
    }

    const std::size_t n = spec.sites.size();
    std::vector<std::mt19937_64> rng;
    rng.reserve(n);
    for (const auto& site : spec.sites) rng.push_back(site_stream(seed, site.id));

    Trace trace;
    trace.n_sites = static_cast<int>(n);

    std::vector<SiteState> state(n);
    std::vector<double> open_revenue(n, 0.0);
    DeficitQueue queue;

    auto decide = [&](int i, double t) {
        const Decision d = select_action(cfg.v, queue.q, spec.sites[i], model->sites[i]);
        const FrameSample fs = sample_frame(spec.sites[i], d.action_index, rng[i]);
        auto& st = state[i];
        st.action_index = d.action_index;
        st.frame_start = t;
        st.ad_end = t + fs.ad_duration;
        st.frame_end = st.ad_end + d.action.t_freeze;
        open_revenue[i] = fs.revenue;
        trace.decisions.push_back({t, i, d.action_index, d.action, d.psi, d.q_observed,
                                   fs.ad_duration, fs.revenue});
    };

    double t = 0.0;
    std::vector<int> updating(n);
    std::iota(updating.begin(), updating.end(), 0);
    if (cfg.model_update) cfg.model_update(t, working);
    for (int i : updating) decide(i, t);

    for (;;) {
        double t_next = state[0].frame_end;
        for (const auto& st : state) t_next = std::min(t_next, st.frame_end);
        if (t_next > horizon) break;

        const double delta = t_next - t;
        double rate_sum = 0.0;
        IntervalRecord rec;
        rec.active_action.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            rate_sum += consumption_rate(spec.sites[i], model->sites[i], state[i].action_index);
            rec.active_action.push_back(state[i].action_index);
        }
        rec.t = t;
        rec.delta = delta;
        rec.q_before = queue.q;
        rec.consumed = delta * rate_sum;
        rec.allowed = delta * cfg.budget;
        rec.updating = updating;
        queue = update_queue(queue, delta, std::span{&rate_sum, 1}, cfg.budget);
        rec.q_after = queue.q;
        trace.intervals.push_back(std::move(rec));

        t = t_next;
        updating.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (state[i].frame_end == t_next) {
                updating.push_back(static_cast<int>(i));
                auto& st = state[i];  // the frame ending here is complete
                st.frames_completed += 1;
                st.frame_time += st.frame_end - st.frame_start;
                st.expenditure += spec.sites[i].actions[st.action_index].p;
                st.revenue += open_revenue[i];
            }
        }
        if (cfg.model_update) cfg.model_update(t, working);
        for (int i : updating) decide(i, t);
    }

    RunResult result;
    result.metrics = compute_metrics(trace);
    result.final_states = std::move(state);
    result.trace = std::move(trace);
    return result;
}

Metrics compute_metrics(const Trace& trace) {
    Metrics m;

    struct SiteAccum {
        double revenue = 0.0, expenditure = 0.0, frame_time = 0.0;
        long frames = 0;
        const DecisionRecord* open = nullptr;  // frame not yet completed
    };
    std::vector<SiteAccum> acc(trace.n_sites);

    for (const auto& d : trace.decisions) {
        auto& a = acc[d.site];
        if (a.open != nullptr) {
            a.revenue += a.open->revenue;
            a.expenditure += a.open->action.p;
            a.frame_time += a.open->ad_duration + a.open->action.t_freeze;
            a.frames += 1;
        }
        a.open = &d;
    }

    for (int s = 0; s < trace.n_sites; ++s) {
        if (acc[s].frames == 0) {
            m.sites_excluded.push_back(s);
            continue;
        }
        m.profit_av += acc[s].revenue / acc[s].frame_time;
        m.expenditure_av += acc[s].expenditure / acc[s].frame_time;
        m.frames_total += acc[s].frames;
    }

    double q_weighted = 0.0;
    for (const auto& iv : trace.intervals) {
        m.span += iv.delta;
        q_weighted += iv.delta * iv.q_before;
        m.max_q = std::max({m.max_q, iv.q_before, iv.q_after});
    }
    if (m.span > 0.0) m.avg_q = q_weighted / m.span;
    return m;
}

std::vector<TransitionSnapshot> to_snapshots(const Trace& trace) {
    std::vector<TransitionSnapshot> out;
    out.reserve(trace.intervals.size());
    for (const auto& iv : trace.intervals) {
        TransitionSnapshot s;
        s.q_before = iv.q_before;
        s.q_after = iv.q_after;
        s.delta = iv.delta;
        s.consumed = iv.consumed;
        s.active_action = iv.active_action;
        s.updating = iv.updating;
        out.push_back(std::move(s));
    }
    return out;
}

SweepResult sweep(const SystemSpec& spec, const SweepConfig& cfg) {
    if (cfg.v_values.empty()) {
        throw ContractViolation("sweep requires a nonempty list of v values");
    }
    if (cfg.replications < 1) {
        throw ContractViolation("sweep requires at least one replication");
    }

    Model estimated;
    double budget = spec.b_av;
    if (cfg.estimation) {
        estimated = perturb_model(spec, cfg.est.rho_g, cfg.est.rho_f, cfg.est.mode,
                                  cfg.est.mode == PerturbMode::PerAction ? &cfg.est.factors
                                                                         : nullptr);
        if (cfg.use_scaled_budget) budget = scaled_budget(spec.b_av, cfg.est.rho_f);
    }

    struct Job {
        std::size_t slot;
        double v;
        int rep;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t vi = 0; vi < cfg.v_values.size(); ++vi) {
        for (int rep = 0; rep < cfg.replications; ++rep) {
            jobs.push_back({jobs.size(), cfg.v_values[vi], rep,
                            replication_seed(cfg.base_seed, rep)});
        }
    }

    SweepResult result;
    result.rows.resize(jobs.size());

    auto run_job = [&](const Job& job) {
        ControllerConfig cc;
        cc.v = job.v;
        cc.budget = budget;
        cc.model = cfg.estimation ? &estimated : nullptr;
        const RunResult r = run(spec, cc, cfg.horizon, job.seed);
        result.rows[job.slot] = {job.v,
                                 job.rep,
                                 job.seed,
                                 r.metrics.profit_av,
                                 r.metrics.expenditure_av,
                                 r.metrics.avg_q,
                                 r.metrics.max_q,
                                 r.metrics.frames_total};
    };

    const int workers = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(jobs.size())));
    if (workers == 1) {
        for (const auto& job : jobs) run_job(job);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t j = next.fetch_add(1);
                    if (j >= jobs.size()) return;
                    run_job(jobs[j]);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    for (std::size_t vi = 0; vi < cfg.v_values.size(); ++vi) {
        VAggregate agg;
        agg.v = cfg.v_values[vi];
        agg.replications = cfg.replications;
        double sum = 0.0, sum_sq = 0.0;
        for (int rep = 0; rep < cfg.replications; ++rep) {
            const auto& row = result.rows[vi * cfg.replications + rep];
            sum += row.profit_av;
            sum_sq += row.profit_av * row.profit_av;
            agg.expenditure_mean += row.expenditure_av;
            agg.expenditure_max = std::max(agg.expenditure_max, row.expenditure_av);
            agg.avg_q_mean += row.avg_q;
            agg.max_q_max = std::max(agg.max_q_max, row.max_q);
            agg.frames_mean += static_cast<double>(row.frames_total);
        }
        const double k = cfg.replications;
        agg.profit_mean = sum / k;
        if (cfg.replications > 1) {
            const double var = std::max(0.0, (sum_sq - sum * sum / k) / (k - 1.0));
            agg.profit_stderr = std::sqrt(var / k);
        }
        agg.expenditure_mean /= k;
        agg.avg_q_mean /= k;
        agg.frames_mean /= k;
        result.aggregates.push_back(agg);
    }
    return result;
}

}  // namespace adinvest
