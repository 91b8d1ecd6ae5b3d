#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "adinvest/controller.hpp"
#include "adinvest/core_model.hpp"
#include "adinvest/estimation.hpp"

namespace adinvest {

/// Sampled outcome of one advertising interval.
struct FrameSample {
    double ad_duration = 0.0;
    double revenue = 0.0;
};

/// Uniform draws around the expected duration/revenue of the action, with the
/// site's noise half-widths. Zero investment depletes instantly and earns
/// nothing without consuming randomness.
FrameSample sample_frame(const SiteSpec& site, int action_index, std::mt19937_64& rng);
FrameSample sample_frame(const SiteSpec& site, const ActionTriple& a, std::mt19937_64& rng);

/// Per-site engine state: the in-effect action, the layout of the current
/// frame, and running totals over completed frames.
struct SiteState {
    int action_index = -1;
    double frame_start = 0.0;
    double ad_end = 0.0;    // frame_start + sampled advertising duration
    double frame_end = 0.0; // ad_end + t_freeze
    long frames_completed = 0;
    double revenue = 0.0;
    double expenditure = 0.0;
    double frame_time = 0.0;
};

/// One per-site decision: where, what, at which queue value, and how the
/// started frame actually turned out.
struct DecisionRecord {
    double t = 0.0;
    int site = 0;              // index into spec.sites
    int action_index = 0;
    ActionTriple action;
    double psi = 0.0;
    double q_observed = 0.0;
    double ad_duration = 0.0;  // sampled
    double revenue = 0.0;      // sampled
};

/// One inter-decision interval [t, t + delta).
struct IntervalRecord {
    double t = 0.0;
    double delta = 0.0;
    double q_before = 0.0;
    double q_after = 0.0;
    double consumed = 0.0;  // aggregate budget consumed, delta * sum of rates
    double allowed = 0.0;   // delta * controller budget
    std::vector<int> updating;       // sites that decided at t
    std::vector<int> active_action;  // per-site in-effect action over the interval
};

struct Trace {
    int n_sites = 0;
    std::vector<DecisionRecord> decisions;
    std::vector<IntervalRecord> intervals;
};

/// Ratio-of-sums performance metrics over completed frames.
struct Metrics {
    double profit_av = 0.0;
    double expenditure_av = 0.0;
    double avg_q = 0.0;  // delta-weighted mean of q over decision intervals
    double max_q = 0.0;
    double span = 0.0;   // sum of interval lengths = last decision point
    long frames_total = 0;
    std::vector<int> sites_excluded;  // sites with no completed frame
};

/// What the controller runs with. The model defaults to the exact one; the
/// budget is what the queue allowance uses (scaled in estimation mode) and
/// may differ from the b_av the metrics are judged against.
struct ControllerConfig {
    double v = 1.0;
    double budget = 0.0;
    const Model* model = nullptr;
    /// Optional hook, invoked at every decision point before the finishing
    /// sites re-decide. Lets the believed model vary over time, e.g. when
    /// estimates are refreshed between frames.
    std::function<void(double t, Model& model)> model_update;
};

ControllerConfig exact_config(const SystemSpec& spec);

struct RunResult {
    Trace trace;
    Metrics metrics;
    std::vector<SiteState> final_states;
};

/// Discrete-event loop: all sites start a frame at t = 0 with an empty queue;
/// each later decision point is the earliest pending frame end; sites
/// finishing there re-decide at the current queue value; one queue update
/// covers each interval. Deterministic given (spec, seed).
RunResult run(const SystemSpec& spec, const ControllerConfig& cfg, double horizon,
              std::uint64_t seed);

/// Metrics from a trace alone: per-site ratio of summed revenue (investment)
/// to summed frame lengths, summed across sites; incomplete final frames are
/// excluded, sites without a completed frame are skipped and reported.
Metrics compute_metrics(const Trace& trace);

/// View of a trace as drift-check transitions.
std::vector<TransitionSnapshot> to_snapshots(const Trace& trace);

/// Per-site random stream for a run, stable under adding sites.
std::mt19937_64 site_stream(std::uint64_t run_seed, int site_id);

/// Seed of replication `rep`; shared across v values so sweeps compare V on
/// common random numbers.
std::uint64_t replication_seed(std::uint64_t base_seed, int rep);

struct EstimationSetup {
    double rho_g = 0.0;
    double rho_f = 0.0;
    PerturbMode mode = PerturbMode::Plus;
    PerturbFactors factors;  // used in PerAction mode
};

struct SweepConfig {
    std::vector<double> v_values;
    int replications = 10;
    double horizon = 1e6;
    std::uint64_t base_seed = 42;
    int jobs = 1;
    bool estimation = false;
    EstimationSetup est;
    bool use_scaled_budget = true;  // estimation mode only
};

struct SweepRow {
    double v = 0.0;
    int replication = 0;
    std::uint64_t seed = 0;
    double profit_av = 0.0;
    double expenditure_av = 0.0;
    double avg_q = 0.0;
    double max_q = 0.0;
    long frames_total = 0;
};

struct VAggregate {
    double v = 0.0;
    int replications = 0;
    double profit_mean = 0.0;
    double profit_stderr = 0.0;
    double expenditure_mean = 0.0;
    double expenditure_max = 0.0;
    double avg_q_mean = 0.0;
    double max_q_max = 0.0;
    double frames_mean = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;        // one per (v, replication), v-major
    std::vector<VAggregate> aggregates;
};

/// Independent runs over v_values x replications, dispatched to `jobs`
/// workers. Row order and content do not depend on the worker count.
SweepResult sweep(const SystemSpec& spec, const SweepConfig& cfg);

}  // namespace adinvest
