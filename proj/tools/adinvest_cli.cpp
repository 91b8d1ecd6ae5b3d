#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "adinvest/config_io.hpp"
#include "adinvest/csv.hpp"
#include "adinvest/oracle.hpp"
#include "adinvest/simulator.hpp"

namespace {

using namespace adinvest;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitBoundViolation = 3;

struct CommonArgs {
    std::string config_path;
    std::string estimation_path;
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    double horizon = 1e6;
    std::vector<double> v_values = {5, 10, 20, 50, 100, 200};
    int replications = 10;
    bool scaled_budget = true;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
};

void add_run_flags(CLI::App* cmd, CommonArgs& args, bool with_sweep_flags) {
    cmd->add_option("--config", args.config_path, "system spec JSON")->required();
    cmd->add_option("--seed", args.seed, "base random seed (default 42)");
    cmd->add_option("--horizon", args.horizon, "simulated time span (default 1e6)");
    cmd->add_option("--estimation", args.estimation_path,
                    "estimation JSON {rho_g, rho_f, mode[, factors]}");
    cmd->add_option("--scaled-budget", args.scaled_budget,
                    "in estimation mode, run the controller on b_av/(1+rho_f) (default true)");
    cmd->add_option("--out", args.out_dir, "output directory (default out)");
    if (with_sweep_flags) {
        cmd->add_option("--v", args.v_values,
                        "V values to sweep (default 5 10 20 50 100 200)")
            ->delimiter(',');
        cmd->add_option("--replications", args.replications, "runs per V (default 10)");
        cmd->add_option("--jobs", args.jobs, "worker threads for the sweep");
    }
}

SweepConfig sweep_config(const CommonArgs& args, const std::optional<EstimationSetup>& est) {
    SweepConfig cfg;
    cfg.v_values = args.v_values;
    cfg.replications = args.replications;
    cfg.horizon = args.horizon;
    cfg.base_seed = args.seed;
    cfg.jobs = std::max(1, args.jobs);
    if (est) {
        cfg.estimation = true;
        cfg.est = *est;
        cfg.use_scaled_budget = args.scaled_budget;
    }
    return cfg;
}

int cmd_validate(const std::string& config_path, const std::string& dump_path) {
    const SystemSpec spec = load_system(config_path);
    const ValidationReport report = validate_spec(spec);
    for (const auto& v : report.violations) {
        std::printf("violation %s: %s\n", v.code.c_str(), v.detail.c_str());
    }
    if (!report.ok()) {
        std::printf("invalid: %zu violation(s)\n", report.violations.size());
        return kExitValidation;
    }

    const Bounds b = derive_bounds(spec);
    std::printf("valid: %zu site(s), b_av=%s, v=%s\n", spec.sites.size(),
                format_double(spec.b_av).c_str(), format_double(spec.v).c_str());
    std::printf("t_min=%s t_max=%s p_max=%s g_max=%s nu=%s\n", format_double(b.t_min).c_str(),
                format_double(b.t_max).c_str(), format_double(b.p_max).c_str(),
                format_double(b.g_max).c_str(), format_double(b.nu).c_str());
    std::printf("c_max=%s c0=%s c1=%s (lemma-statement variant %s)\n",
                format_double(b.c_max).c_str(), format_double(b.c0).c_str(),
                format_double(b.c1).c_str(), format_double(b.c1_lemma_body).c_str());

    if (!dump_path.empty()) {
        write_file(dump_path, normalized_json(spec).dump(2) + "\n");
        std::printf("normalized spec written to %s\n", dump_path.c_str());
    }
    return kExitOk;
}

int cmd_simulate(const CommonArgs& args, double v_override) {
    SystemSpec spec = load_system(args.config_path);
    const ValidationReport report = validate_spec(spec);
    if (!report.ok()) {
        for (const auto& v : report.violations) {
            std::fprintf(stderr, "violation %s: %s\n", v.code.c_str(), v.detail.c_str());
        }
        return kExitValidation;
    }
    if (v_override > 0) spec.v = v_override;

    ControllerConfig cc = exact_config(spec);
    Model estimated;
    if (!args.estimation_path.empty()) {
        const EstimationSetup est = load_estimation(args.estimation_path);
        estimated = perturb_model(spec, est.rho_g, est.rho_f, est.mode,
                                  est.mode == PerturbMode::PerAction ? &est.factors : nullptr);
        cc.model = &estimated;
        if (args.scaled_budget) cc.budget = scaled_budget(spec.b_av, est.rho_f);
    }

    const RunResult r = run(spec, cc, args.horizon, args.seed);
    const auto trace_path = std::filesystem::path(args.out_dir) / "trace.csv";
    write_file(trace_path, trace_csv(r.trace, spec));

    const auto& m = r.metrics;
    std::printf("v=%s seed=%llu span=%s frames=%ld\n", format_double(spec.v).c_str(),
                static_cast<unsigned long long>(args.seed), format_double(m.span).c_str(),
                m.frames_total);
    std::printf("profit_av=%s expenditure_av=%s avg_q=%s max_q=%s\n",
                format_double(m.profit_av).c_str(), format_double(m.expenditure_av).c_str(),
                format_double(m.avg_q).c_str(), format_double(m.max_q).c_str());
    std::printf("trace written to %s\n", trace_path.string().c_str());
    return kExitOk;
}

int cmd_sweep(const CommonArgs& args) {
    const SystemSpec spec = load_system(args.config_path);
    const ValidationReport report = validate_spec(spec);
    if (!report.ok()) {
        for (const auto& v : report.violations) {
            std::fprintf(stderr, "violation %s: %s\n", v.code.c_str(), v.detail.c_str());
        }
        return kExitValidation;
    }
    std::optional<EstimationSetup> est;
    if (!args.estimation_path.empty()) est = load_estimation(args.estimation_path);

    const SweepResult result = sweep(spec, sweep_config(args, est));
    const std::filesystem::path out(args.out_dir);
    write_file(out / "summary.csv", summary_csv(result.rows));
    write_file(out / "aggregate.csv", aggregate_csv(result.aggregates));
    for (const auto& a : result.aggregates) {
        std::printf("V=%-6s profit=%.6f (se %.2e)  expenditure mean=%.6f max=%.6f  avg_q=%.3f\n",
                    format_double(a.v).c_str(), a.profit_mean, a.profit_stderr,
                    a.expenditure_mean, a.expenditure_max, a.avg_q_mean);
    }
    std::printf("summary written to %s\n", (out / "summary.csv").string().c_str());
    return kExitOk;
}

int cmd_oracle(const CommonArgs& args, double b_av_override, bool grid_check) {
    const SystemSpec spec = load_system(args.config_path);
    const ValidationReport report = validate_spec(spec);
    if (!report.ok()) {
        for (const auto& v : report.violations) {
            std::fprintf(stderr, "violation %s: %s\n", v.code.c_str(), v.detail.c_str());
        }
        return kExitValidation;
    }

    const double b_av = b_av_override >= 0 ? b_av_override : spec.b_av;
    const OracleResult best = compute_optimal(spec, b_av);

    nlohmann::json doc;
    doc["b_av"] = b_av;
    doc["profit_star"] = best.profit;
    doc["expenditure"] = best.expenditure;
    doc["policy"] = policy_json(best.policy, spec);
    if (grid_check) {
        const OracleResult grid = exhaustive_mixture_search(spec, b_av);
        doc["grid_check"] = {{"profit", grid.profit},
                             {"expenditure", grid.expenditure},
                             {"difference", best.profit - grid.profit}};
        std::printf("grid cross-check: %.9f (difference %.3e)\n", grid.profit,
                    best.profit - grid.profit);
    }
    const auto path = std::filesystem::path(args.out_dir) / "oracle.json";
    write_file(path, doc.dump(2) + "\n");
    std::printf("profit_star=%.9f expenditure=%.9f -> %s\n", best.profit, best.expenditure,
                path.string().c_str());
    return kExitOk;
}

int cmd_report(const CommonArgs& args) {
    const SystemSpec spec = load_system(args.config_path);
    const ValidationReport vreport = validate_spec(spec);
    if (!vreport.ok()) {
        for (const auto& v : vreport.violations) {
            std::fprintf(stderr, "violation %s: %s\n", v.code.c_str(), v.detail.c_str());
        }
        return kExitValidation;
    }
    const Bounds bounds = derive_bounds(spec);
    const std::filesystem::path out(args.out_dir);

    const OracleResult star = compute_optimal(spec, spec.b_av);
    std::printf("profit_star=%.9f (expenditure %.9f)\n", star.profit, star.expenditure);

    std::optional<EstimationSetup> est;
    if (!args.estimation_path.empty()) est = load_estimation(args.estimation_path);

    // Exact-knowledge sweep against the Theorem guarantees.
    CommonArgs exact_args = args;
    exact_args.estimation_path.clear();
    const SweepResult exact = sweep(spec, sweep_config(exact_args, std::nullopt));
    write_file(out / "summary_exact.csv", summary_csv(exact.rows));
    write_file(out / "aggregate_exact.csv", aggregate_csv(exact.aggregates, star.profit));
    BoundReport breport = verify_bounds(star.profit, exact.aggregates, bounds);

    if (est) {
        const double scaled = args.scaled_budget ? scaled_budget(spec.b_av, est->rho_f)
                                                 : spec.b_av;
        const OracleResult star_scaled = compute_optimal(spec, scaled);
        const ErrorBounds eb = error_bounds(bounds, spec.v, est->rho_g, est->rho_f,
                                            static_cast<int>(spec.sites.size()), bounds.g_max);
        std::printf("scaled budget %.9f: profit_star=%.9f, revenue factor %.6f\n", scaled,
                    star_scaled.profit, eb.revenue_factor);

        const SweepResult est_sweep = sweep(spec, sweep_config(args, est));
        write_file(out / "summary_estimated.csv", summary_csv(est_sweep.rows));
        write_file(out / "aggregate_estimated.csv",
                   aggregate_csv(est_sweep.aggregates, star_scaled.profit,
                                 eb.revenue_factor * star_scaled.profit));
        const BoundReport est_report = verify_bounds(
            star.profit, est_sweep.aggregates, bounds,
            EstimationBoundInput{est->rho_g, est->rho_f, star_scaled.profit, scaled});
        breport.lines.insert(breport.lines.end(), est_report.lines.begin(),
                             est_report.lines.end());
    }

    write_file(out / "bounds.csv", bound_report_csv(breport));
    for (const auto& l : breport.lines) {
        std::printf("%-28s V=%-6s %s  lhs=%.9f rhs=%.9f margin=%.3e\n", l.name.c_str(),
                    format_double(l.v).c_str(), l.pass ? "PASS" : "FAIL", l.lhs, l.rhs,
                    l.margin);
    }
    if (!breport.ok()) {
        std::printf("bound violations detected\n");
        return kExitBoundViolation;
    }
    std::printf("all bounds hold\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asynchronous ad-investment controller: simulator, oracle and reports"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string dump_path;
    double v_override = -1;
    double b_av_override = -1;
    bool grid_check = false;

    auto* validate = app.add_subcommand("validate", "check a spec and print derived bounds");
    validate->add_option("--config", args.config_path, "system spec JSON")->required();
    validate->add_option("--dump-normalized", dump_path, "write the normalized spec here");

    auto* simulate = app.add_subcommand("simulate", "single seeded run, trace to CSV");
    add_run_flags(simulate, args, false);
    simulate->add_option("--v", v_override, "override the spec's V parameter");

    auto* sweep_cmd = app.add_subcommand("sweep", "replicated runs over a list of V values");
    add_run_flags(sweep_cmd, args, true);

    auto* oracle_cmd = app.add_subcommand("oracle", "optimal stationary randomized policy");
    oracle_cmd->add_option("--config", args.config_path, "system spec JSON")->required();
    oracle_cmd->add_option("--b-av", b_av_override, "override the budget");
    oracle_cmd->add_option("--out", args.out_dir, "output directory (default out)");
    oracle_cmd->add_flag("--grid-check", grid_check, "also run the exhaustive grid search");

    auto* report_cmd =
        app.add_subcommand("report", "sweep + oracle + theoretical bound verification");
    add_run_flags(report_cmd, args, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(args.config_path, dump_path);
        if (simulate->parsed()) return cmd_simulate(args, v_override);
        if (sweep_cmd->parsed()) return cmd_sweep(args);
        if (oracle_cmd->parsed()) return cmd_oracle(args, b_av_override, grid_check);
        if (report_cmd->parsed()) return cmd_report(args);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitRuntime;
}
