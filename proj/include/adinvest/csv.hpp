#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "adinvest/oracle.hpp"
#include "adinvest/simulator.hpp"

namespace adinvest {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

/// Columns: t_d,delta,site,p,t_freeze,m,q_before,q_after,A,mu,actual_T_ad,actual_R.
/// One row per (decision point, updating site); the final decision group has
/// no following interval and is omitted.
std::string trace_csv(const Trace& trace, const SystemSpec& spec);

/// Columns: V,replication,seed,profit_av,expenditure_av,avg_q,max_q,frames_total.
std::string summary_csv(const std::vector<SweepRow>& rows);

/// Columns: V,replications,profit_mean,profit_stderr,expenditure_mean,
/// expenditure_max,avg_q_mean,max_q_max,frames_mean[,profit_star,profit_floor].
std::string aggregate_csv(const std::vector<VAggregate>& aggregates,
                          double profit_star = -1.0, double profit_floor = -1.0);

std::string bound_report_csv(const BoundReport& report);

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace adinvest
