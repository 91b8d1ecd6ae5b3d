#include "adinvest/csv.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>

namespace adinvest {

std::string format_double(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

std::string trace_csv(const Trace& trace, const SystemSpec& spec) {
    std::string out =
        "t_d,delta,site,p,t_freeze,m,q_before,q_after,A,mu,actual_T_ad,actual_R\n";
    // Decision records are appended one per updating site, interval by
    // interval, so a running index walks them in lockstep. The final decision
    // group has no following interval and is not emitted.
    std::size_t di = 0;
    for (const auto& iv : trace.intervals) {
        for (std::size_t k = 0; k < iv.updating.size(); ++k, ++di) {
            const auto& d = trace.decisions[di];
            out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", format_double(iv.t),
                               format_double(iv.delta), spec.sites[d.site].id,
                               format_double(d.action.p), format_double(d.action.t_freeze),
                               format_double(d.action.m), format_double(iv.q_before),
                               format_double(iv.q_after), format_double(iv.consumed),
                               format_double(iv.allowed), format_double(d.ad_duration),
                               format_double(d.revenue));
        }
    }
    return out;
}

std::string summary_csv(const std::vector<SweepRow>& rows) {
    std::string out = "V,replication,seed,profit_av,expenditure_av,avg_q,max_q,frames_total\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", format_double(r.v), r.replication,
                           r.seed, format_double(r.profit_av), format_double(r.expenditure_av),
                           format_double(r.avg_q), format_double(r.max_q), r.frames_total);
    }
    return out;
}

std::string aggregate_csv(const std::vector<VAggregate>& aggregates, double profit_star,
                          double profit_floor) {
    std::string out =
        "V,replications,profit_mean,profit_stderr,expenditure_mean,expenditure_max,"
        "avg_q_mean,max_q_max,frames_mean";
    const bool with_star = profit_star >= 0.0;
    if (with_star) out += ",profit_star,profit_floor";
    out += "\n";
    for (const auto& a : aggregates) {
        out += fmt::format("{},{},{},{},{},{},{},{},{}", format_double(a.v), a.replications,
                           format_double(a.profit_mean), format_double(a.profit_stderr),
                           format_double(a.expenditure_mean), format_double(a.expenditure_max),
                           format_double(a.avg_q_mean), format_double(a.max_q_max),
                           format_double(a.frames_mean));
        if (with_star) {
            out += fmt::format(",{},{}", format_double(profit_star),
                               profit_floor >= 0.0 ? format_double(profit_floor) : "");
        }
        out += "\n";
    }
    return out;
}

std::string bound_report_csv(const BoundReport& report) {
    std::string out = "check,V,lhs,rhs,margin,pass\n";
    for (const auto& l : report.lines) {
        out += fmt::format("{},{},{},{},{},{}\n", l.name, format_double(l.v),
                           format_double(l.lhs), format_double(l.rhs), format_double(l.margin),
                           l.pass ? "1" : "0");
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot open {} for writing", path.string()));
    }
    out << content;
    if (!out) {
        throw Error(fmt::format("failed writing {}", path.string()));
    }
}

}  // namespace adinvest
