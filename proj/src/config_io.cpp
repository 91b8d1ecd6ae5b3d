#include "adinvest/config_io.hpp"

#include <fmt/format.h>
#include <fstream>
#include <map>

namespace adinvest {

namespace {

using nlohmann::json;

double need_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        throw ConfigError(fmt::format("{}: missing or non-numeric field \"{}\"", where, key));
    }
    return obj[key].get<double>();
}

const json& need_array(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_array()) {
        throw ConfigError(fmt::format("{}: missing or non-array field \"{}\"", where, key));
    }
    return obj[key];
}

SiteSpec parse_site(const json& doc, std::size_t idx) {
    const std::string where = fmt::format("sites[{}]", idx);
    if (!doc.is_object()) throw ConfigError(where + ": expected an object");

    SiteSpec site;
    site.id = doc.contains("id") ? doc["id"].get<int>() : static_cast<int>(idx + 1);

    if (doc.contains("noise")) {
        const auto& n = doc["noise"];
        site.noise.duration_halfwidth = need_number(n, "duration_halfwidth", where + ".noise");
        site.noise.revenue_halfwidth = need_number(n, "revenue_halfwidth", where + ".noise");
    }

    std::vector<ActionTriple> actions;
    for (const auto& a : need_array(doc, "actions", where)) {
        const std::string aw = where + ".actions";
        actions.push_back({need_number(a, "p", aw), need_number(a, "t_freeze", aw),
                           need_number(a, "m", aw)});
    }

    if (doc.contains("kappa")) {
        const double kappa = need_number(doc, "kappa", where);
        const double gamma = need_number(doc, "gamma", where);
        const double q = need_number(doc, "q", where);
        return make_site(
            site.id, std::move(actions),
            [kappa](double p, double m) { return power_law_duration(kappa, p, m); },
            [gamma, q](double p, double m) { return sqrt_revenue(gamma, q, p, m); },
            site.noise);
    }

    if (!doc.contains("table")) {
        throw ConfigError(where +
                          ": need either closed-form parameters {kappa, gamma, q} or a table");
    }
    std::map<std::pair<double, double>, std::pair<double, double>> table;
    for (const auto& row : need_array(doc, "table", where)) {
        const std::string tw = where + ".table";
        table[{need_number(row, "p", tw), need_number(row, "m", tw)}] = {
            need_number(row, "F", tw), need_number(row, "G", tw)};
    }
    site.actions = std::move(actions);
    for (const auto& a : site.actions) {
        auto it = table.find({a.p, a.m});
        if (it == table.end()) {
            throw ConfigError(fmt::format("{}: table has no entry for (p={}, m={})", where, a.p,
                                          a.m));
        }
        site.f.push_back(it->second.first);
        site.g.push_back(it->second.second);
    }
    return site;
}

}  // namespace

SystemSpec parse_system(const json& doc) {
    if (!doc.is_object()) throw ConfigError("top level: expected an object");
    SystemSpec spec;
    spec.b_av = need_number(doc, "b_av", "top level");
    spec.v = need_number(doc, "v", "top level");
    const auto& sites = need_array(doc, "sites", "top level");
    for (std::size_t i = 0; i < sites.size(); ++i) {
        spec.sites.push_back(parse_site(sites[i], i));
    }
    return spec;
}

SystemSpec load_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open {}", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    try {
        return parse_system(doc);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

nlohmann::json normalized_json(const SystemSpec& spec) {
    json doc;
    doc["b_av"] = spec.b_av;
    doc["v"] = spec.v;
    doc["sites"] = json::array();
    for (const auto& site : spec.sites) {
        json s;
        s["id"] = site.id;
        s["noise"] = {{"duration_halfwidth", site.noise.duration_halfwidth},
                      {"revenue_halfwidth", site.noise.revenue_halfwidth}};
        s["actions"] = json::array();
        for (const auto& a : site.actions) {
            s["actions"].push_back({{"p", a.p}, {"t_freeze", a.t_freeze}, {"m", a.m}});
        }
        s["table"] = json::array();
        std::map<std::pair<double, double>, bool> seen;
        for (std::size_t i = 0; i < site.actions.size(); ++i) {
            const auto key = std::make_pair(site.actions[i].p, site.actions[i].m);
            if (seen.contains(key)) continue;
            seen[key] = true;
            s["table"].push_back({{"p", site.actions[i].p},
                                  {"m", site.actions[i].m},
                                  {"F", site.f[i]},
                                  {"G", site.g[i]}});
        }
        doc["sites"].push_back(std::move(s));
    }
    return doc;
}

EstimationSetup parse_estimation(const json& doc) {
    if (!doc.is_object()) throw ConfigError("estimation: expected an object");
    EstimationSetup est;
    est.rho_g = need_number(doc, "rho_g", "estimation");
    est.rho_f = need_number(doc, "rho_f", "estimation");
    const std::string mode = doc.contains("mode") ? doc["mode"].get<std::string>() : "plus";
    if (mode == "plus") {
        est.mode = PerturbMode::Plus;
    } else if (mode == "minus") {
        est.mode = PerturbMode::Minus;
    } else if (mode == "per_action") {
        est.mode = PerturbMode::PerAction;
        for (const auto& site : need_array(doc, "factors", "estimation")) {
            std::vector<double> ff, gf;
            for (const auto& x : need_array(site, "f", "estimation.factors")) {
                ff.push_back(x.get<double>());
            }
            for (const auto& x : need_array(site, "g", "estimation.factors")) {
                gf.push_back(x.get<double>());
            }
            est.factors.f_factor.push_back(std::move(ff));
            est.factors.g_factor.push_back(std::move(gf));
        }
    } else {
        throw ConfigError(fmt::format(
            "estimation: mode must be \"plus\", \"minus\" or \"per_action\", got \"{}\"", mode));
    }
    return est;
}

EstimationSetup load_estimation(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open {}", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    return parse_estimation(doc);
}

nlohmann::json policy_json(const StationaryPolicy& policy, const SystemSpec& spec) {
    json doc = json::array();
    for (std::size_t s = 0; s < policy.weights.size(); ++s) {
        json entry;
        entry["id"] = spec.sites[s].id;
        entry["weights"] = policy.weights[s];
        json support = json::array();
        for (std::size_t i = 0; i < policy.weights[s].size(); ++i) {
            if (policy.weights[s][i] > 0.0) {
                support.push_back({{"p", spec.sites[s].actions[i].p},
                                   {"t_freeze", spec.sites[s].actions[i].t_freeze},
                                   {"m", spec.sites[s].actions[i].m},
                                   {"weight", policy.weights[s][i]}});
            }
        }
        entry["support"] = std::move(support);
        doc.push_back(std::move(entry));
    }
    return doc;
}

}  // namespace adinvest
