#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "adinvest/config_io.hpp"
#include "helpers.hpp"

using namespace adinvest;
using testutil::two_site_system;

namespace {

const std::filesystem::path kConfigDir = ADINVEST_CONFIG_DIR;

}  // namespace

TEST_CASE("the bundled two-site config matches the in-code system") {
    const SystemSpec loaded = load_system(kConfigDir / "two_site.json");
    const SystemSpec built = two_site_system(20.0);
    CHECK(loaded == built);
    CHECK(validate_spec(loaded).ok());
}

TEST_CASE("normalized dumps reload to an identical spec") {
    const SystemSpec spec = load_system(kConfigDir / "two_site.json");
    const nlohmann::json dump = normalized_json(spec);
    const SystemSpec reloaded = parse_system(nlohmann::json::parse(dump.dump()));
    CHECK(reloaded == spec);

    // And the dump is a fixed point.
    CHECK(normalized_json(reloaded) == dump);
}

TEST_CASE("table-form sites resolve per-action values") {
    const nlohmann::json doc = {
        {"b_av", 0.5},
        {"v", 10},
        {"sites",
         {{{"id", 1},
           {"actions",
            {{{"p", 0}, {"t_freeze", 2}, {"m", 1}}, {{"p", 3}, {"t_freeze", 0}, {"m", 1}}}},
           {"table",
            {{{"p", 0}, {"m", 1}, {"F", 0}, {"G", 0}},
             {{"p", 3}, {"m", 1}, {"F", 12.5}, {"G", 4.25}}}}}}}};
    const SystemSpec spec = parse_system(doc);
    REQUIRE(spec.sites.size() == 1);
    CHECK(eval_F(spec.sites[0], 3, 1) == 12.5);
    CHECK(eval_G(spec.sites[0], 3, 1) == 4.25);
    CHECK(spec.sites[0].noise.duration_halfwidth == 0.0);
}

TEST_CASE("config errors carry locations") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "adinvest_test";
    fs::create_directories(dir);

    {
        std::ofstream out(dir / "broken.json");
        out << "{ \"b_av\": 0.2, ";
    }
    CHECK_THROWS_AS(load_system(dir / "broken.json"), ConfigError);
    try {
        load_system(dir / "broken.json");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("broken.json") != std::string::npos);
    }

    CHECK_THROWS_AS(load_system(dir / "absent.json"), ConfigError);

    // Missing required field.
    CHECK_THROWS_AS(parse_system(nlohmann::json{{"v", 1}}), ConfigError);

    // Table not covering an action.
    nlohmann::json incomplete = {
        {"b_av", 0.5},
        {"v", 10},
        {"sites",
         {{{"id", 1},
           {"actions", {{{"p", 3}, {"t_freeze", 0}, {"m", 1}}}},
           {"table", {{{"p", 4}, {"m", 1}, {"F", 1}, {"G", 1}}}}}}}};
    CHECK_THROWS_AS(parse_system(incomplete), ConfigError);

    // Neither closed form nor table.
    nlohmann::json bare = {
        {"b_av", 0.5},
        {"v", 10},
        {"sites", {{{"id", 1}, {"actions", {{{"p", 3}, {"t_freeze", 0}, {"m", 1}}}}}}}};
    CHECK_THROWS_AS(parse_system(bare), ConfigError);
}

TEST_CASE("estimation blocks parse all three modes") {
    const EstimationSetup minus = load_estimation(kConfigDir / "estimation_minus.json");
    CHECK(minus.rho_g == 0.05);
    CHECK(minus.rho_f == 0.1);
    CHECK(minus.mode == PerturbMode::Minus);

    const EstimationSetup plus = load_estimation(kConfigDir / "estimation_plus.json");
    CHECK(plus.mode == PerturbMode::Plus);

    const nlohmann::json per_action = {
        {"rho_g", 0.1},
        {"rho_f", 0.2},
        {"mode", "per_action"},
        {"factors", {{{"f", {1.1, 0.9}}, {"g", {1.0, 1.05}}}}}};
    const EstimationSetup pa = parse_estimation(per_action);
    CHECK(pa.mode == PerturbMode::PerAction);
    REQUIRE(pa.factors.f_factor.size() == 1);
    CHECK(pa.factors.f_factor[0] == std::vector<double>{1.1, 0.9});
    CHECK(pa.factors.g_factor[0] == std::vector<double>{1.0, 1.05});

    CHECK_THROWS_AS(parse_estimation(nlohmann::json{{"rho_g", 0.1}, {"rho_f", 0.1},
                                                    {"mode", "sideways"}}),
                    ConfigError);
}
