#include "catch_amalgamated.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "smsim/io.hpp"

using namespace smsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("smsim_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

const json kMinimal = json::parse(R"({"protocol": "nakamoto",
  "miners": [{"power": 0.3, "kind": "selfish"}, {"power": 0.7}]})");

}  // namespace

TEST_CASE("minimal config gets defaults", "[io]") {
    const auto cfg = parse_config(kMinimal);
    const auto& plan = std::get<SimulatePlan>(cfg);
    CHECK(plan.repeats == 5);
    CHECK(plan.config.rounds == 100'000);
    CHECK(plan.config.gamma == 0.5);
    CHECK(plan.config.master_seed == 0);
    REQUIRE(plan.config.miners.size() == 2);
    CHECK(plan.config.miners[0].kind == MinerKind::Selfish);
    CHECK(plan.config.miners[1].kind == MinerKind::Honest);
    CHECK(plan.config.miners[1].id == 1);
}

TEST_CASE("protocol specific defaults", "[io]") {
    auto doc = kMinimal;
    doc["protocol"] = "strongchain";
    const auto s = std::get<SimulatePlan>(parse_config(doc));
    CHECK(std::get<strongchain::Params>(s.config.protocol_params).ratio == 10);
    CHECK(s.config.gamma == 0.0);

    doc["protocol"] = "fruitchain";
    const auto f = std::get<SimulatePlan>(parse_config(doc));
    const auto& p = std::get<fruitchain::Params>(f.config.protocol_params);
    CHECK(p.preset == fruitchain::Preset::Balanced);
    CHECK(p.fruit_ratio == 10);
    CHECK(p.freshness_window == 10);
}

TEST_CASE("config errors name the offending key", "[io]") {
    auto doc = kMinimal;
    doc["miners"][1]["power"] = 0.6;
    CHECK_THROWS_WITH(parse_config(doc, "run.json"), Catch::Matchers::ContainsSubstring("run.json") &&
                                                         Catch::Matchers::ContainsSubstring("miners"));

    doc = kMinimal;
    doc["gama"] = 0.5;
    CHECK_THROWS_WITH(parse_config(doc), Catch::Matchers::ContainsSubstring("gama"));

    doc = kMinimal;
    doc["gamma"] = 1.5;
    CHECK_THROWS_WITH(parse_config(doc), Catch::Matchers::ContainsSubstring("gamma"));

    doc = kMinimal;
    doc["protocol"] = "bitcoin";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = kMinimal;
    doc["protocol_params"] = {{"ratio", 10}};
    CHECK_THROWS_WITH(parse_config(doc), Catch::Matchers::ContainsSubstring("protocol_params.ratio"));

    doc = kMinimal;
    doc["sweep"] = {{"alpha_grid", {0.1, 0.2}}};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);

    doc = kMinimal;
    doc["rounds"] = -5;
    CHECK_THROWS_WITH(parse_config(doc), Catch::Matchers::ContainsSubstring("rounds"));

    doc = kMinimal;
    doc["end_condition"] = {{"target_height", 100}};
    CHECK_THROWS_WITH(parse_config(doc), Catch::Matchers::ContainsSubstring("target_height"));

    CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
}

TEST_CASE("config files", "[io]") {
    TempDir dir("cfg");
    {
        std::ofstream(dir.path / "bad.json") << "{\"protocol\": ";
        std::ofstream(dir.path / "good.json") << kMinimal.dump();
    }
    CHECK_THROWS_WITH(parse_config_file(dir.path / "bad.json"), Catch::Matchers::ContainsSubstring("malformed JSON"));
    CHECK_THROWS_AS(parse_config_file(dir.path / "missing.json"), ConfigError);
    CHECK(std::holds_alternative<SimulatePlan>(parse_config_file(dir.path / "good.json")));
}

TEST_CASE("sweep configs", "[io]") {
    const auto doc = json::parse(R"({"protocol": "fruitchain", "gamma": 1, "seed": 9, "repeats": 3,
      "sweep": {"alpha_grid": {"start": 0.1, "stop": 0.2, "step": 0.05}, "fixed_rivals": [0.3]},
      "protocol_params": {"preset": "fruit_heavy"}})");
    const auto s = std::get<SweepConfig>(parse_config(doc));
    CHECK(s.alpha_grid == std::vector<double>{0.1, 0.15, 0.2});
    CHECK(s.fixed_rivals == std::vector<double>{0.3});
    CHECK(s.repeats == 3);
    CHECK(s.base.master_seed == 9);
    CHECK(std::get<fruitchain::Params>(s.base.protocol_params).fruit_reward == 1.0);
    CHECK(threshold_key(s) == "fruitchain/gamma=1/k=2/rivals=0.3/preset=fruit_heavy");
    CHECK(series_name(s) == "fruitchain_gamma=1_k=2_rivals=0.3_preset=fruit_heavy");
}

TEST_CASE("canonical JSON round-trips", "[io]") {
    const std::vector<json> docs{
        kMinimal,
        json::parse(R"({"protocol": "strongchain", "rounds": 777, "seed": 3, "protocol_params": {"ratio": 4},
          "miners": [{"power": 0.25, "kind": "selfish"}, {"power": 0.25, "kind": "selfish"}, {"power": 0.5}]})"),
        json::parse(R"({"protocol": "fruitchain", "end_condition": {"target_height": 50},
          "protocol_params": {"preset": "custom", "block_reward": 2, "fruit_reward": 0.5},
          "sweep": {"alpha_grid": [0.1, 0.2], "attackers": 2, "refine": true}})"),
    };
    for (const auto& d : docs) {
        const auto canonical = to_json(parse_config(d));
        CHECK(to_json(parse_config(canonical)) == canonical);
        CHECK(experiment_digest(parse_config(canonical)) == experiment_digest(parse_config(d)));
    }
}

TEST_CASE("seed overrides leave the digest alone", "[io]") {
    auto cfg = parse_config(kMinimal);
    const auto d = experiment_digest(cfg);
    set_master_seed(cfg, 77);
    CHECK(master_seed(cfg) == 77);
    CHECK(experiment_digest(cfg) == d);
    auto other = kMinimal;
    other["gamma"] = 0.25;
    CHECK(experiment_digest(parse_config(other)) != d);
}

TEST_CASE("results.csv matches the golden schema", "[io]") {
    const std::vector<ResultRow> rows{
        {Protocol::Nakamoto, 0.5, 1, "0.3", 0, 100'000, 42, 0, MinerKind::Selfish, 0.312345678, 0.3},
        {Protocol::Nakamoto, 0.5, 1, "0.3", 0, 100'000, 42, 1, MinerKind::Honest, 0.687654322, 0.7},
        {Protocol::Strongchain, 0.0, 2, "0.2;0.4", 3, 5'000, UINT64_MAX, 1, MinerKind::Selfish, 0.0, 0.4},
    };
    TempDir dir("golden");
    write_results(rows, {}, {}, dir.path, 1, 2);
    CHECK(slurp(dir.path / "results.csv") == slurp(fs::path(SMSIM_GOLDEN_DIR) / "results_schema.csv"));
}

TEST_CASE("rows for a run carry power and attacker info", "[io]") {
    SimulationConfig c;
    c.miners = {{0, 0.2, MinerKind::Selfish}, {1, 0.4, MinerKind::Selfish}, {2, 0.4, MinerKind::Honest}};
    const std::vector<double> rev{0.1, 0.5, 0.4};
    const auto rows = rows_for_run(c, 2, 99, rev);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].alpha_per_attacker == "0.2;0.4");
    CHECK(rows[2].n_attackers == 2);
    CHECK(rows[1].fair_share == 0.4);
    CHECK(rows[1].revenue == 0.5);
    CHECK(rows[1].seed == 99);
    CHECK_THROWS_AS(rows_for_run(c, 0, 0, std::vector<double>{1.0}), InternalError);
}

TEST_CASE("output files and manifest", "[io]") {
    TempDir dir("outputs");
    ThresholdEstimate e;
    e.threshold = 0.25;
    e.bracket = {0.24, 0.26};
    const std::vector<NamedThreshold> named{{"nakamoto/gamma=0.5/k=1", e}};
    const std::vector<PlotSeries> series{{"nakamoto_gamma=0.5_k=1", {{0.24, 0.23, 0.22, 0.24}}}};
    const auto m = write_results({}, named, series, dir.path, 0xABCDEF, 5);
    CHECK(m.outputs == std::vector<std::string>{"results.csv", "thresholds.json", "plotdata/nakamoto_gamma=0.5_k=1.csv",
                                                 "manifest.json"});
    const auto manifest = json::parse(slurp(dir.path / "manifest.json"));
    CHECK(manifest["config_digest"] == "0000000000abcdef");
    CHECK(manifest["master_seed"] == 5);
    CHECK(manifest["tool_version"] == kToolVersion);
    const auto th = json::parse(slurp(dir.path / "thresholds.json"));
    CHECK(th["nakamoto/gamma=0.5/k=1"]["threshold"] == 0.25);
    CHECK(slurp(dir.path / "plotdata" / "nakamoto_gamma=0.5_k=1.csv") ==
          "alpha,mean_revenue,min_revenue,max_revenue,fair_share\n0.24,0.23000000,0.22000000,0.24000000,0.24\n");
}

TEST_CASE("empty results produce header-only CSV and empty thresholds", "[io]") {
    TempDir dir("empty");
    write_results({}, {}, {}, dir.path, 0, 0);
    CHECK(slurp(dir.path / "results.csv") == std::string(kResultsHeader) + "\n");
    CHECK(json::parse(slurp(dir.path / "thresholds.json")) == json::object());
    CHECK_FALSE(fs::exists(dir.path / "plotdata"));
}

TEST_CASE("a failed write leaves no partial outputs", "[io]") {
    TempDir dir("partial");
    std::ofstream(dir.path / "plotdata") << "in the way";
    const std::vector<PlotSeries> series{{"s", {{0.1, 0.1, 0.1, 0.1}}}};
    CHECK_THROWS(write_results({}, {}, series, dir.path, 0, 0));
    CHECK_FALSE(fs::exists(dir.path / "results.csv"));
    CHECK_FALSE(fs::exists(dir.path / "thresholds.json"));
    CHECK_FALSE(fs::exists(dir.path / "manifest.json"));
    CHECK(fs::is_regular_file(dir.path / "plotdata"));
}
