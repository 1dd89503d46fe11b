// Config ingestion and result emission.
//
// Config schema (JSON object):
//   protocol         "nakamoto" | "strongchain" | "fruitchain"          required
//   miners           [{"power": p, "kind": "honest"|"selfish"}, ...]    one of miners / sweep
//   sweep            {"alpha_grid": [..] | {"start","stop","step"},
//                     "attackers": k, "fixed_rivals": [..], "refine": bool}
//   gamma            [0,1]            default 0 for strongchain, 0.5 otherwise
//   rounds           default 100000
//   repeats          default 5
//   seed             default 0
//   protocol_params  strongchain: {"ratio"}
//                    fruitchain:  {"preset", "fruit_ratio", "freshness_window",
//                                  "block_reward", "fruit_reward"}
//   end_condition    "round_budget" | {"target_height": h}   (fruitchain only)

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "smsim/engine.hpp"
#include "smsim/experiments.hpp"

namespace smsim {

inline constexpr const char* kToolVersion = "1.0.0";

// One config evaluated `repeats` times.
struct SimulatePlan {
    SimulationConfig config;
    std::uint32_t repeats = 5;
};

using ExperimentConfig = std::variant<SimulatePlan, SweepConfig>;

// `source` prefixes error messages (usually the file path). Errors are
// ConfigError with "<source>: <key>: <reason>".
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& source = "config");
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Canonical form: every key present, defaults materialized. parse_config of
// the result reproduces the input.
nlohmann::json to_json(const ExperimentConfig& config);

std::uint64_t experiment_digest(const ExperimentConfig& config);
std::uint64_t master_seed(const ExperimentConfig& config);
void set_master_seed(ExperimentConfig& config, std::uint64_t seed);

struct ResultRow {
    Protocol protocol = Protocol::Nakamoto;
    double gamma = 0.0;
    std::uint32_t n_attackers = 0;
    std::string alpha_per_attacker;  // one value, or ';'-joined attacker powers when asymmetric
    std::uint32_t run_index = 0;
    std::uint64_t rounds = 0;
    std::uint64_t seed = 0;
    MinerId miner_id = 0;
    MinerKind miner_kind = MinerKind::Honest;
    double revenue = 0.0;
    double fair_share = 0.0;
};

inline constexpr const char* kResultsHeader =
    "protocol,gamma,n_attackers,alpha_per_attacker,run_index,rounds,seed,miner_id,miner_kind,revenue,fair_share";

std::string format_row(const ResultRow& row);

// Rows for one run of `config`, one per miner.
std::vector<ResultRow> rows_for_run(const SimulationConfig& config, std::uint32_t run_index, std::uint64_t seed,
                                    std::span<const double> revenue);
std::vector<ResultRow> rows_for_sweep(const SweepConfig& sweep, std::span<const RevenuePoint> points);

struct SeriesPoint {
    double alpha = 0.0;
    double mean_revenue = 0.0;
    double min_revenue = 0.0;
    double max_revenue = 0.0;
};

// A revenue-vs-alpha curve for attacker 1, written to plotdata/<name>.csv.
struct PlotSeries {
    std::string name;
    std::vector<SeriesPoint> points;
};

PlotSeries make_series(const std::string& name, std::span<const RevenuePoint> points);

struct NamedThreshold {
    std::string key;  // e.g. "nakamoto/gamma=0.5/k=1"
    ThresholdEstimate estimate;
};

std::string threshold_key(const SweepConfig& sweep);
std::string series_name(const SweepConfig& sweep);

struct RunManifest {
    std::string tool_version = kToolVersion;
    std::uint64_t config_digest = 0;
    std::uint64_t master_seed = 0;
    std::string timestamp;  // UTC, ISO 8601
    std::vector<std::string> outputs;
};

nlohmann::json thresholds_json(std::span<const NamedThreshold> thresholds);

// Writes results.csv, thresholds.json, plotdata/*.csv and manifest.json under
// out_dir. On failure every file this call created is removed and the error is
// rethrown as std::runtime_error naming the path.
RunManifest write_results(std::span<const ResultRow> rows, std::span<const NamedThreshold> thresholds,
                          std::span<const PlotSeries> series, const std::filesystem::path& out_dir,
                          std::uint64_t config_digest, std::uint64_t master_seed);

}  // namespace smsim
