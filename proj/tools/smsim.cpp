// smsim: selfish-mining simulator command line.
//
//   smsim simulate         --config run.json   [--seed N] [--out DIR] [--jobs J]
//   smsim sweep            --config sweep.json [--seed N] [--out DIR] [--jobs J]
//   smsim reproduce-table1 [--seed N] [--out DIR] [--jobs J] [--rounds R] [--repeats K]
//
// Errors go to stderr as one JSON object {"error": kind, "message": ...} and
// the exit code is nonzero (2 config, 3 I/O, 4 internal, 64 usage).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "smsim/io.hpp"
#include "smsim/rng.hpp"
#include "smsim/table1.hpp"

namespace {

using namespace smsim;
namespace fs = std::filesystem;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    unsigned jobs = 0;
};

int fail(const char* kind, const std::string& message, int code) {
    nlohmann::json e{{"error", kind}, {"message", message}};
    std::fprintf(stderr, "%s\n", e.dump().c_str());
    return code;
}

ExperimentConfig load(const Common& c) {
    auto cfg = parse_config_file(c.config);
    if (c.seed) set_master_seed(cfg, *c.seed);
    return cfg;
}

void print_manifest(const RunManifest& m, const fs::path& out) {
    std::printf("wrote %zu files to %s (digest %016llx, seed %llu)\n", m.outputs.size(), out.string().c_str(),
                static_cast<unsigned long long>(m.config_digest), static_cast<unsigned long long>(m.master_seed));
}

std::string pct(const std::optional<double>& v) {
    if (!v) return "none";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", *v * 100.0);
    return buf;
}

int cmd_simulate(const Common& c) {
    auto cfg = load(c);
    auto* plan = std::get_if<SimulatePlan>(&cfg);
    if (!plan) throw ConfigError(c.config + ": miners: 'simulate' needs a miners list (use 'sweep' for sweep configs)");

    const auto runs = run_repeats(plan->config, plan->repeats, c.jobs);
    std::vector<ResultRow> rows;
    std::vector<double> mean(plan->config.miners.size(), 0.0);
    for (std::size_t r = 0; r < runs.size(); ++r) {
        auto more = rows_for_run(plan->config, static_cast<std::uint32_t>(r), runs[r].seed, runs[r].revenue);
        rows.insert(rows.end(), more.begin(), more.end());
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += runs[r].revenue[i] / static_cast<double>(runs.size());
    }

    std::printf("%s gamma=%g rounds=%llu repeats=%u\n", std::string(to_string(plan->config.protocol)).c_str(),
                plan->config.gamma, static_cast<unsigned long long>(plan->config.rounds), plan->repeats);
    std::printf("%-6s %-8s %10s %10s %10s\n", "miner", "kind", "power", "revenue", "surplus");
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const auto& m = plan->config.miners[i];
        std::printf("%-6u %-8s %10.4f %10.4f %+10.4f\n", m.id, std::string(to_string(m.kind)).c_str(), m.power,
                    mean[i], mean[i] - m.power);
    }
    const auto manifest = write_results(rows, {}, {}, c.out, experiment_digest(cfg), master_seed(cfg));
    print_manifest(manifest, c.out);
    return 0;
}

int cmd_sweep(const Common& c) {
    auto cfg = load(c);
    auto* sweep = std::get_if<SweepConfig>(&cfg);
    if (!sweep) throw ConfigError(c.config + ": sweep: 'sweep' needs a sweep block (use 'simulate' for miners lists)");
    sweep->jobs = c.jobs;

    const auto outcome = sweep_threshold(*sweep);
    const auto& t = outcome.threshold;
    std::printf("%-8s %10s %10s\n", "alpha", "revenue", "surplus");
    for (const auto& p : outcome.points) {
        std::printf("%-8.3f %10.4f %+10.4f\n", p.alpha, p.mean_revenue, p.mean_revenue - p.alpha);
    }
    std::printf("threshold %s  bracket [%.3f, %.3f]  ci95 [%.4f, %.4f]%s%s\n", pct(t.threshold).c_str(),
                t.bracket.first, t.bracket.second, t.ci95.first, t.ci95.second,
                t.crossing_confirmed ? "  confirmed" : "", t.at_grid_start ? "  (at grid start)" : "");

    const auto rows = rows_for_sweep(*sweep, outcome.points);
    const std::vector<NamedThreshold> named{{threshold_key(*sweep), t}};
    const std::vector<PlotSeries> series{make_series(series_name(*sweep), outcome.points)};
    const auto manifest = write_results(rows, named, series, c.out, experiment_digest(cfg), master_seed(cfg));
    print_manifest(manifest, c.out);
    return 0;
}

int cmd_table1(const Common& c, std::uint64_t rounds, std::uint32_t repeats) {
    const std::uint64_t seed = c.seed.value_or(2024);
    auto suite = table1_suite(seed);

    std::vector<ResultRow> rows;
    std::vector<NamedThreshold> named;
    std::vector<PlotSeries> series;
    std::string digest_input;
    int misses = 0;

    std::printf("%-12s %5s %3s %9s %11s %7s\n", "protocol", "gamma", "k", "threshold", "reference", "status");
    for (auto& cell : suite) {
        cell.sweep.jobs = c.jobs;
        cell.sweep.rounds = rounds;
        cell.sweep.repeats = repeats;
        const auto t0 = std::chrono::steady_clock::now();
        const auto outcome = sweep_threshold(cell.sweep);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const auto& th = outcome.threshold.threshold;
        const bool ok = th && std::abs(*th - cell.reference) <= cell.tolerance + 1e-12;
        misses += ok ? 0 : 1;
        char ref[32];
        std::snprintf(ref, sizeof ref, "%.1f±%.1f%%", cell.reference * 100, cell.tolerance * 100);
        std::printf("%-12s %5g %3u %9s %11s %7s  (%.1fs)\n", std::string(to_string(cell.sweep.base.protocol)).c_str(),
                    cell.sweep.base.gamma, attacker_count(cell.sweep), pct(th).c_str(), ref, ok ? "ok" : "MISS", secs);
        std::fflush(stdout);

        auto more = rows_for_sweep(cell.sweep, outcome.points);
        rows.insert(rows.end(), more.begin(), more.end());
        named.push_back({threshold_key(cell.sweep), outcome.threshold});
        series.push_back(make_series(series_name(cell.sweep), outcome.points));
        digest_input += to_json(ExperimentConfig{cell.sweep}).dump();
    }
    const auto manifest = write_results(rows, named, series, c.out, fnv1a64(digest_input), seed);
    print_manifest(manifest, c.out);
    std::printf("%d of %zu cells outside the reference band\n", misses, suite.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo selfish-mining simulator (Nakamoto, Strongchain, Fruitchain)"};
    app.require_subcommand(1);

    Common common;
    std::uint64_t seed_value = 0;
    std::uint64_t table_rounds = 100'000;
    std::uint32_t table_repeats = 5;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", common.config, "JSON experiment config");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed_value, "master seed (overrides the config)");
        sub->add_option("--out", common.out, "output directory")->capture_default_str();
        sub->add_option("--jobs", common.jobs, "worker threads, 0 = all cores")->capture_default_str();
    };

    auto* simulate = app.add_subcommand("simulate", "run one config `repeats` times");
    add_common(simulate, true);
    auto* sweep = app.add_subcommand("sweep", "sweep attacker power and estimate the profitability threshold");
    add_common(sweep, true);
    auto* table1 = app.add_subcommand("reproduce-table1", "run the full threshold table");
    add_common(table1, false);
    table1->add_option("--rounds", table_rounds, "rounds per run")->capture_default_str()->check(CLI::PositiveNumber);
    table1->add_option("--repeats", table_repeats, "runs per grid point")->capture_default_str()->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 64);
    }

    for (auto* sub : {simulate, sweep, table1}) {
        if (sub->parsed() && sub->count("--seed") > 0) common.seed = seed_value;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(common);
        if (sweep->parsed()) return cmd_sweep(common);
        return cmd_table1(common, table_rounds, table_repeats);
    } catch (const ConfigError& e) {
        return fail("config", e.what(), 2);
    } catch (const InternalError& e) {
        return fail("internal", e.what(), 4);
    } catch (const std::exception& e) {
        return fail("io", e.what(), 3);
    }
}
