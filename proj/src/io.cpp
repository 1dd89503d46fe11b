#include "smsim/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "smsim/rng.hpp"

namespace smsim {

using nlohmann::json;

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

// Up to six decimals, trailing zeros trimmed: 0.5, 0.25, 0.333333.
std::string short_num(double v) {
    std::string s = fmt("%.6f", v);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
}

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        throw ConfigError(source_ + ": " + key + ": " + why);
    }

    const json* find(const json& obj, const char* key) const {
        const auto it = obj.find(key);
        return it == obj.end() || it->is_null() ? nullptr : &*it;
    }

    double number(const json& v, const std::string& key) const {
        if (!v.is_number()) fail(key, "expected a number");
        return v.get<double>();
    }

    std::uint64_t count(const json& v, const std::string& key) const {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) {
            if (v.get<std::int64_t>() < 0) fail(key, "must not be negative");
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        }
        fail(key, "expected a non-negative integer");
    }

    std::string text(const json& v, const std::string& key) const {
        if (!v.is_string()) fail(key, "expected a string");
        return v.get<std::string>();
    }

    template <class F>
    auto guard(const std::string& key, F&& f) const {
        try {
            return f();
        } catch (const ConfigError& e) {
            fail(key, e.what());
        }
    }

    std::string source_;
};

ProtocolParams parse_params(const Reader& rd, Protocol protocol, const json* p) {
    if (p && !p->is_object()) rd.fail("protocol_params", "expected an object");
    const json empty = json::object();
    const json& obj = p ? *p : empty;
    auto known = [&](std::initializer_list<const char*> keys) {
        for (const auto& [k, v] : obj.items()) {
            if (std::none_of(keys.begin(), keys.end(), [&](const char* x) { return k == x; })) {
                rd.fail("protocol_params." + k, "unknown key for protocol '" + std::string(to_string(protocol)) + "'");
            }
        }
    };
    switch (protocol) {
        case Protocol::Nakamoto:
            known({});
            return std::monostate{};
        case Protocol::Strongchain: {
            known({"ratio"});
            strongchain::Params sp;
            if (const auto* v = rd.find(obj, "ratio")) {
                const auto r = rd.count(*v, "protocol_params.ratio");
                if (r == 0 || r > 1'000'000) rd.fail("protocol_params.ratio", "must lie in [1, 1000000]");
                sp.ratio = static_cast<std::uint32_t>(r);
            }
            return sp;
        }
        case Protocol::Fruitchain: {
            known({"preset", "fruit_ratio", "freshness_window", "block_reward", "fruit_reward"});
            std::uint32_t f = 10, k = 10;
            if (const auto* v = rd.find(obj, "fruit_ratio")) {
                const auto x = rd.count(*v, "protocol_params.fruit_ratio");
                if (x == 0 || x > 1'000'000) rd.fail("protocol_params.fruit_ratio", "must lie in [1, 1000000]");
                f = static_cast<std::uint32_t>(x);
            }
            if (const auto* v = rd.find(obj, "freshness_window")) {
                const auto x = rd.count(*v, "protocol_params.freshness_window");
                if (x == 0 || x > 1'000'000) rd.fail("protocol_params.freshness_window", "must lie in [1, 1000000]");
                k = static_cast<std::uint32_t>(x);
            }
            auto preset = fruitchain::Preset::Balanced;
            if (const auto* v = rd.find(obj, "preset")) {
                preset = rd.guard("protocol_params.preset",
                                  [&] { return fruitchain::parse_preset(rd.text(*v, "protocol_params.preset")); });
            }
            fruitchain::Params fp = preset == fruitchain::Preset::FruitHeavy ? fruitchain::Params::fruit_heavy(f, k)
                                                                             : fruitchain::Params::balanced(f, k);
            const auto* b = rd.find(obj, "block_reward");
            const auto* r = rd.find(obj, "fruit_reward");
            if (preset == fruitchain::Preset::Custom && (!b || !r)) {
                rd.fail("protocol_params", "preset 'custom' needs block_reward and fruit_reward");
            }
            if (b) fp.block_reward = rd.number(*b, "protocol_params.block_reward");
            if (r) fp.fruit_reward = rd.number(*r, "protocol_params.fruit_reward");
            const auto as_preset = preset == fruitchain::Preset::FruitHeavy ? fruitchain::Params::fruit_heavy(f, k)
                                                                            : fruitchain::Params::balanced(f, k);
            fp.preset = preset != fruitchain::Preset::Custom && fp.block_reward == as_preset.block_reward &&
                                fp.fruit_reward == as_preset.fruit_reward
                            ? preset
                            : fruitchain::Preset::Custom;
            rd.guard("protocol_params", [&] {
                fp.validate();
                return 0;
            });
            return fp;
        }
    }
    rd.fail("protocol", "unknown");
}

std::vector<double> parse_grid(const Reader& rd, const json& g) {
    if (g.is_array()) {
        std::vector<double> out;
        for (std::size_t i = 0; i < g.size(); ++i) {
            out.push_back(rd.number(g[i], "sweep.alpha_grid[" + std::to_string(i) + "]"));
        }
        return out;
    }
    if (g.is_object()) {
        auto get = [&](const char* key, double fallback) {
            const auto* v = rd.find(g, key);
            return v ? rd.number(*v, std::string("sweep.alpha_grid.") + key) : fallback;
        };
        const double start = get("start", 0.01), stop = get("stop", 0.5), step = get("step", 0.01);
        return rd.guard("sweep.alpha_grid", [&] { return make_grid(start, stop, step); });
    }
    rd.fail("sweep.alpha_grid", "expected an array or {start, stop, step}");
}

json params_json(const ProtocolParams& params) {
    if (const auto* p = std::get_if<strongchain::Params>(&params)) return json{{"ratio", p->ratio}};
    if (const auto* p = std::get_if<fruitchain::Params>(&params)) {
        return json{{"preset", std::string(fruitchain::to_string(p->preset))},
                    {"fruit_ratio", p->fruit_ratio},
                    {"freshness_window", p->freshness_window},
                    {"block_reward", p->block_reward},
                    {"fruit_reward", p->fruit_reward}};
    }
    return json::object();
}

json base_json(const SimulationConfig& c) {
    json j;
    j["protocol"] = std::string(to_string(c.protocol));
    j["gamma"] = c.gamma;
    j["rounds"] = c.rounds;
    j["seed"] = c.master_seed;
    j["protocol_params"] = params_json(c.protocol_params);
    if (c.end_condition == EndCondition::TargetHeight) {
        j["end_condition"] = json{{"target_height", c.target_height}};
    } else {
        j["end_condition"] = "round_budget";
    }
    return j;
}

std::string attacker_powers(std::span<const MinerSpec> miners) {
    std::vector<double> powers;
    for (const auto& m : miners) {
        if (m.kind == MinerKind::Selfish) powers.push_back(m.power);
    }
    if (powers.empty()) return "0";
    const bool symmetric = std::all_of(powers.begin(), powers.end(), [&](double p) { return p == powers.front(); });
    if (symmetric) return short_num(powers.front());
    std::string s;
    for (std::size_t i = 0; i < powers.size(); ++i) {
        if (i) s += ';';
        s += short_num(powers[i]);
    }
    return s;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const std::string& source) {
    const Reader rd(source);
    if (!doc.is_object()) rd.fail("(root)", "expected a JSON object");
    static const std::set<std::string> keys{"protocol", "miners",          "sweep",        "gamma", "rounds",
                                            "repeats",  "protocol_params", "end_condition", "seed"};
    for (const auto& [k, v] : doc.items()) {
        if (!keys.contains(k)) rd.fail(k, "unknown key");
    }

    const auto* proto = rd.find(doc, "protocol");
    if (!proto) rd.fail("protocol", "required");
    SimulationConfig base;
    base.protocol = rd.guard("protocol", [&] { return parse_protocol(rd.text(*proto, "protocol")); });
    base.protocol_params = parse_params(rd, base.protocol, rd.find(doc, "protocol_params"));
    base.gamma = default_gamma(base.protocol);
    if (const auto* v = rd.find(doc, "gamma")) base.gamma = rd.number(*v, "gamma");
    if (!(base.gamma >= 0.0 && base.gamma <= 1.0)) rd.fail("gamma", "must lie in [0, 1]");
    if (const auto* v = rd.find(doc, "rounds")) base.rounds = rd.count(*v, "rounds");
    if (base.rounds == 0) rd.fail("rounds", "must be positive");
    if (const auto* v = rd.find(doc, "seed")) base.master_seed = rd.count(*v, "seed");
    std::uint32_t repeats = 5;
    if (const auto* v = rd.find(doc, "repeats")) {
        const auto r = rd.count(*v, "repeats");
        if (r == 0 || r > 100'000) rd.fail("repeats", "must lie in [1, 100000]");
        repeats = static_cast<std::uint32_t>(r);
    }
    if (const auto* v = rd.find(doc, "end_condition")) {
        if (v->is_string() && v->get<std::string>() == "round_budget") {
            base.end_condition = EndCondition::RoundBudget;
        } else if (v->is_object() && v->contains("target_height")) {
            base.end_condition = EndCondition::TargetHeight;
            base.target_height = rd.count((*v)["target_height"], "end_condition.target_height");
        } else {
            rd.fail("end_condition", "expected \"round_budget\" or {\"target_height\": h}");
        }
    }

    const auto* miners = rd.find(doc, "miners");
    const auto* sweep = rd.find(doc, "sweep");
    if (!miners == !sweep) rd.fail("miners", "exactly one of 'miners' or 'sweep' is required");

    if (miners) {
        if (!miners->is_array() || miners->empty()) rd.fail("miners", "expected a non-empty array");
        for (std::size_t i = 0; i < miners->size(); ++i) {
            const auto& m = (*miners)[i];
            const std::string key = "miners[" + std::to_string(i) + "]";
            if (!m.is_object()) rd.fail(key, "expected an object");
            MinerSpec spec;
            spec.id = static_cast<MinerId>(i);
            const auto* p = rd.find(m, "power");
            if (!p) rd.fail(key + ".power", "required");
            spec.power = rd.number(*p, key + ".power");
            if (const auto* k = rd.find(m, "kind")) {
                spec.kind = rd.guard(key + ".kind", [&] { return parse_miner_kind(rd.text(*k, key + ".kind")); });
            }
            if (const auto* id = rd.find(m, "id"); id && rd.count(*id, key + ".id") != i) {
                rd.fail(key + ".id", "ids must be 0..n-1 in order");
            }
            base.miners.push_back(spec);
        }
        SimulatePlan plan{base, repeats};
        try {
            validate(plan.config);
        } catch (const ConfigError& e) {
            throw ConfigError(source + ": " + e.what());
        }
        return plan;
    }

    if (!sweep->is_object()) rd.fail("sweep", "expected an object");
    SweepConfig sc;
    sc.base = base;
    sc.repeats = repeats;
    sc.rounds = base.rounds;
    for (const auto& [k, v] : sweep->items()) {
        if (k != "alpha_grid" && k != "attackers" && k != "fixed_rivals" && k != "refine") {
            rd.fail("sweep." + k, "unknown key");
        }
    }
    const auto* grid = rd.find(*sweep, "alpha_grid");
    sc.alpha_grid = grid ? parse_grid(rd, *grid) : make_grid(0.01, 0.5, 0.01);
    if (const auto* v = rd.find(*sweep, "attackers")) {
        const auto k = rd.count(*v, "sweep.attackers");
        if (k == 0 || k > 1000) rd.fail("sweep.attackers", "must lie in [1, 1000]");
        sc.symmetric_attackers = static_cast<std::uint32_t>(k);
    }
    if (const auto* v = rd.find(*sweep, "fixed_rivals")) {
        if (!v->is_array()) rd.fail("sweep.fixed_rivals", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            sc.fixed_rivals.push_back(rd.number((*v)[i], "sweep.fixed_rivals[" + std::to_string(i) + "]"));
        }
    }
    if (const auto* v = rd.find(*sweep, "refine")) {
        if (!v->is_boolean()) rd.fail("sweep.refine", "expected a boolean");
        sc.refine = v->get<bool>();
    }
    // Messages from validate already name the sweep key.
    try {
        validate(sc);
        validate(point_config(sc, sc.alpha_grid.front()));
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return sc;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": malformed JSON: " + e.what());
    }
    return parse_config(doc, path.string());
}

json to_json(const ExperimentConfig& config) {
    if (const auto* plan = std::get_if<SimulatePlan>(&config)) {
        json j = base_json(plan->config);
        j["repeats"] = plan->repeats;
        json miners = json::array();
        for (const auto& m : plan->config.miners) {
            miners.push_back(json{{"power", m.power}, {"kind", std::string(to_string(m.kind))}});
        }
        j["miners"] = miners;
        return j;
    }
    const auto& sc = std::get<SweepConfig>(config);
    SimulationConfig base = sc.base;
    base.rounds = sc.rounds;
    json j = base_json(base);
    j["repeats"] = sc.repeats;
    j["sweep"] = json{{"alpha_grid", sc.alpha_grid},
                      {"attackers", sc.symmetric_attackers},
                      {"fixed_rivals", sc.fixed_rivals},
                      {"refine", sc.refine}};
    return j;
}

std::uint64_t experiment_digest(const ExperimentConfig& config) {
    json j = to_json(config);
    j.erase("seed");
    return fnv1a64(j.dump());
}

std::uint64_t master_seed(const ExperimentConfig& config) {
    return std::visit(
        [](const auto& c) {
            if constexpr (std::is_same_v<std::decay_t<decltype(c)>, SimulatePlan>) return c.config.master_seed;
            else return c.base.master_seed;
        },
        config);
}

void set_master_seed(ExperimentConfig& config, std::uint64_t seed) {
    std::visit(
        [seed](auto& c) {
            if constexpr (std::is_same_v<std::decay_t<decltype(c)>, SimulatePlan>) c.config.master_seed = seed;
            else c.base.master_seed = seed;
        },
        config);
}

std::string format_row(const ResultRow& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, ",%" PRIu32 ",%" PRIu64 ",%" PRIu64 ",%" PRIu32 ",", r.run_index, r.rounds,
                  r.seed, r.miner_id);
    std::string s;
    s += to_string(r.protocol);
    s += ',' + short_num(r.gamma) + ',' + std::to_string(r.n_attackers) + ',' + r.alpha_per_attacker;
    s += buf;
    s += to_string(r.miner_kind);
    s += ',' + fmt("%.8f", r.revenue) + ',' + fmt("%.8f", r.fair_share);
    return s;
}

std::vector<ResultRow> rows_for_run(const SimulationConfig& config, std::uint32_t run_index, std::uint64_t seed,
                                    std::span<const double> revenue) {
    if (revenue.size() != config.miners.size()) throw InternalError("rows_for_run: revenue size mismatch");
    std::vector<ResultRow> rows;
    const auto attackers = static_cast<std::uint32_t>(selfish_count(config.miners));
    const auto alphas = attacker_powers(config.miners);
    for (std::size_t i = 0; i < config.miners.size(); ++i) {
        const auto& m = config.miners[i];
        rows.push_back(ResultRow{config.protocol, config.gamma, attackers, alphas, run_index, config.rounds, seed,
                                 m.id, m.kind, revenue[i], m.power});
    }
    return rows;
}

std::vector<ResultRow> rows_for_sweep(const SweepConfig& sweep, std::span<const RevenuePoint> points) {
    std::vector<ResultRow> rows;
    for (const auto& p : points) {
        const auto cfg = point_config(sweep, p.alpha);
        for (std::size_t r = 0; r < p.runs.size(); ++r) {
            auto more = rows_for_run(cfg, static_cast<std::uint32_t>(r), p.runs[r].seed, p.runs[r].revenue);
            rows.insert(rows.end(), more.begin(), more.end());
        }
    }
    return rows;
}

PlotSeries make_series(const std::string& name, std::span<const RevenuePoint> points) {
    PlotSeries s{name, {}};
    for (const auto& p : points) {
        const auto [lo, hi] = std::minmax_element(p.run_revenues.begin(), p.run_revenues.end());
        s.points.push_back(SeriesPoint{p.alpha, p.mean_revenue, p.run_revenues.empty() ? 0.0 : *lo,
                                       p.run_revenues.empty() ? 0.0 : *hi});
    }
    return s;
}

std::string threshold_key(const SweepConfig& sweep) {
    std::string key = std::string(to_string(sweep.base.protocol)) + "/gamma=" + short_num(sweep.base.gamma) +
                      "/k=" + std::to_string(attacker_count(sweep));
    if (!sweep.fixed_rivals.empty()) {
        key += "/rivals=";
        for (std::size_t i = 0; i < sweep.fixed_rivals.size(); ++i) {
            if (i) key += ';';
            key += short_num(sweep.fixed_rivals[i]);
        }
    }
    if (const auto* p = std::get_if<fruitchain::Params>(&sweep.base.protocol_params);
        p && p->preset != fruitchain::Preset::Balanced) {
        key += "/preset=" + std::string(fruitchain::to_string(p->preset));
    }
    return key;
}

std::string series_name(const SweepConfig& sweep) {
    std::string name = threshold_key(sweep);
    for (auto& c : name) {
        if (c == '/' || c == ';') c = '_';
    }
    return name;
}

json thresholds_json(std::span<const NamedThreshold> thresholds) {
    json out = json::object();
    for (const auto& t : thresholds) {
        const auto& e = t.estimate;
        out[t.key] = json{{"threshold", e.threshold ? json(*e.threshold) : json(nullptr)},
                          {"bracket", {e.bracket.first, e.bracket.second}},
                          {"ci95", {e.ci95.first, e.ci95.second}},
                          {"crossing_confirmed", e.crossing_confirmed},
                          {"at_grid_start", e.at_grid_start}};
    }
    return out;
}

RunManifest write_results(std::span<const ResultRow> rows, std::span<const NamedThreshold> thresholds,
                          std::span<const PlotSeries> series, const std::filesystem::path& out_dir,
                          std::uint64_t config_digest, std::uint64_t master_seed) {
    namespace fs = std::filesystem;
    RunManifest manifest;
    manifest.config_digest = config_digest;
    manifest.master_seed = master_seed;
    manifest.timestamp = utc_now();

    std::vector<fs::path> created;
    bool made_plotdir = false;
    auto write_file = [&](const fs::path& path, const std::string& body) {
        created.push_back(path);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
        out.close();
        if (!out) throw std::runtime_error(path.string() + ": write failed");
        manifest.outputs.push_back(fs::relative(path, out_dir).generic_string());
    };

    try {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw std::runtime_error(out_dir.string() + ": " + ec.message());

        std::string csv = std::string(kResultsHeader) + "\n";
        for (const auto& r : rows) csv += format_row(r) + "\n";
        write_file(out_dir / "results.csv", csv);

        write_file(out_dir / "thresholds.json", thresholds_json(thresholds).dump(2) + "\n");

        if (!series.empty()) {
            const auto dir = out_dir / "plotdata";
            if (!fs::exists(dir)) {
                fs::create_directories(dir, ec);
                if (ec) throw std::runtime_error(dir.string() + ": " + ec.message());
                made_plotdir = true;
            }
            for (const auto& s : series) {
                std::string body = "alpha,mean_revenue,min_revenue,max_revenue,fair_share\n";
                for (const auto& p : s.points) {
                    body += short_num(p.alpha) + ',' + fmt("%.8f", p.mean_revenue) + ',' + fmt("%.8f", p.min_revenue) +
                            ',' + fmt("%.8f", p.max_revenue) + ',' + short_num(p.alpha) + "\n";
                }
                write_file(dir / (s.name + ".csv"), body);
            }
        }

        json m{{"tool_version", manifest.tool_version},
               {"config_digest", hex64(manifest.config_digest)},
               {"master_seed", manifest.master_seed},
               {"timestamp", manifest.timestamp},
               {"outputs", manifest.outputs}};
        write_file(out_dir / "manifest.json", m.dump(2) + "\n");
    } catch (...) {
        std::error_code ignore;
        for (const auto& p : created) fs::remove(p, ignore);
        if (made_plotdir) fs::remove(out_dir / "plotdata", ignore);
        throw;
    }
    return manifest;
}

}  // namespace smsim
