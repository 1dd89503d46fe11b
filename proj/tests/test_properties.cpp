#include "catch_amalgamated.hpp"

#include <numeric>

#include "helpers.hpp"
#include "smsim/rng.hpp"
#include "smsim/strategy.hpp"

using namespace smsim;

namespace {

// Random miner set: 0..4 attackers plus at least one honest miner.
SimulationConfig random_config(SplitMix64& g, Protocol protocol, std::uint64_t rounds) {
    const auto attackers = static_cast<std::size_t>(g.below(5));
    std::vector<double> w(attackers + 1);
    for (auto& x : w) x = 0.05 + g.uniform();
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<double> selfish;
    double used = 0.0;
    for (std::size_t i = 0; i < attackers; ++i) {
        selfish.push_back(w[i] / total);
        used += selfish.back();
    }
    const double gamma = static_cast<double>(g.below(3)) / 2.0;
    return testing::make_config(protocol, selfish, 1.0 - used, gamma, rounds, g.next());
}

}  // namespace

TEST_CASE("revenue sums to one and side artifacts are conserved", "[properties]") {
    SplitMix64 g(99);
    for (const auto protocol : {Protocol::Nakamoto, Protocol::Strongchain, Protocol::Fruitchain}) {
        for (int trial = 0; trial < 40; ++trial) {
            const auto cfg = random_config(g, protocol, 5'000);
            CAPTURE(to_string(protocol), trial, cfg.miners.size(), cfg.gamma);
            SimulationResult r;
            REQUIRE_NOTHROW(r = run_simulation(cfg));
            const double sum = std::accumulate(r.revenue.begin(), r.revenue.end(), 0.0);
            CHECK(sum == Catch::Approx(1.0).margin(1e-9));
            for (const double x : r.revenue) CHECK(x >= 0.0);
            CHECK(r.blocks_mined + r.side_mined == r.rounds_executed);
            if (protocol != Protocol::Nakamoto) {
                const auto& a = r.side_audit;
                CHECK(a.mined == r.side_mined);
                CHECK(a.duplicates == 0);
                CHECK(a.stale == 0);
                CHECK(a.embedded + a.pending + a.discarded == a.mined);
            }
        }
    }
}

TEST_CASE("tie weights are normalized", "[properties]") {
    SplitMix64 g(5);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<std::size_t>(2 + g.below(5));
        std::vector<double> w(n + 1);
        for (auto& x : w) x = 0.01 + g.uniform();
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        std::vector<MinerSpec> miners;
        for (std::size_t i = 0; i <= n; ++i) {
            miners.push_back(MinerSpec{static_cast<MinerId>(i), w[i] / total, i < n ? MinerKind::Selfish : MinerKind::Honest});
        }
        TieContext tie;
        const auto branches = static_cast<std::size_t>(2 + g.below(n - 1));
        for (std::size_t b = 0; b < branches; ++b) {
            // Branch 0 is honest about half of the time.
            std::optional<MinerId> owner = static_cast<MinerId>(b);
            if (b == 0 && g.below(2) == 0) owner.reset();
            tie.branches.push_back(TieBranch{static_cast<BlockId>(b + 1), owner});
        }
        const double gamma = g.uniform();
        const auto weights = resolve_match_weights(tie, miners, gamma);
        const auto split = honest_split(tie, gamma);
        CHECK(std::accumulate(weights.begin(), weights.end(), 0.0) == Catch::Approx(1.0).margin(1e-12));
        CHECK(std::accumulate(split.begin(), split.end(), 0.0) == Catch::Approx(1.0).margin(1e-12));
        for (const double x : weights) CHECK(x >= 0.0);
    }
}

TEST_CASE("cascades terminate in long multi-attacker runs", "[properties]") {
    SplitMix64 g(31);
    for (const auto protocol : {Protocol::Nakamoto, Protocol::Strongchain, Protocol::Fruitchain}) {
        auto cfg = testing::make_config(protocol, {0.15, 0.15, 0.15, 0.15, 0.15}, 0.25, 0.5, 50'000, g.next());
        SimulationResult r;
        REQUIRE_NOTHROW(r = run_simulation(cfg));
        CHECK(r.rounds_executed == 50'000);
        CHECK(r.max_cascade_steps > 0);
    }
}

TEST_CASE("all-honest runs are fair for random power vectors", "[properties]") {
    SplitMix64 g(404);
    for (const auto protocol : {Protocol::Nakamoto, Protocol::Strongchain, Protocol::Fruitchain}) {
        auto cfg = testing::make_config(protocol, {}, 0.0, 0.5, 100'000, g.next());
        std::vector<double> w(4);
        for (auto& x : w) x = 0.05 + g.uniform();
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < w.size(); ++i) {
            cfg.miners.push_back(MinerSpec{static_cast<MinerId>(i), w[i] / total, MinerKind::Honest});
        }
        const auto m = testing::mean_revenue(cfg);
        for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(m[i] - cfg.miners[i].power) <= 0.01);
    }
}
