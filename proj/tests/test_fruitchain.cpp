#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>

#include "smsim/fruitchain.hpp"
#include "smsim/rng.hpp"
#include "smsim/strategy.hpp"

using namespace smsim;

namespace {

// Public chain of `n` blocks by miner 0 on top of `from`.
BlockId grow(Ledger& l, BlockId from, int n) {
    for (int i = 0; i < n; ++i) from = l.append_block(from, 0, true, EmbedPolicy::Published);
    return from;
}

}  // namespace

TEST_CASE("fruit at distance K is fresh, K+1 is stale", "[fruitchain]") {
    const auto params = fruitchain::Params::balanced(10, 10);
    for (const int extra : {0, 1}) {
        Ledger l(fruitchain::rules(params));
        const auto anchor = grow(l, kGenesis, 3);
        // Withheld by miner 1, so honest blocks do not pick it up.
        const auto fruit = l.add_side(1, anchor, false);
        const auto parent = grow(l, anchor, 9 + extra);
        const auto b = fruitchain::assemble_block(l, parent, 1, true, EmbedPolicy::Own);
        const auto distance = l.block(b).height - l.block(anchor).height;
        CHECK(distance == static_cast<unsigned>(10 + extra));
        const bool embedded = std::find(l.block(b).embedded.begin(), l.block(b).embedded.end(), fruit) !=
                              l.block(b).embedded.end();
        CHECK(embedded == (extra == 0));
    }
}

TEST_CASE("fruits are embedded at most once along a chain", "[fruitchain]") {
    Ledger l(fruitchain::rules(fruitchain::Params::balanced()));
    const auto f = l.add_side(1, kGenesis, true);
    const auto b1 = l.append_block(kGenesis, 0, true, EmbedPolicy::Published);
    const auto b2 = l.append_block(b1, 0, true, EmbedPolicy::Published);
    CHECK(l.block(b1).embedded == std::vector<std::uint32_t>{f});
    CHECK(l.block(b2).embedded.empty());
    // A competing branch may embed it again.
    const auto c1 = l.append_block(kGenesis, 2, true, EmbedPolicy::Published);
    CHECK(l.block(c1).embedded == std::vector<std::uint32_t>{f});
    const auto audit = audit_side_artifacts(l, b2);
    CHECK(audit.duplicates == 0);
    CHECK(audit.embedded == 1);
}

TEST_CASE("honest fruits on an overridden branch are lost", "[fruitchain]") {
    Ledger l(fruitchain::rules(fruitchain::Params::balanced()));
    PublicState pub;
    AttackerState eve;
    eve.owner = 0;
    // Round 1: attacker mines a private block. Round 2: honest block, then an
    // honest fruit hanging from it. Round 3: attacker mines again and overrides.
    eve.private_tip = l.append_block(kGenesis, 0, false, EmbedPolicy::Own);
    const auto h = l.append_block(kGenesis, 1, true, EmbedPolicy::Published);
    pub.add(l, h, std::nullopt);
    const auto fruit = l.add_side(1, h, true);
    eve.private_tip = l.append_block(eve.private_tip, 0, false, EmbedPolicy::Own);
    std::vector<AttackerState> attackers{eve};
    flush_private(l, pub, attackers);

    REQUIRE(pub.primary() == attackers[0].private_tip);
    const auto tip = l.append_block(pub.primary(), 1, true, EmbedPolicy::Published);
    CHECK(std::find(l.block(tip).embedded.begin(), l.block(tip).embedded.end(), fruit) == l.block(tip).embedded.end());
    const auto shares = fruitchain::reward_shares(l, tip, 2);
    CHECK(shares.rewards[1] == Catch::Approx(1.0));  // only the last block, no fruit
    CHECK(audit_side_artifacts(l, tip).discarded == 1);
}

TEST_CASE("reward presets", "[fruitchain]") {
    for (const auto& [params, block_share] :
         {std::pair{fruitchain::Params::balanced(), 0.5}, std::pair{fruitchain::Params::fruit_heavy(), 1.0 / 11.0}}) {
        Ledger l(fruitchain::rules(params));
        for (MinerId m = 1; m <= 10; ++m) l.add_side(m, kGenesis, true);
        const auto b = fruitchain::assemble_block(l, kGenesis, 0, true, EmbedPolicy::Published);
        const auto s = fruitchain::reward_shares(l, b, 11);
        CHECK(s.shares[0] == Catch::Approx(block_share));
    }
    CHECK(1.0 / 11.0 == Catch::Approx(0.0909).margin(1e-4));
}

TEST_CASE("fruit sampling frequencies", "[fruitchain]") {
    CHECK(fruitchain::sample_artifact_kind(1, 0.3) == fruitchain::ArtifactKind::Block);
    CHECK(fruitchain::sample_artifact_kind(1, 0.7) == fruitchain::ArtifactKind::Fruit);
    SplitMix64 g(17);
    const int n = 100'000;
    int fruits = 0;
    for (int i = 0; i < n; ++i) fruits += fruitchain::sample_artifact_kind(10, g.uniform()) == fruitchain::ArtifactKind::Fruit;
    const double p = 10.0 / 11.0;
    CHECK(std::abs(fruits - n * p) <= 3 * std::sqrt(n * p * (1 - p)));
}

TEST_CASE("parameter validation", "[fruitchain]") {
    auto p = fruitchain::Params::balanced();
    p.fruit_reward = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = fruitchain::Params::balanced();
    p.freshness_window = 0;
    CHECK_THROWS_AS(fruitchain::rules(p), ConfigError);
    CHECK(fruitchain::parse_preset("fruit_heavy") == fruitchain::Preset::FruitHeavy);
    CHECK_THROWS_AS(fruitchain::parse_preset("juicy"), ConfigError);
}
