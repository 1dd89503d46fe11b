// Fruitchain model.
//
// Each round yields a fruit (probability f/(f+1)) or a block (1/(f+1)). A fruit
// hangs from the block its miner was extending. A block at height h embeds
// fruits whose anchor lies on its own chain at height >= h - K (K is the
// freshness window) and that no ancestor embedded already. Fork choice is plain
// block count.

#pragma once

#include <cstdint>
#include <string_view>

#include "smsim/ledger.hpp"

namespace smsim::fruitchain {

enum class Preset : std::uint8_t {
    Balanced,    // block reward 1, fruit reward 1/f: blocks earn half the total
    FruitHeavy,  // block reward 1, fruit reward 1: blocks earn 1/(f+1) of the total
    Custom,
};

struct Params {
    std::uint32_t fruit_ratio = 10;
    std::uint32_t freshness_window = 10;
    double block_reward = 1.0;
    double fruit_reward = 0.1;
    Preset preset = Preset::Balanced;

    static Params balanced(std::uint32_t fruit_ratio = 10, std::uint32_t freshness_window = 10);
    static Params fruit_heavy(std::uint32_t fruit_ratio = 10, std::uint32_t freshness_window = 10);

    void validate() const;
};

std::string_view to_string(Preset preset);
Preset parse_preset(std::string_view name);

enum class ArtifactKind : std::uint8_t { Fruit, Block };

ChainRules rules(const Params& params);

// Block when u < 1/(f+1).
ArtifactKind sample_artifact_kind(std::uint32_t fruit_ratio, double u);

// Appends a block on `parent` embedding every fresh, not yet embedded fruit the
// policy admits. Stale fruits are never eligible again.
BlockId assemble_block(Ledger& ledger, BlockId parent, MinerId miner, bool published, EmbedPolicy policy);

RewardShares reward_shares(const Ledger& ledger, BlockId canonical_tip, std::size_t miner_count);

}  // namespace smsim::fruitchain
