#include "smsim/fruitchain.hpp"

#include <cmath>
#include <string>

namespace smsim::fruitchain {

Params Params::balanced(std::uint32_t fruit_ratio, std::uint32_t freshness_window) {
    Params p;
    p.fruit_ratio = fruit_ratio;
    p.freshness_window = freshness_window;
    p.block_reward = 1.0;
    p.fruit_reward = 1.0 / fruit_ratio;
    p.preset = Preset::Balanced;
    return p;
}

Params Params::fruit_heavy(std::uint32_t fruit_ratio, std::uint32_t freshness_window) {
    Params p;
    p.fruit_ratio = fruit_ratio;
    p.freshness_window = freshness_window;
    p.block_reward = 1.0;
    p.fruit_reward = 1.0;
    p.preset = Preset::FruitHeavy;
    return p;
}

void Params::validate() const {
    if (fruit_ratio < 1) throw ConfigError("protocol_params.fruit_ratio: must be >= 1");
    if (freshness_window < 1) throw ConfigError("protocol_params.freshness_window: must be >= 1");
    if (!(block_reward > 0.0) || !std::isfinite(block_reward)) {
        throw ConfigError("protocol_params.block_reward: must be positive");
    }
    if (!(fruit_reward > 0.0) || !std::isfinite(fruit_reward)) {
        throw ConfigError("protocol_params.fruit_reward: must be positive");
    }
}

std::string_view to_string(Preset preset) {
    switch (preset) {
        case Preset::Balanced: return "balanced";
        case Preset::FruitHeavy: return "fruit_heavy";
        case Preset::Custom: return "custom";
    }
    return "custom";
}

Preset parse_preset(std::string_view name) {
    if (name == "balanced") return Preset::Balanced;
    if (name == "fruit_heavy") return Preset::FruitHeavy;
    if (name == "custom") return Preset::Custom;
    throw ConfigError("protocol_params.preset: unknown preset '" + std::string(name) + "'");
}

ChainRules rules(const Params& params) {
    params.validate();
    ChainRules r;
    r.block_units = 1;
    r.side_units = 0;
    r.quantum = 1;
    r.block_reward = params.block_reward;
    r.side_reward = params.fruit_reward;
    r.side_kind = SideKind::Fruit;
    r.embed_depth = params.freshness_window;
    r.pay_pending_on_tip = false;
    return r;
}

ArtifactKind sample_artifact_kind(std::uint32_t fruit_ratio, double u) {
    if (fruit_ratio < 1) throw std::invalid_argument("sample_artifact_kind: fruit ratio must be >= 1");
    return u * (fruit_ratio + 1.0) < 1.0 ? ArtifactKind::Block : ArtifactKind::Fruit;
}

BlockId assemble_block(Ledger& ledger, BlockId parent, MinerId miner, bool published, EmbedPolicy policy) {
    return ledger.append_block(parent, miner, published, policy);
}

RewardShares reward_shares(const Ledger& ledger, BlockId canonical_tip, std::size_t miner_count) {
    return to_shares(ledger.tally(canonical_tip, miner_count));
}

}  // namespace smsim::fruitchain
