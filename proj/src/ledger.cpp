#include "smsim/ledger.hpp"

#include <algorithm>
#include <string>

namespace smsim {

Ledger::Ledger(ChainRules rules) : rules_(rules) {
    if (rules_.block_units <= 0 || rules_.quantum <= 0 || rules_.side_units < 0) {
        throw ConfigError("protocol_params: strength units must be positive");
    }
    if (rules_.embed_depth == 0) throw ConfigError("protocol_params: embed depth must be >= 1");
    blocks_.reserve(1 << 14);
    BlockNode genesis;
    genesis.published = true;
    blocks_.push_back(std::move(genesis));
}

bool Ledger::is_ancestor(BlockId ancestor, BlockId tip) const {
    const auto target = blocks_.at(ancestor).height;
    while (blocks_[tip].height > target) tip = blocks_[tip].parent;
    return tip == ancestor;
}

std::vector<std::uint32_t> Ledger::embeddable(BlockId parent, MinerId miner,
                                              EmbedPolicy policy) const {
    std::vector<std::uint32_t> out;
    if (!rules_.side_kind) return out;

    BlockId anchor = parent;
    for (std::uint32_t depth = 0; depth < rules_.embed_depth; ++depth) {
        for (const std::uint32_t id : blocks_[anchor].hanging) {
            const auto& s = sides_[id];
            const bool own = s.miner == miner;
            const bool eligible = policy == EmbedPolicy::Published ? s.published
                                  : policy == EmbedPolicy::Own     ? own
                                                                   : (own || s.published);
            if (!eligible) continue;
            const bool already = std::any_of(s.embedded_in.begin(), s.embedded_in.end(),
                                             [&](BlockId b) { return is_ancestor(b, parent); });
            if (!already) out.push_back(id);
        }
        if (anchor == kGenesis) break;
        anchor = blocks_[anchor].parent;
    }
    std::sort(out.begin(), out.end());
    return out;
}

BlockId Ledger::append_block(BlockId parent, MinerId miner, bool published, EmbedPolicy policy) {
    if (parent >= blocks_.size()) throw InternalError("append_block: unknown parent");
    BlockNode node;
    node.parent = parent;
    node.height = blocks_[parent].height + 1;
    node.miner = miner;
    node.published = published;
    node.embedded = embeddable(parent, miner, policy);
    node.strength = blocks_[parent].strength + rules_.block_units +
                    rules_.side_units * static_cast<Strength>(node.embedded.size());

    const auto id = static_cast<BlockId>(blocks_.size());
    for (const auto s : node.embedded) {
        sides_[s].embedded_in.push_back(id);
        if (published) sides_[s].published = true;
    }
    blocks_.push_back(std::move(node));
    return id;
}

std::uint32_t Ledger::add_side(MinerId miner, BlockId anchor, bool published) {
    if (!rules_.side_kind) throw InternalError("add_side: protocol has no side artifacts");
    if (anchor >= blocks_.size()) throw InternalError("add_side: unknown anchor");
    const auto id = static_cast<std::uint32_t>(sides_.size());
    sides_.push_back(SideArtifact{*rules_.side_kind, miner, anchor, published, {}});
    blocks_[anchor].hanging.push_back(id);
    return id;
}

Strength Ledger::tip_strength(BlockId tip, MinerId viewer) const {
    const auto& b = blocks_.at(tip);
    Strength s = b.strength;
    if (rules_.side_units > 0) {
        for (const auto id : b.hanging) {
            const auto& a = sides_[id];
            if (a.published || a.miner == viewer) s += rules_.side_units;
        }
    }
    return s;
}

std::size_t Ledger::publish_chain(BlockId tip) {
    std::size_t n = 0;
    while (!blocks_.at(tip).published) {
        auto& b = blocks_[tip];
        b.published = true;
        for (const auto s : b.embedded) sides_[s].published = true;
        ++n;
        tip = b.parent;
    }
    return n;
}

void Ledger::publish_side(std::uint32_t id) { sides_.at(id).published = true; }

RewardTally Ledger::tally(BlockId tip, std::size_t miner_count) const {
    RewardTally t;
    t.rewards.assign(miner_count, 0.0);
    auto pay = [&](MinerId m, double amount) {
        if (m >= miner_count) throw InternalError("tally: miner id " + std::to_string(m) + " out of range");
        t.rewards[m] += amount;
    };
    if (rules_.pay_pending_on_tip) {
        for (const auto id : blocks_.at(tip).hanging) {
            if (!sides_[id].published) continue;
            pay(sides_[id].miner, rules_.side_reward);
            ++t.side_artifacts;
        }
    }
    for (BlockId b = tip; b != kGenesis; b = blocks_[b].parent) {
        const auto& node = blocks_[b];
        pay(node.miner, rules_.block_reward);
        ++t.blocks;
        for (const auto id : node.embedded) {
            pay(sides_[id].miner, rules_.side_reward);
            ++t.side_artifacts;
        }
    }
    // Sum in id order so the total does not depend on chain walk order.
    for (const double r : t.rewards) t.total += r;
    return t;
}

RewardShares to_shares(const RewardTally& tally) {
    RewardShares out;
    out.rewards = tally.rewards;
    out.total = tally.total;
    out.shares.assign(tally.rewards.size(), 0.0);
    out.degenerate = !(tally.total > 0.0);
    if (!out.degenerate) {
        for (std::size_t i = 0; i < out.rewards.size(); ++i) out.shares[i] = out.rewards[i] / out.total;
    }
    return out;
}

SideAudit audit_side_artifacts(const Ledger& ledger, BlockId tip) {
    SideAudit a;
    a.mined = ledger.side_count();
    std::vector<std::uint8_t> times_embedded(ledger.side_count(), 0);
    const auto depth = ledger.rules().embed_depth;

    for (BlockId b = tip; b != kGenesis; b = ledger.block(b).parent) {
        const auto& node = ledger.block(b);
        for (const auto id : node.embedded) {
            const auto& s = ledger.side(id);
            if (times_embedded[id] < 255) ++times_embedded[id];
            const auto anchor_height = ledger.block(s.anchor).height;
            if (anchor_height >= node.height || node.height - anchor_height > depth ||
                !ledger.is_ancestor(s.anchor, node.parent)) {
                ++a.stale;
            }
        }
    }
    const auto next_height = ledger.block(tip).height + 1;
    for (std::uint32_t id = 0; id < ledger.side_count(); ++id) {
        if (times_embedded[id] > 0) {
            ++a.embedded;
            if (times_embedded[id] > 1) ++a.duplicates;
            continue;
        }
        const auto& s = ledger.side(id);
        if (next_height - ledger.block(s.anchor).height <= depth && ledger.is_ancestor(s.anchor, tip)) {
            ++a.pending;
        } else {
            ++a.discarded;
        }
    }
    return a;
}

}  // namespace smsim
