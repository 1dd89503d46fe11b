// Block tree shared by all protocol models.
//
// Blocks form a tree rooted at genesis. Side artifacts (Strongchain weak headers,
// Fruitchain fruits) are stored separately and reference the block they were
// mined on through `anchor`; a block that embeds them lists their ids. A side
// artifact may be embedded by blocks on several competing branches, but never
// twice along one chain.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "smsim/types.hpp"

namespace smsim {

inline constexpr MinerId kNoMiner = std::numeric_limits<MinerId>::max();

enum class SideKind : std::uint8_t { WeakHeader, Fruit };

struct SideArtifact {
    SideKind kind = SideKind::Fruit;
    MinerId miner = kNoMiner;
    BlockId anchor = kGenesis;
    bool published = false;
    std::vector<BlockId> embedded_in;
};

struct BlockNode {
    BlockId parent = kGenesis;
    std::uint32_t height = 0;
    MinerId miner = kNoMiner;
    Strength strength = 0;  // cumulative from genesis, embedded side artifacts included
    bool published = false;
    std::vector<std::uint32_t> embedded;
    std::vector<std::uint32_t> hanging;  // side artifacts anchored on this block
};

struct ChainRules {
    Strength block_units = 1;
    Strength side_units = 0;
    Strength quantum = 1;  // strength of one block, the Override margin
    double block_reward = 1.0;
    double side_reward = 0.0;
    std::optional<SideKind> side_kind;
    // Largest height difference between an embedding block and the side
    // artifact's anchor. Weak headers use 1 (embeddable only by a child).
    std::uint32_t embed_depth = 1;
    bool pay_pending_on_tip = false;
};

// Which side artifacts a new block may embed.
enum class EmbedPolicy : std::uint8_t {
    Published,        // honest miners: everything public
    Own,              // only the block miner's own artifacts
    OwnAndPublished,  // the miner's own (withheld or not) plus everything public
};

struct RewardTally {
    std::vector<double> rewards;
    double total = 0.0;
    std::uint64_t blocks = 0;
    std::uint64_t side_artifacts = 0;
};

// Per-miner rewards normalized by the total paid. `degenerate` marks a chain
// that paid nothing, in which case every share is zero.
struct RewardShares {
    std::vector<double> rewards;
    std::vector<double> shares;
    double total = 0.0;
    bool degenerate = false;
};

RewardShares to_shares(const RewardTally& tally);

// Classification of every side artifact against one chain. Each artifact lands in
// exactly one of embedded / pending / discarded. `duplicates` counts artifacts
// embedded more than once along the chain and `stale` counts embeddings that
// break the depth rule; both are zero on a well-formed chain.
struct SideAudit {
    std::uint64_t mined = 0;
    std::uint64_t embedded = 0;
    std::uint64_t pending = 0;
    std::uint64_t discarded = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t stale = 0;

    bool operator==(const SideAudit&) const = default;
};

class Ledger;
SideAudit audit_side_artifacts(const Ledger& ledger, BlockId tip);

class Ledger {
public:
    explicit Ledger(ChainRules rules);

    const ChainRules& rules() const noexcept { return rules_; }
    const BlockNode& block(BlockId id) const { return blocks_.at(id); }
    const SideArtifact& side(std::uint32_t id) const { return sides_.at(id); }
    std::size_t block_count() const noexcept { return blocks_.size(); }
    std::size_t side_count() const noexcept { return sides_.size(); }

    // True when `ancestor` lies on the chain ending at `tip` (inclusive).
    bool is_ancestor(BlockId ancestor, BlockId tip) const;

    // Side artifacts a block mined on `parent` by `miner` would embed.
    std::vector<std::uint32_t> embeddable(BlockId parent, MinerId miner, EmbedPolicy policy) const;

    BlockId append_block(BlockId parent, MinerId miner, bool published, EmbedPolicy policy);
    std::uint32_t add_side(MinerId miner, BlockId anchor, bool published);

    // Strength of the chain ending at `tip` as seen by `viewer`: the cumulative
    // block strength plus pending side artifacts on the tip that are public or
    // owned by the viewer. `kNoMiner` views only public artifacts.
    Strength tip_strength(BlockId tip, MinerId viewer = kNoMiner) const;

    // Publishes every unpublished block on the chain ending at `tip` and the side
    // artifacts they embed. Returns the number of newly published blocks.
    std::size_t publish_chain(BlockId tip);
    void publish_side(std::uint32_t id);

    // Rewards paid by the chain ending at `tip`.
    RewardTally tally(BlockId tip, std::size_t miner_count) const;

private:
    ChainRules rules_;
    std::vector<BlockNode> blocks_;
    std::vector<SideArtifact> sides_;
};

}  // namespace smsim
