// Strongchain model.
//
// Each round yields a weak header (probability r/(r+1)) or a strong block
// (probability 1/(r+1)), so r weak headers are expected per strong block. Chain
// strength counts r units per strong block and one unit per weak header, i.e.
// strong_count + weak_count / r. A strong block embeds weak headers that were
// mined on its parent; weak headers still pending on a tip count toward that
// tip's strength immediately. Rewards: 1 per canonical strong block, 1/r per
// embedded weak header, and published weak headers pending on the final
// canonical tip are paid as well.

#pragma once

#include <cstdint>

#include "smsim/ledger.hpp"

namespace smsim::strongchain {

struct Params {
    std::uint32_t ratio = 10;  // expected weak headers per strong block

    void validate() const;
};

enum class ArtifactKind : std::uint8_t { Weak, Strong };

ChainRules rules(const Params& params);

// Strong when u < 1/(r+1).
ArtifactKind sample_artifact_kind(std::uint32_t ratio, double u);

struct BranchCounts {
    std::uint64_t strong = 0;
    std::uint64_t weak = 0;  // embedded plus pending on the tip
};

double branch_strength(const BranchCounts& counts, std::uint32_t ratio);

// Counts strong blocks and weak headers on the chain from `fork` (exclusive) to
// `tip`, including weak headers pending on `tip` that `viewer` can see. Weak
// headers mined on `fork` and embedded by the first block after it are included.
BranchCounts count_from_fork(const Ledger& ledger, BlockId tip, BlockId fork, MinerId viewer = kNoMiner);

RewardShares reward_shares(const Ledger& ledger, BlockId canonical_tip, std::size_t miner_count);

}  // namespace smsim::strongchain
