// Longest-chain baseline: every artifact is a block worth one unit of strength
// and one unit of reward.

#pragma once

#include <cstdint>

#include "smsim/ledger.hpp"

namespace smsim::nakamoto {

ChainRules rules();

struct Branch {
    BlockId tip = kGenesis;
    std::int64_t length_from_fork = 0;
};

inline std::int64_t strength(const Branch& branch) noexcept { return branch.length_from_fork; }

// Appends a published block by `miner` on top of `branch`.
Branch extend_chain(Ledger& ledger, const Branch& branch, MinerId miner);

// share_i = canonical blocks mined by i / canonical blocks. An empty chain
// yields all-zero shares with `degenerate` set.
RewardShares reward_shares(const Ledger& ledger, BlockId canonical_tip, std::size_t miner_count);

}  // namespace smsim::nakamoto
