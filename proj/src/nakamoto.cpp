#include "smsim/nakamoto.hpp"

namespace smsim::nakamoto {

ChainRules rules() { return ChainRules{}; }

Branch extend_chain(Ledger& ledger, const Branch& branch, MinerId miner) {
    const auto tip = ledger.append_block(branch.tip, miner, /*published=*/true, EmbedPolicy::Published);
    return Branch{tip, branch.length_from_fork + 1};
}

RewardShares reward_shares(const Ledger& ledger, BlockId canonical_tip, std::size_t miner_count) {
    return to_shares(ledger.tally(canonical_tip, miner_count));
}

}  // namespace smsim::nakamoto
