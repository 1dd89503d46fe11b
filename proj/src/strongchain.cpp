#include "smsim/strongchain.hpp"

namespace smsim::strongchain {

void Params::validate() const {
    if (ratio < 1) throw ConfigError("protocol_params.ratio: must be a positive integer");
}

ChainRules rules(const Params& params) {
    params.validate();
    ChainRules r;
    r.block_units = params.ratio;
    r.side_units = 1;
    r.quantum = params.ratio;
    r.block_reward = 1.0;
    r.side_reward = 1.0 / params.ratio;
    r.side_kind = SideKind::WeakHeader;
    r.embed_depth = 1;
    r.pay_pending_on_tip = true;
    return r;
}

ArtifactKind sample_artifact_kind(std::uint32_t ratio, double u) {
    if (ratio < 1) throw std::invalid_argument("sample_artifact_kind: ratio must be >= 1");
    return u * (ratio + 1.0) < 1.0 ? ArtifactKind::Strong : ArtifactKind::Weak;
}

double branch_strength(const BranchCounts& counts, std::uint32_t ratio) {
    return static_cast<double>(counts.strong) + static_cast<double>(counts.weak) / ratio;
}

BranchCounts count_from_fork(const Ledger& ledger, BlockId tip, BlockId fork, MinerId viewer) {
    if (!ledger.is_ancestor(fork, tip)) {
        throw std::invalid_argument("count_from_fork: fork is not an ancestor of tip");
    }
    BranchCounts c;
    for (const auto id : ledger.block(tip).hanging) {
        const auto& s = ledger.side(id);
        if (s.published || s.miner == viewer) ++c.weak;
    }
    for (BlockId b = tip; b != fork; b = ledger.block(b).parent) {
        ++c.strong;
        c.weak += ledger.block(b).embedded.size();
    }
    return c;
}

RewardShares reward_shares(const Ledger& ledger, BlockId canonical_tip, std::size_t miner_count) {
    return to_shares(ledger.tally(canonical_tip, miner_count));
}

}  // namespace smsim::strongchain
