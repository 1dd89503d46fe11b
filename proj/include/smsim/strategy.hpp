// Selfish-mining decision procedure and multi-attacker public-state machinery.
//
// Strengths are absolute chain strengths in ledger units (see `Strength`); the
// difference between two of them equals the difference measured from their
// common fork point. Attackers observe only published artifacts.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "smsim/ledger.hpp"
#include "smsim/types.hpp"

namespace smsim {

enum class Action : std::uint8_t { Override, Adopt, Match, Wait };

std::string_view to_string(Action action);

struct Observation {
    Strength private_strength = 0;
    Strength public_strength = 0;
    bool has_private_artifacts = false;
    // Public strength rose since this attacker last looked.
    bool public_advanced = true;
    // The attacker's own published branch is one of several tied public tips.
    bool in_tie = false;
};

// Adopt when the public chain is stronger; Match on equal strength with
// something withheld; Override when the public chain just advanced and now
// trails by at most one quantum, or when the attacker pulls ahead of a tie it is
// part of; Wait otherwise.
Action decide_action(const Observation& obs, Strength quantum = 1);
Action decide_action(Strength private_strength, Strength public_strength, bool has_private_artifacts);

struct TieBranch {
    BlockId tip = kGenesis;
    std::optional<MinerId> owner;  // empty: honest branch

    bool operator==(const TieBranch&) const = default;
};

struct TieContext {
    std::vector<TieBranch> branches;
};

// Fraction of honest power mining on each tied branch. One attacker against the
// honest branch: gamma to the attacker, 1 - gamma to the honest branch. Any other
// tie splits honest power evenly.
std::vector<double> honest_split(const TieContext& tie, double gamma);

// Probability that the next block extending one of the tied branches lands on
// each branch: owner power plus its honest portion, normalized over the power
// mining on the tie (attackers outside the tie keep mining privately).
std::vector<double> resolve_match_weights(const TieContext& tie, std::span<const MinerSpec> miners,
                                          double gamma);

// The set of strongest published tips, in publication order. The first entry is
// the branch everyone saw first.
class PublicState {
public:
    PublicState() { tie_.branches.push_back(TieBranch{kGenesis, std::nullopt}); }

    const TieContext& tie() const noexcept { return tie_; }
    std::span<const TieBranch> tips() const noexcept { return tie_.branches; }
    BlockId primary() const noexcept { return tie_.branches.front().tip; }
    bool is_tie() const noexcept { return tie_.branches.size() > 1; }
    Strength strength() const noexcept { return strength_; }
    std::optional<MinerId> owner_of(BlockId tip) const;
    bool contains(BlockId tip) const;

    // Adds a published tip and drops every tip weaker than the strongest.
    void add(const Ledger& ledger, BlockId tip, std::optional<MinerId> owner);
    // Re-evaluates tip strengths after side artifacts were published.
    void refresh(const Ledger& ledger);

private:
    TieContext tie_;
    Strength strength_ = 0;
};

struct AttackerState {
    MinerId owner = 0;
    BlockId private_tip = kGenesis;
    BlockId fork_point = kGenesis;  // last published block on the private chain
    bool in_match = false;
    Strength last_seen_public = 0;
    std::vector<std::uint32_t> withheld;  // own side artifacts not yet published
};

Strength private_strength(const Ledger& ledger, const AttackerState& attacker);
bool has_private_artifacts(const Ledger& ledger, const AttackerState& attacker);
std::size_t withheld_count(const Ledger& ledger, const AttackerState& attacker);

// Evaluates one attacker against the current public state and carries out the
// chosen action. With `allow_adopt` false an Adopt decision is deferred and
// reported as Wait.
Action react(Ledger& ledger, PublicState& pub, AttackerState& attacker, bool allow_adopt = true);

struct CascadeStep {
    MinerId attacker = 0;
    Action action = Action::Wait;

    bool operator==(const CascadeStep&) const = default;
};

// Lets every attacker respond to a public disclosure. Attackers are scanned in
// ascending private strength (ties by id); after any Override or Match the scan
// restarts, until a full pass leaves the public state unchanged. Attackers that
// fell behind then adopt the settled public state. Wait steps are not logged. Throws InternalError if the number of passes exceeds the number
// of withheld artifacts plus one.
std::vector<CascadeStep> cascade_release(Ledger& ledger, PublicState& pub,
                                         std::span<AttackerState> attackers);

// End of run: attackers strictly ahead of the public chain publish, strongest
// last, until no attacker leads.
void flush_private(Ledger& ledger, PublicState& pub, std::span<AttackerState> attackers);

}  // namespace smsim
