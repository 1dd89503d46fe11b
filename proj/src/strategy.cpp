#include "smsim/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace smsim {

std::string_view to_string(Action action) {
    switch (action) {
        case Action::Override: return "override";
        case Action::Adopt: return "adopt";
        case Action::Match: return "match";
        case Action::Wait: return "wait";
    }
    return "wait";
}

Action decide_action(const Observation& obs, Strength quantum) {
    if (obs.private_strength < 0 || obs.public_strength < 0) {
        throw std::invalid_argument("decide_action: strengths must be non-negative");
    }
    if (quantum <= 0) throw std::invalid_argument("decide_action: quantum must be positive");

    if (obs.public_strength > obs.private_strength) return Action::Adopt;
    if (obs.public_strength == obs.private_strength) {
        return obs.has_private_artifacts ? Action::Match : Action::Wait;
    }
    if (obs.in_tie) return Action::Override;
    const Strength lead = obs.private_strength - obs.public_strength;
    if (obs.public_advanced && lead <= quantum) return Action::Override;
    return Action::Wait;
}

Action decide_action(Strength private_strength, Strength public_strength, bool has_private_artifacts) {
    return decide_action(Observation{private_strength, public_strength, has_private_artifacts});
}

std::vector<double> honest_split(const TieContext& tie, double gamma) {
    const auto n = tie.branches.size();
    if (n < 2) throw std::invalid_argument("honest_split: a tie needs at least two branches");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("honest_split: gamma outside [0, 1]");

    const auto attackers = static_cast<std::size_t>(std::count_if(
        tie.branches.begin(), tie.branches.end(), [](const TieBranch& b) { return b.owner.has_value(); }));
    std::vector<double> split(n, 1.0 / static_cast<double>(n));
    if (n == 2 && attackers == 1) {
        for (std::size_t i = 0; i < n; ++i) split[i] = tie.branches[i].owner ? gamma : 1.0 - gamma;
    }
    return split;
}

std::vector<double> resolve_match_weights(const TieContext& tie, std::span<const MinerSpec> miners,
                                          double gamma) {
    const auto split = honest_split(tie, gamma);
    const double p_honest = honest_power(miners);

    std::vector<double> w(tie.branches.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        double own = 0.0;
        if (const auto& owner = tie.branches[i].owner) {
            if (*owner >= miners.size()) throw std::invalid_argument("resolve_match_weights: unknown owner");
            own = miners[*owner].power;
        }
        w[i] = own + p_honest * split[i];
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0.0)) throw InternalError("resolve_match_weights: no power mines on the tie");
    for (auto& x : w) x /= total;
    const double check = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(check - 1.0) > 1e-9) throw InternalError("resolve_match_weights: weights do not sum to 1");
    return w;
}

std::optional<MinerId> PublicState::owner_of(BlockId tip) const {
    for (const auto& b : tie_.branches) {
        if (b.tip == tip) return b.owner;
    }
    return std::nullopt;
}

bool PublicState::contains(BlockId tip) const {
    return std::any_of(tie_.branches.begin(), tie_.branches.end(),
                       [tip](const TieBranch& b) { return b.tip == tip; });
}

void PublicState::add(const Ledger& ledger, BlockId tip, std::optional<MinerId> owner) {
    if (!contains(tip)) tie_.branches.push_back(TieBranch{tip, owner});
    refresh(ledger);
}

void PublicState::refresh(const Ledger& ledger) {
    Strength best = 0;
    std::vector<Strength> s;
    s.reserve(tie_.branches.size());
    for (const auto& b : tie_.branches) {
        s.push_back(ledger.tip_strength(b.tip));
        best = std::max(best, s.back());
    }
    std::vector<TieBranch> kept;
    kept.reserve(tie_.branches.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == best) kept.push_back(tie_.branches[i]);
    }
    tie_.branches = std::move(kept);
    strength_ = best;
}

Strength private_strength(const Ledger& ledger, const AttackerState& attacker) {
    return ledger.tip_strength(attacker.private_tip, attacker.owner);
}

bool has_private_artifacts(const Ledger& ledger, const AttackerState& attacker) {
    if (!ledger.block(attacker.private_tip).published) return true;
    if (ledger.rules().side_units == 0) return false;
    return std::any_of(attacker.withheld.begin(), attacker.withheld.end(), [&](std::uint32_t id) {
        return ledger.side(id).anchor == attacker.private_tip;
    });
}

std::size_t withheld_count(const Ledger& ledger, const AttackerState& attacker) {
    // Only the owner publishes its chain, so every block above fork_point is withheld.
    return attacker.withheld.size() + ledger.block(attacker.private_tip).height -
           ledger.block(attacker.fork_point).height;
}

namespace {

// Membership test for "block lies on the chain ending at tip", covering every
// anchor of `sides`. One walk instead of one walk per artifact.
auto chain_filter(const Ledger& ledger, const std::vector<std::uint32_t>& sides, BlockId tip) {
    std::uint32_t low = ledger.block(tip).height;
    for (const auto id : sides) low = std::min(low, ledger.block(ledger.side(id).anchor).height);
    std::vector<BlockId> chain;
    for (BlockId b = tip;; b = ledger.block(b).parent) {
        chain.push_back(b);
        if (ledger.block(b).height <= low) break;
    }
    std::sort(chain.begin(), chain.end());
    return [chain = std::move(chain)](BlockId b) { return std::binary_search(chain.begin(), chain.end(), b); };
}

void publish(Ledger& ledger, PublicState& pub, AttackerState& a) {
    ledger.publish_chain(a.private_tip);
    const auto on_chain = chain_filter(ledger, a.withheld, a.private_tip);
    std::erase_if(a.withheld, [&](std::uint32_t id) {
        if (!on_chain(ledger.side(id).anchor)) return false;
        ledger.publish_side(id);
        return true;
    });
    pub.add(ledger, a.private_tip, a.owner);
    a.fork_point = a.private_tip;
}

void adopt(Ledger& ledger, PublicState& pub, AttackerState& a) {
    const BlockId target = pub.primary();
    bool published_any = false;
    const auto on_chain = chain_filter(ledger, a.withheld, target);
    for (const auto id : a.withheld) {
        if (on_chain(ledger.side(id).anchor)) {
            ledger.publish_side(id);
            published_any = true;
        }
    }
    a.withheld.clear();
    a.private_tip = target;
    a.fork_point = target;
    if (published_any) pub.refresh(ledger);
}

// The attacker's last published tip is one of several tied public tips and it
// owns that branch. Its private chain always extends `fork_point`.
bool in_public_tie(const PublicState& pub, const AttackerState& a) {
    return pub.is_tie() && pub.contains(a.fork_point) && pub.owner_of(a.fork_point) == a.owner;
}

}  // namespace

Action react(Ledger& ledger, PublicState& pub, AttackerState& attacker, bool allow_adopt) {
    Observation obs;
    obs.private_strength = private_strength(ledger, attacker);
    obs.public_strength = pub.strength();
    obs.has_private_artifacts = has_private_artifacts(ledger, attacker);
    obs.public_advanced = pub.strength() > attacker.last_seen_public;
    obs.in_tie = in_public_tie(pub, attacker);

    const Action action = decide_action(obs, ledger.rules().quantum);
    if (action == Action::Adopt && !allow_adopt) return Action::Wait;
    switch (action) {
        case Action::Override:
        case Action::Match: publish(ledger, pub, attacker); break;
        case Action::Adopt: adopt(ledger, pub, attacker); break;
        case Action::Wait: break;
    }
    attacker.last_seen_public = pub.strength();
    attacker.in_match = in_public_tie(pub, attacker);
    return action;
}

std::vector<CascadeStep> cascade_release(Ledger& ledger, PublicState& pub,
                                         std::span<AttackerState> attackers) {
    std::vector<CascadeStep> log;
    std::size_t budget = 1;
    for (const auto& a : attackers) budget += withheld_count(ledger, a);

    std::vector<std::size_t> order(attackers.size());
    std::vector<Strength> key(attackers.size());
    auto sort_order = [&] {
        for (std::size_t i = 0; i < attackers.size(); ++i) key[i] = private_strength(ledger, attackers[i]);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return key[x] != key[y] ? key[x] < key[y] : attackers[x].owner < attackers[y].owner;
        });
    };
    // One scan in ascending strength order. Stops at the first action that
    // changes the public state and reports whether one did.
    auto scan = [&](bool allow_adopt) {
        sort_order();
        for (const auto i : order) {
            const Strength before_strength = pub.strength();
            const auto before_tips = pub.tie().branches;
            const Action action = react(ledger, pub, attackers[i], allow_adopt);
            if (action != Action::Wait) log.push_back(CascadeStep{attackers[i].owner, action});
            if (pub.strength() != before_strength || pub.tie().branches != before_tips) return true;
        }
        return false;
    };

    std::size_t passes = 0;
    while (true) {
        // Releases first; attackers that fell behind adopt the settled public state.
        if (scan(/*allow_adopt=*/false) || scan(/*allow_adopt=*/true)) {
            if (++passes > budget) {
                throw InternalError("cascade_release: no fixed point within the withheld budget");
            }
            continue;
        }
        break;
    }
    return log;
}

void flush_private(Ledger& ledger, PublicState& pub, std::span<AttackerState> attackers) {
    std::vector<std::size_t> order(attackers.size());
    bool changed = true;
    while (changed) {
        changed = false;
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return private_strength(ledger, attackers[x]) < private_strength(ledger, attackers[y]);
        });
        for (const auto i : order) {
            if (private_strength(ledger, attackers[i]) > pub.strength()) {
                publish(ledger, pub, attackers[i]);
                attackers[i].last_seen_public = pub.strength();
                changed = true;
            }
        }
    }
}

}  // namespace smsim
