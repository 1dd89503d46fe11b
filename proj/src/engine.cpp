#include "smsim/engine.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <string>

#include "smsim/nakamoto.hpp"
#include "smsim/rng.hpp"

namespace smsim {

namespace {

class LeaderTable {
public:
    explicit LeaderTable(std::span<const MinerSpec> miners) {
        cumulative_.reserve(miners.size());
        double sum = 0.0;
        for (const auto& m : miners) {
            sum += m.power;
            cumulative_.push_back(sum);
        }
    }

    MinerId pick(double u) const noexcept {
        for (std::size_t i = 0; i + 1 < cumulative_.size(); ++i) {
            if (u < cumulative_[i]) return static_cast<MinerId>(i);
        }
        // Rounding can leave the last bound a hair below 1.
        return static_cast<MinerId>(cumulative_.size() - 1);
    }

private:
    std::vector<double> cumulative_;
};

std::size_t pick_index(std::span<const double> weights, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

void append_format(std::string& out, const char* fmt, auto... args) {
    char buf[128];
    const int n = std::snprintf(buf, sizeof buf, fmt, args...);
    out.append(buf, static_cast<std::size_t>(n));
}

struct PublicSnapshot {
    Strength strength;
    std::vector<TieBranch> tips;

    explicit PublicSnapshot(const PublicState& pub)
        : strength(pub.strength()), tips(pub.tie().branches) {}

    bool same_as(const PublicState& pub) const {
        return strength == pub.strength() && tips == pub.tie().branches;
    }
};

}  // namespace

double default_gamma(Protocol protocol) { return protocol == Protocol::Strongchain ? 0.0 : 0.5; }

void validate(const SimulationConfig& config) {
    validate_miners(config.miners);
    if (!(config.gamma >= 0.0 && config.gamma <= 1.0)) throw ConfigError("gamma: must lie in [0, 1]");
    if (config.rounds == 0) throw ConfigError("rounds: must be positive");

    const bool params_ok =
        (config.protocol == Protocol::Nakamoto && std::holds_alternative<std::monostate>(config.protocol_params)) ||
        (config.protocol == Protocol::Strongchain &&
         std::holds_alternative<strongchain::Params>(config.protocol_params)) ||
        (config.protocol == Protocol::Fruitchain && std::holds_alternative<fruitchain::Params>(config.protocol_params));
    if (!params_ok) {
        throw ConfigError("protocol_params: missing or mismatched parameters for protocol '" +
                          std::string(to_string(config.protocol)) + "'");
    }
    if (const auto* p = std::get_if<strongchain::Params>(&config.protocol_params)) p->validate();
    if (const auto* p = std::get_if<fruitchain::Params>(&config.protocol_params)) p->validate();

    if (config.end_condition == EndCondition::TargetHeight) {
        if (config.protocol != Protocol::Fruitchain) {
            throw ConfigError("end_condition: target_height is only supported for fruitchain");
        }
        if (config.target_height == 0) throw ConfigError("end_condition.height: must be positive");
    }
}

std::uint64_t config_digest(const SimulationConfig& config) {
    std::string s;
    append_format(s, "protocol=%s;gamma=%a;rounds=%" PRIu64 ";end=%d;target=%" PRIu64 ";miners=",
                  std::string(to_string(config.protocol)).c_str(), config.gamma, config.rounds,
                  static_cast<int>(config.end_condition), config.target_height);
    for (const auto& m : config.miners) {
        append_format(s, "%u:%a:%d,", m.id, m.power, static_cast<int>(m.kind));
    }
    if (const auto* p = std::get_if<strongchain::Params>(&config.protocol_params)) {
        append_format(s, ";ratio=%u", p->ratio);
    }
    if (const auto* p = std::get_if<fruitchain::Params>(&config.protocol_params)) {
        append_format(s, ";fruit_ratio=%u;window=%u;block=%a;fruit=%a", p->fruit_ratio, p->freshness_window,
                      p->block_reward, p->fruit_reward);
    }
    return fnv1a64(s);
}

ChainRules rules_for(const SimulationConfig& config) {
    switch (config.protocol) {
        case Protocol::Nakamoto: return nakamoto::rules();
        case Protocol::Strongchain: return strongchain::rules(std::get<strongchain::Params>(config.protocol_params));
        case Protocol::Fruitchain: return fruitchain::rules(std::get<fruitchain::Params>(config.protocol_params));
    }
    throw ConfigError("protocol: unknown");
}

MinerId select_leader(std::span<const MinerSpec> miners, double u) {
    validate_miners(miners);
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("select_leader: u must lie in [0, 1)");
    return LeaderTable(miners).pick(u);
}

SimulationResult run_simulation(const SimulationConfig& config) {
    validate(config);

    Ledger ledger(rules_for(config));
    PublicState pub;
    const auto miner_count = config.miners.size();

    std::vector<AttackerState> attackers;
    std::vector<std::size_t> attacker_slot(miner_count, SIZE_MAX);
    for (const auto& m : config.miners) {
        if (m.kind != MinerKind::Selfish) continue;
        attacker_slot[m.id] = attackers.size();
        AttackerState a;
        a.owner = m.id;
        attackers.push_back(std::move(a));
    }

    std::uint32_t side_ratio = 0;
    if (const auto* p = std::get_if<strongchain::Params>(&config.protocol_params)) side_ratio = p->ratio;
    if (const auto* p = std::get_if<fruitchain::Params>(&config.protocol_params)) side_ratio = p->fruit_ratio;
    const EmbedPolicy attacker_policy = config.protocol == Protocol::Strongchain ? EmbedPolicy::Own
                                        : config.protocol == Protocol::Fruitchain ? EmbedPolicy::Own
                                                                                  : EmbedPolicy::Published;

    SplitMix64 rng(mix64(config.master_seed));
    const LeaderTable leaders(config.miners);
    SimulationResult result;

    auto count_actions = [&](std::span<const CascadeStep> steps) {
        for (const auto& s : steps) {
            if (s.action == Action::Match) ++result.ties;
            if (s.action == Action::Override) ++result.overrides;
        }
    };

    for (std::uint64_t round = 0; round < config.rounds; ++round) {
        const MinerId leader = leaders.pick(rng.uniform());

        bool is_block = true;
        ArtifactTag tag = ArtifactTag::Block;
        if (config.protocol == Protocol::Strongchain) {
            is_block = strongchain::sample_artifact_kind(side_ratio, rng.uniform()) == strongchain::ArtifactKind::Strong;
            tag = is_block ? ArtifactTag::StrongBlock : ArtifactTag::WeakHeader;
        } else if (config.protocol == Protocol::Fruitchain) {
            is_block = fruitchain::sample_artifact_kind(side_ratio, rng.uniform()) == fruitchain::ArtifactKind::Block;
            tag = is_block ? ArtifactTag::Block : ArtifactTag::Fruit;
        }

        std::vector<CascadeStep> steps;
        const PublicSnapshot before(pub);

        if (config.miners[leader].kind == MinerKind::Honest) {
            BlockId parent = pub.primary();
            if (pub.is_tie()) {
                const auto split = honest_split(pub.tie(), config.gamma);
                parent = pub.tips()[pick_index(split, rng.uniform())].tip;
            }
            if (is_block) {
                const BlockId id = ledger.append_block(parent, leader, /*published=*/true, EmbedPolicy::Published);
                pub.add(ledger, id, std::nullopt);
            } else {
                ledger.add_side(leader, parent, /*published=*/true);
                pub.refresh(ledger);
            }
        } else {
            auto& a = attackers[attacker_slot[leader]];
            if (is_block) {
                a.private_tip = ledger.append_block(a.private_tip, leader, /*published=*/false, attacker_policy);
            } else {
                a.withheld.push_back(ledger.add_side(leader, a.private_tip, /*published=*/false));
            }
            const Action action = react(ledger, pub, a);
            if (action != Action::Wait) steps.push_back(CascadeStep{leader, action});
        }

        if (!before.same_as(pub)) {
            auto more = cascade_release(ledger, pub, attackers);
            result.max_cascade_steps = std::max<std::uint64_t>(result.max_cascade_steps, more.size());
            steps.insert(steps.end(), more.begin(), more.end());
        }
        count_actions(steps);
        if (config.record_rounds) {
            result.records.push_back(RoundRecord{round, leader, tag, std::move(steps)});
        }
        ++result.rounds_executed;

        if (config.end_condition == EndCondition::TargetHeight &&
            ledger.block(pub.primary()).height >= config.target_height) {
            break;
        }
    }

    flush_private(ledger, pub, attackers);

    const BlockId canonical = pub.primary();
    const auto tally = ledger.tally(canonical, miner_count);
    const auto shares = to_shares(tally);
    result.rewards = shares.rewards;
    result.revenue = shares.shares;
    result.total_reward = shares.total;
    result.canonical_height = ledger.block(canonical).height;
    result.blocks_mined = ledger.block_count() - 1;
    result.side_mined = ledger.side_count();
    if (ledger.rules().side_kind) result.side_audit = audit_side_artifacts(ledger, canonical);
    return result;
}

}  // namespace smsim
