// Round-based simulation manager.
//
// Each round: (1) draw the leader, (2) the leader produces one artifact, (3)
// the leader publishes (honest) or withholds and decides (selfish), (4) every
// attacker reacts to any public change through `cascade_release`. Ties persist
// in the public state; an honest leader picks the parent branch of a tie using
// `honest_split`.
//
// Random draws per round, in this order, from one SplitMix64 stream seeded with
// `mix64(master_seed)`:
//   1. leader            (always)
//   2. artifact kind     (Strongchain and Fruitchain only)
//   3. tie branch        (only when the leader is honest and the public state is a tie)

#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "smsim/fruitchain.hpp"
#include "smsim/ledger.hpp"
#include "smsim/strategy.hpp"
#include "smsim/strongchain.hpp"
#include "smsim/types.hpp"

namespace smsim {

enum class EndCondition : std::uint8_t { RoundBudget, TargetHeight };

using ProtocolParams = std::variant<std::monostate, strongchain::Params, fruitchain::Params>;

struct SimulationConfig {
    Protocol protocol = Protocol::Nakamoto;
    std::vector<MinerSpec> miners;
    double gamma = 0.5;
    std::uint64_t rounds = 100'000;
    ProtocolParams protocol_params;
    std::uint64_t master_seed = 0;
    EndCondition end_condition = EndCondition::RoundBudget;
    std::uint64_t target_height = 0;
    bool record_rounds = false;
};

// Gamma used when a configuration does not set one: 0 for Strongchain, 0.5 otherwise.
double default_gamma(Protocol protocol);

// Throws ConfigError naming the offending field.
void validate(const SimulationConfig& config);

// Stable 64-bit digest of every field that affects a run except `master_seed`
// and `record_rounds`.
std::uint64_t config_digest(const SimulationConfig& config);

ChainRules rules_for(const SimulationConfig& config);

enum class ArtifactTag : std::uint8_t { Block, StrongBlock, WeakHeader, Fruit };

struct RoundRecord {
    std::uint64_t round_index = 0;
    MinerId leader = 0;
    ArtifactTag artifact = ArtifactTag::Block;
    std::vector<CascadeStep> actions;

    bool operator==(const RoundRecord&) const = default;
};

struct SimulationResult {
    std::vector<double> rewards;
    std::vector<double> revenue;  // rewards / total, zero when nothing was paid
    double total_reward = 0.0;
    std::uint64_t rounds_executed = 0;
    std::uint32_t canonical_height = 0;
    std::uint64_t blocks_mined = 0;
    std::uint64_t side_mined = 0;
    std::uint64_t ties = 0;            // Match actions taken
    std::uint64_t overrides = 0;       // Override actions taken
    std::uint64_t max_cascade_steps = 0;
    SideAudit side_audit;
    std::vector<RoundRecord> records;

    bool operator==(const SimulationResult&) const = default;
};

// Returns the id whose half-open cumulative-power interval (ids in order)
// contains u. Throws ConfigError when powers are not normalized.
MinerId select_leader(std::span<const MinerSpec> miners, double u);

SimulationResult run_simulation(const SimulationConfig& config);

}  // namespace smsim
