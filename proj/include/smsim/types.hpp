// Core identifiers and miner descriptions shared by every module.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace smsim {

using MinerId = std::uint32_t;
using BlockId = std::uint32_t;

// Chain strength in integer units. Nakamoto and Fruitchain count one unit per
// block; Strongchain counts `ratio` units per strong block and one per weak
// header, so `units / ratio` is the fractional strength.
using Strength = std::int64_t;

inline constexpr BlockId kGenesis = 0;

enum class MinerKind : std::uint8_t { Honest, Selfish };
enum class Protocol : std::uint8_t { Nakamoto, Strongchain, Fruitchain };

struct MinerSpec {
    MinerId id = 0;
    double power = 0.0;
    MinerKind kind = MinerKind::Honest;
};

// Raised for invalid user-supplied configuration. `what()` names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a simulation invariant is broken; indicates a bug, not bad input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline constexpr double kPowerTolerance = 1e-9;

std::string_view to_string(Protocol protocol);
std::string_view to_string(MinerKind kind);
Protocol parse_protocol(std::string_view name);
MinerKind parse_miner_kind(std::string_view name);

// Checks ids are 0..n-1 in order, powers are positive and sum to 1.
void validate_miners(std::span<const MinerSpec> miners);

double honest_power(std::span<const MinerSpec> miners);
std::size_t selfish_count(std::span<const MinerSpec> miners);

}  // namespace smsim
