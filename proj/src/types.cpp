#include "smsim/types.hpp"

#include <cmath>

namespace smsim {

std::string_view to_string(Protocol protocol) {
    switch (protocol) {
        case Protocol::Nakamoto: return "nakamoto";
        case Protocol::Strongchain: return "strongchain";
        case Protocol::Fruitchain: return "fruitchain";
    }
    return "unknown";
}

std::string_view to_string(MinerKind kind) {
    return kind == MinerKind::Honest ? "honest" : "selfish";
}

Protocol parse_protocol(std::string_view name) {
    if (name == "nakamoto") return Protocol::Nakamoto;
    if (name == "strongchain") return Protocol::Strongchain;
    if (name == "fruitchain") return Protocol::Fruitchain;
    throw ConfigError("protocol: unknown protocol '" + std::string(name) + "'");
}

MinerKind parse_miner_kind(std::string_view name) {
    if (name == "honest") return MinerKind::Honest;
    if (name == "selfish") return MinerKind::Selfish;
    throw ConfigError("miners: unknown miner kind '" + std::string(name) + "'");
}

void validate_miners(std::span<const MinerSpec> miners) {
    if (miners.empty()) throw ConfigError("miners: at least one miner is required");
    double total = 0.0;
    for (std::size_t i = 0; i < miners.size(); ++i) {
        const auto& m = miners[i];
        if (m.id != i) {
            throw ConfigError("miners: ids must be contiguous from 0 (miner " + std::to_string(i) +
                              " has id " + std::to_string(m.id) + ")");
        }
        if (!(m.power > 0.0) || !std::isfinite(m.power)) {
            throw ConfigError("miners: power of miner " + std::to_string(i) + " must be positive");
        }
        total += m.power;
    }
    if (std::abs(total - 1.0) > kPowerTolerance) {
        throw ConfigError("miners: powers must sum to 1 (got " + std::to_string(total) + ")");
    }
}

double honest_power(std::span<const MinerSpec> miners) {
    double p = 0.0;
    for (const auto& m : miners) {
        if (m.kind == MinerKind::Honest) p += m.power;
    }
    return p;
}

std::size_t selfish_count(std::span<const MinerSpec> miners) {
    std::size_t n = 0;
    for (const auto& m : miners) n += m.kind == MinerKind::Selfish ? 1 : 0;
    return n;
}

}  // namespace smsim
