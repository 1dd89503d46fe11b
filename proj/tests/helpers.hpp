#pragma once

#include <numeric>
#include <vector>

#include "smsim/engine.hpp"
#include "smsim/experiments.hpp"

namespace testing {

inline smsim::SimulationConfig make_config(smsim::Protocol protocol, std::vector<double> selfish, double honest,
                                           double gamma, std::uint64_t rounds = 100'000, std::uint64_t seed = 1) {
    using namespace smsim;
    SimulationConfig c;
    c.protocol = protocol;
    c.gamma = gamma;
    c.rounds = rounds;
    c.master_seed = seed;
    if (protocol == Protocol::Strongchain) c.protocol_params = strongchain::Params{};
    if (protocol == Protocol::Fruitchain) c.protocol_params = fruitchain::Params::balanced();
    MinerId id = 0;
    for (const double p : selfish) c.miners.push_back(MinerSpec{id++, p, MinerKind::Selfish});
    if (honest > 0.0) c.miners.push_back(MinerSpec{id++, honest, MinerKind::Honest});
    return c;
}

// Mean revenue per miner over `repeats` seeded runs.
inline std::vector<double> mean_revenue(const smsim::SimulationConfig& c, std::uint32_t repeats = 5) {
    const auto runs = smsim::run_repeats(c, repeats, 1);
    std::vector<double> m(c.miners.size(), 0.0);
    for (const auto& r : runs) {
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += r.revenue[i] / repeats;
    }
    return m;
}

}  // namespace testing
