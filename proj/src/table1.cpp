#include "smsim/table1.hpp"

#include <cmath>

namespace smsim {

double grid_top(std::uint32_t attackers) {
    if (attackers == 0) throw ConfigError("attackers: must be >= 1");
    // Strictly below 1/k so the honest miner keeps some power.
    const double top = std::floor((1.0 - 1e-9) / attackers * 100.0) / 100.0;
    return std::min(0.5, top);
}

SweepConfig table1_sweep(Protocol protocol, double gamma, std::uint32_t attackers, std::uint64_t seed) {
    SweepConfig s;
    s.base.protocol = protocol;
    s.base.gamma = gamma;
    s.base.master_seed = seed;
    if (protocol == Protocol::Strongchain) s.base.protocol_params = strongchain::Params{};
    if (protocol == Protocol::Fruitchain) s.base.protocol_params = fruitchain::Params::balanced();
    s.symmetric_attackers = attackers;
    s.alpha_grid = make_grid(0.01, grid_top(attackers), 0.01);
    return s;
}

std::vector<Table1Cell> table1_suite(std::uint64_t seed) {
    std::vector<Table1Cell> cells;
    auto add = [&](Protocol p, double gamma, std::uint32_t k, double ref, double tol) {
        cells.push_back(Table1Cell{table1_sweep(p, gamma, k, seed), ref, tol});
    };
    add(Protocol::Nakamoto, 0.0, 1, 0.33, 0.01);
    add(Protocol::Nakamoto, 0.5, 1, 0.25, 0.01);
    add(Protocol::Nakamoto, 1.0, 1, 0.005, 0.005);  // i.e. at most 1%
    add(Protocol::Nakamoto, 0.5, 2, 0.21, 0.01);
    add(Protocol::Nakamoto, 0.5, 3, 0.19, 0.01);
    add(Protocol::Nakamoto, 0.5, 5, 0.145, 0.015);
    add(Protocol::Nakamoto, 0.5, 7, 0.115, 0.015);
    add(Protocol::Strongchain, 0.0, 1, 0.46, 0.02);
    add(Protocol::Strongchain, 0.0, 2, 0.32, 0.02);
    add(Protocol::Strongchain, 0.0, 3, 0.24, 0.02);
    add(Protocol::Strongchain, 0.0, 5, 0.17, 0.02);
    add(Protocol::Strongchain, 0.0, 7, 0.13, 0.02);
    add(Protocol::Fruitchain, 0.0, 1, 0.38, 0.02);
    add(Protocol::Fruitchain, 0.5, 1, 0.38, 0.02);
    add(Protocol::Fruitchain, 1.0, 1, 0.38, 0.02);
    add(Protocol::Fruitchain, 0.5, 2, 0.38, 0.02);
    add(Protocol::Fruitchain, 0.5, 3, 0.25, 0.02);
    add(Protocol::Fruitchain, 0.5, 5, 0.17, 0.02);
    add(Protocol::Fruitchain, 0.5, 7, 0.13, 0.02);
    return cells;
}

}  // namespace smsim
