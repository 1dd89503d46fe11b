// The canned threshold suite: every (protocol, gamma, attackers) cell of the
// comparison table, with the reference value each cell is expected to match.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smsim/experiments.hpp"

namespace smsim {

struct Table1Cell {
    SweepConfig sweep;
    double reference = 0.0;  // expected threshold (fraction)
    double tolerance = 0.0;
};

// Largest 1%-grid alpha that leaves honest power for k attackers, capped at 0.5.
double grid_top(std::uint32_t attackers);

SweepConfig table1_sweep(Protocol protocol, double gamma, std::uint32_t attackers, std::uint64_t seed);

std::vector<Table1Cell> table1_suite(std::uint64_t seed);

}  // namespace smsim
