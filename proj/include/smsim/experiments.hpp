// Parameter sweeps and profitability-threshold estimation.
//
// A sweep runs every (alpha, repeat) cell of a grid. Attacker 1 (miner 0) gets
// alpha; with `symmetric_attackers = k` miners 0..k-1 all get alpha, otherwise
// `fixed_rivals` lists the powers of the other attackers. The remaining power
// goes to a single honest miner. Each cell is seeded with
// derive_run_seed(master_seed, repeat, config_digest(point config)), so results
// are keyed by alpha and never by grid position or execution order.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "smsim/engine.hpp"

namespace smsim {

struct SweepConfig {
    SimulationConfig base;  // protocol, gamma, params, master seed; miners are generated
    std::vector<double> alpha_grid;
    std::uint32_t symmetric_attackers = 1;
    std::vector<double> fixed_rivals;  // used when symmetric_attackers == 1
    std::uint32_t repeats = 5;
    std::uint64_t rounds = 100'000;
    bool refine = false;  // add the midpoint of the detected bracket
    unsigned jobs = 0;    // worker threads, 0 = hardware concurrency
};

void validate(const SweepConfig& sweep);

// Grid start, start + step, ... up to and including stop (within 1e-9).
std::vector<double> make_grid(double start, double stop, double step);

std::uint32_t attacker_count(const SweepConfig& sweep);
SimulationConfig point_config(const SweepConfig& sweep, double alpha);

struct RunOutcome {
    std::uint64_t seed = 0;
    std::vector<double> revenue;  // per miner
};

struct RevenuePoint {
    double alpha = 0.0;
    std::vector<double> run_revenues;  // attacker 1, one per repeat
    double mean_revenue = 0.0;
    std::vector<RunOutcome> runs;
};

std::vector<RevenuePoint> run_sweep(const SweepConfig& sweep);

// `repeats` runs of one config, run r seeded with
// derive_run_seed(config.master_seed, r, config_digest(config)).
std::vector<RunOutcome> run_repeats(const SimulationConfig& config, std::uint32_t repeats, unsigned jobs = 0);

// Largest |mean R_i - mean R_j| over the symmetric attackers of a point.
double attacker_asymmetry(const RevenuePoint& point, std::uint32_t attackers);

struct ThresholdEstimate {
    std::optional<double> threshold;
    std::pair<double, double> bracket{0.0, 0.0};
    std::pair<double, double> ci95{0.0, 0.0};
    bool crossing_confirmed = false;
    // The first grid point already met fair share; threshold is that point.
    bool at_grid_start = false;
};

inline constexpr std::uint64_t kBootstrapSeed = 0x5EED'B007'0000'0001ULL;

// Linear interpolation of mean - alpha on the first bracket where it turns from
// negative to non-negative. The crossing is confirmed when the percentile
// bootstrap interval of the interpolated crossing (resampling the run-level
// revenues at both bracket points) contains the point estimate.
ThresholdEstimate estimate_threshold(std::span<const RevenuePoint> points, std::uint32_t resamples = 10'000,
                                     std::uint64_t seed = kBootstrapSeed);

// Percentile bootstrap interval of the sample mean. Percentiles use linear
// interpolation between order statistics.
std::pair<double, double> bootstrap_ci(std::span<const double> samples, double level = 0.95,
                                       std::uint32_t resamples = 10'000, std::uint64_t seed = kBootstrapSeed);

struct SweepOutcome {
    std::vector<RevenuePoint> points;
    ThresholdEstimate threshold;
};

// run_sweep + estimate_threshold, plus the optional refinement pass.
SweepOutcome sweep_threshold(const SweepConfig& sweep);

}  // namespace smsim
