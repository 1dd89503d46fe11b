#include "smsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "smsim/rng.hpp"

namespace smsim {

namespace {

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double quantile_sorted(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

double resample_mean(std::span<const double> xs, SplitMix64& rng) {
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) sum += xs[rng.below(xs.size())];
    return sum / static_cast<double>(xs.size());
}

double interpolate_root(double a_lo, double d_lo, double a_hi, double d_hi) {
    if (d_hi == d_lo) return a_hi;
    return a_lo + (a_hi - a_lo) * (-d_lo) / (d_hi - d_lo);
}

// Runs task(0..cells-1) on `jobs` threads (0 = hardware concurrency). Each
// task writes only its own slot, so the schedule never affects results.
template <class Task>
void parallel_cells(std::size_t cells, unsigned jobs, Task&& task) {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (std::size_t cell = next++; cell < cells; cell = next++) {
            try {
                task(cell);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = cells;  // stop handing out work
            }
        }
    };
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, cells));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::uint32_t attacker_count(const SweepConfig& sweep) {
    return sweep.symmetric_attackers > 1 ? sweep.symmetric_attackers
                                         : 1 + static_cast<std::uint32_t>(sweep.fixed_rivals.size());
}

void validate(const SweepConfig& sweep) {
    if (sweep.alpha_grid.empty()) throw ConfigError("sweep.alpha_grid: must not be empty");
    if (sweep.symmetric_attackers == 0) throw ConfigError("sweep.attackers: must be >= 1");
    if (sweep.symmetric_attackers > 1 && !sweep.fixed_rivals.empty()) {
        throw ConfigError("sweep: use either attackers > 1 or fixed_rivals, not both");
    }
    if (sweep.repeats == 0) throw ConfigError("repeats: must be positive");
    if (sweep.rounds == 0) throw ConfigError("rounds: must be positive");
    for (std::size_t i = 0; i < sweep.alpha_grid.size(); ++i) {
        const double a = sweep.alpha_grid[i];
        if (!(a > 0.0 && a <= 0.5)) throw ConfigError("sweep.alpha_grid: values must lie in (0, 0.5]");
        if (i > 0 && !(a > sweep.alpha_grid[i - 1])) {
            throw ConfigError("sweep.alpha_grid: must be strictly ascending");
        }
    }
    for (const double r : sweep.fixed_rivals) {
        if (!(r > 0.0)) throw ConfigError("sweep.fixed_rivals: powers must be positive");
    }
    const double rivals = std::accumulate(sweep.fixed_rivals.begin(), sweep.fixed_rivals.end(), 0.0);
    const double top = sweep.alpha_grid.back();
    if (sweep.symmetric_attackers * top + rivals >= 1.0) {
        throw ConfigError("sweep.alpha_grid: attacker power " + std::to_string(top) +
                          " leaves no honest power (k * alpha + rivals >= 1)");
    }
}

std::vector<double> make_grid(double start, double stop, double step) {
    if (!(step > 0.0) || stop < start) throw ConfigError("sweep.alpha_grid: invalid range");
    std::vector<double> grid;
    for (std::size_t i = 0;; ++i) {
        // Round to 1e-9 so grid values print and hash identically across platforms.
        const double a = std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9;
        if (a > stop + 1e-9) break;
        grid.push_back(a);
    }
    return grid;
}

SimulationConfig point_config(const SweepConfig& sweep, double alpha) {
    SimulationConfig cfg = sweep.base;
    cfg.rounds = sweep.rounds;
    cfg.miners.clear();
    MinerId id = 0;
    double used = 0.0;
    for (std::uint32_t i = 0; i < sweep.symmetric_attackers; ++i) {
        cfg.miners.push_back(MinerSpec{id++, alpha, MinerKind::Selfish});
        used += alpha;
    }
    for (const double r : sweep.fixed_rivals) {
        cfg.miners.push_back(MinerSpec{id++, r, MinerKind::Selfish});
        used += r;
    }
    const double honest = 1.0 - used;
    if (honest > 1e-12) cfg.miners.push_back(MinerSpec{id++, honest, MinerKind::Honest});
    return cfg;
}

std::vector<RevenuePoint> run_sweep(const SweepConfig& sweep) {
    validate(sweep);
    const auto cells = sweep.alpha_grid.size() * sweep.repeats;

    std::vector<SimulationConfig> configs;
    std::vector<std::uint64_t> digests;
    for (const double a : sweep.alpha_grid) {
        configs.push_back(point_config(sweep, a));
        validate(configs.back());
        digests.push_back(config_digest(configs.back()));
    }

    std::vector<RunOutcome> outcomes(cells);
    parallel_cells(cells, sweep.jobs, [&](std::size_t cell) {
        const auto point = cell / sweep.repeats;
        const auto repeat = cell % sweep.repeats;
        SimulationConfig cfg = configs[point];
        cfg.master_seed = derive_run_seed(sweep.base.master_seed, repeat, digests[point]);
        cfg.record_rounds = false;
        auto result = run_simulation(cfg);
        outcomes[cell] = RunOutcome{cfg.master_seed, std::move(result.revenue)};
    });

    std::vector<RevenuePoint> points;
    points.reserve(sweep.alpha_grid.size());
    for (std::size_t p = 0; p < sweep.alpha_grid.size(); ++p) {
        RevenuePoint pt;
        pt.alpha = sweep.alpha_grid[p];
        for (std::size_t r = 0; r < sweep.repeats; ++r) {
            auto& o = outcomes[p * sweep.repeats + r];
            pt.run_revenues.push_back(o.revenue.at(0));
            pt.runs.push_back(std::move(o));
        }
        pt.mean_revenue = mean_of(pt.run_revenues);
        points.push_back(std::move(pt));
    }
    return points;
}

std::vector<RunOutcome> run_repeats(const SimulationConfig& config, std::uint32_t repeats, unsigned jobs) {
    validate(config);
    if (repeats == 0) throw ConfigError("repeats: must be positive");
    const auto digest = config_digest(config);
    std::vector<RunOutcome> out(repeats);
    parallel_cells(repeats, jobs, [&](std::size_t r) {
        SimulationConfig cfg = config;
        cfg.master_seed = derive_run_seed(config.master_seed, r, digest);
        cfg.record_rounds = false;
        out[r] = RunOutcome{cfg.master_seed, run_simulation(cfg).revenue};
    });
    return out;
}

double attacker_asymmetry(const RevenuePoint& point, std::uint32_t attackers) {
    std::vector<double> means(attackers, 0.0);
    for (const auto& run : point.runs) {
        for (std::uint32_t i = 0; i < attackers; ++i) means[i] += run.revenue.at(i);
    }
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    return (*hi - *lo) / static_cast<double>(point.runs.size());
}

std::pair<double, double> bootstrap_ci(std::span<const double> samples, double level, std::uint32_t resamples,
                                       std::uint64_t seed) {
    if (samples.size() < 2) throw std::invalid_argument("bootstrap_ci: need at least two samples");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("bootstrap_ci: level must lie in (0, 1)");
    if (resamples == 0) throw std::invalid_argument("bootstrap_ci: resamples must be positive");

    SplitMix64 rng(mix64(seed));
    std::vector<double> means(resamples);
    for (auto& m : means) m = resample_mean(samples, rng);
    std::sort(means.begin(), means.end());
    const double tail = (1.0 - level) / 2.0;
    return {quantile_sorted(means, tail), quantile_sorted(means, 1.0 - tail)};
}

ThresholdEstimate estimate_threshold(std::span<const RevenuePoint> points, std::uint32_t resamples,
                                     std::uint64_t seed) {
    if (points.size() < 2) throw std::invalid_argument("estimate_threshold: need at least two grid points");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].alpha > points[i - 1].alpha)) {
            throw std::invalid_argument("estimate_threshold: grid must be strictly ascending");
        }
    }

    ThresholdEstimate est;
    auto surplus = [](const RevenuePoint& p) { return p.mean_revenue - p.alpha; };

    if (surplus(points.front()) >= 0.0) {
        const double a = points.front().alpha;
        est.threshold = a;
        est.bracket = {a, a};
        est.ci95 = {a, a};
        est.at_grid_start = true;
        return est;
    }

    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const auto& lo = points[i];
        const auto& hi = points[i + 1];
        if (!(surplus(lo) < 0.0 && surplus(hi) >= 0.0)) continue;

        const double t = interpolate_root(lo.alpha, surplus(lo), hi.alpha, surplus(hi));
        est.threshold = t;
        est.bracket = {lo.alpha, hi.alpha};

        SplitMix64 rng(mix64(seed));
        std::vector<double> crossings(resamples);
        for (auto& c : crossings) {
            const double d_lo = resample_mean(lo.run_revenues, rng) - lo.alpha;
            const double d_hi = resample_mean(hi.run_revenues, rng) - hi.alpha;
            if (d_lo >= 0.0) {
                c = lo.alpha;
            } else if (d_hi < 0.0) {
                c = hi.alpha;
            } else {
                c = interpolate_root(lo.alpha, d_lo, hi.alpha, d_hi);
            }
        }
        std::sort(crossings.begin(), crossings.end());
        est.ci95 = {quantile_sorted(crossings, 0.025), quantile_sorted(crossings, 0.975)};
        est.crossing_confirmed = est.ci95.first <= t && t <= est.ci95.second;
        return est;
    }
    return est;
}

SweepOutcome sweep_threshold(const SweepConfig& sweep) {
    SweepOutcome out;
    out.points = run_sweep(sweep);
    out.threshold = estimate_threshold(out.points);
    if (!sweep.refine || !out.threshold.threshold || out.threshold.at_grid_start) return out;

    const auto [lo, hi] = out.threshold.bracket;
    SweepConfig mid = sweep;
    mid.alpha_grid = {std::round((lo + hi) / 2.0 * 1e9) / 1e9};
    if (!(mid.alpha_grid[0] > lo && mid.alpha_grid[0] < hi)) return out;
    auto extra = run_sweep(mid);
    out.points.push_back(std::move(extra.front()));
    std::sort(out.points.begin(), out.points.end(),
              [](const RevenuePoint& a, const RevenuePoint& b) { return a.alpha < b.alpha; });
    out.threshold = estimate_threshold(out.points);
    return out;
}

}  // namespace smsim
