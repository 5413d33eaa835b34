#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>
#include <vector>

#include "esnd/esn.hpp"
#include "esnd/pipeline.hpp"

// Cyclic coordinate descent over (a, lambda, p, q) maximizing processing gain.

namespace esnd::tuning {

/// Gain reported for cells the readout cannot be solved on (a = 0).
inline constexpr double kUntrainableGain = -std::numeric_limits<double>::infinity();

/// Gains closer than this are treated as ties during a scan.
inline constexpr double kGainTieTolerance = 1e-9;

struct TuneGrid {
    std::vector<double> a_grid;
    std::vector<double> lambda_grid;
    std::vector<double> p_grid;
    std::vector<double> q_grid;
    double initial_lambda = 0.05;
    double initial_p = 0.0;
    double initial_q = 0.5;

    /// a: 0..1 step 0.05; lambda: 0.05..1 step 0.05; p: 0..10 step 0.5;
    /// q: 0.5..10 step 0.5; starting values (lambda0, p0, q0) = (0.05, 0, 0.5).
    static TuneGrid standard() {
        TuneGrid grid;
        for (int i = 0; i <= 20; ++i) grid.a_grid.push_back(i * 0.05);
        for (int i = 1; i <= 20; ++i) grid.lambda_grid.push_back(i * 0.05);
        for (int i = 0; i <= 20; ++i) grid.p_grid.push_back(i * 0.5);
        for (int i = 1; i <= 20; ++i) grid.q_grid.push_back(i * 0.5);
        return grid;
    }

    void validate() const {
        if (a_grid.empty() || lambda_grid.empty() || p_grid.empty() || q_grid.empty())
            throw std::invalid_argument("TuneGrid: all four grids must be non-empty");
    }
};

enum class Coord { Leakage, SpectralRadius, BiasScale, InputScale };

inline constexpr std::array<Coord, 4> kDefaultOrder = {
    Coord::Leakage, Coord::SpectralRadius, Coord::BiasScale, Coord::InputScale};

inline char coord_letter(Coord c) {
    switch (c) {
        case Coord::Leakage: return 'a';
        case Coord::SpectralRadius: return 'l';
        case Coord::BiasScale: return 'p';
        case Coord::InputScale: return 'q';
    }
    return '?';
}

/// One record per coordinate scan: the parameter vector after the scan and
/// the gain at that point. scan counts scans from 1, cycle the enclosing
/// full (4-scan) cycle from 1.
struct TuneRecord {
    int cycle = 0;
    int scan = 0;
    Coord coord = Coord::Leakage;
    double a = 0.0;
    double lambda = 0.0;
    double p = 0.0;
    double q = 0.0;
    double gain_db = 0.0;
};

struct TuneTrace {
    std::vector<TuneRecord> records;
    bool converged = false;
    int cycles = 0;  ///< full cycles executed
    int scans = 0;   ///< coordinate scans executed
};

struct TuneResult {
    double a = 0.0;
    double lambda = 0.0;
    double p = 0.0;
    double q = 0.0;
    double gain_db = kUntrainableGain;
    TuneTrace trace;
};

/// The scenario data (orbit, noise, weight seed) is fixed for a whole tuning
/// run so the objective is deterministic; eval_len is the per-cell scoring
/// window.
struct TuneScenario {
    double alpha = 0.1;
    double snr_in_db = 2.0;
    esn::EsnConfig base;           ///< a / lambda / p / q are overwritten per cell
    std::size_t eval_len = 975000;
    std::uint64_t seed = 1;
};

using Objective = std::function<double(double a, double lambda, double p, double q)>;
using EvalLogger = std::function<void(int cycle, Coord coord, double a, double lambda,
                                      double p, double q, double gain_db)>;

/// Builds the deterministic gain objective for a scenario. The record and the
/// reservoir weight seed are prepared once and shared by every cell; the
/// objective is safe to call from several threads.
inline Objective make_objective(const TuneScenario& scenario) {
    const pipeline::CellSeeds seeds =
        pipeline::derive_cell_seeds(scenario.seed, scenario.alpha, 0);
    const std::size_t total_len = static_cast<std::size_t>(scenario.base.transient) +
                                  static_cast<std::size_t>(scenario.base.train_len) +
                                  scenario.eval_len;
    auto data = std::make_shared<const pipeline::Scenario>(
        pipeline::make_scenario(scenario.alpha, scenario.snr_in_db, seeds, total_len));

    return [data, base = scenario.base, eval_len = scenario.eval_len,
            weight_seed = seeds.weights](double a, double lambda, double p, double q) {
        esn::EsnConfig config = base;
        config.leakage = a;
        config.spectral_radius = lambda;
        config.bias_scale = p;
        config.input_scale = q;
        config.seed = weight_seed;
        try {
            return pipeline::esn_denoise(config, *data, eval_len).gain_db;
        } catch (const esn::UntrainableError&) {
            return kUntrainableGain;
        }
    };
}

/// Gain for a single parameter cell on the scenario's fixed data.
inline double evaluate_cell(double a, double lambda, double p, double q,
                            const TuneScenario& scenario) {
    return make_objective(scenario)(a, lambda, p, q);
}

namespace detail {

inline std::vector<double> scan_gains(const Objective& objective, Coord coord,
                                      const std::vector<double>& grid, double a, double lambda,
                                      double p, double q, int workers) {
    std::vector<double> gains(grid.size());
    auto eval_at = [&](std::size_t i) {
        double ca = a, cl = lambda, cp = p, cq = q;
        switch (coord) {
            case Coord::Leakage: ca = grid[i]; break;
            case Coord::SpectralRadius: cl = grid[i]; break;
            case Coord::BiasScale: cp = grid[i]; break;
            case Coord::InputScale: cq = grid[i]; break;
        }
        gains[i] = objective(ca, cl, cp, cq);
    };

    const int n_workers = std::min<int>(std::max(workers, 1), static_cast<int>(grid.size()));
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) eval_at(i);
    } else {
        // gains are collected by grid index, so the argmax below does not
        // depend on completion order
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1))
                    eval_at(i);
            });
        for (auto& th : pool) th.join();
    }
    return gains;
}

/// Tie rule: keep the incumbent when it is within tolerance of the best,
/// otherwise take the smallest grid value among the tied leaders. This keeps
/// the "no change over a full cycle" stopping rule well defined.
inline double select_value(const std::vector<double>& grid, const std::vector<double>& gains,
                           double incumbent, double* selected_gain) {
    double best = -std::numeric_limits<double>::infinity();
    for (double g : gains) best = std::max(best, g);

    double chosen = grid.front();
    double chosen_gain = gains.front();
    bool found = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(gains[i] >= best - kGainTieTolerance))
            continue;
        if (grid[i] == incumbent) {
            chosen = grid[i];
            chosen_gain = gains[i];
            found = true;
            break;
        }
        if (!found) {
            chosen = grid[i];
            chosen_gain = gains[i];
            found = true;
        }
    }
    *selected_gain = chosen_gain;
    return chosen;
}

} // namespace detail

/// Cycles through the coordinates in the given order, scanning each full grid
/// while holding the others fixed, until a complete cycle changes nothing or
/// max_cycles is hit (converged=false in that case, best-so-far returned).
/// Starting point: lambda/p/q from the grid's initial values, a from the
/// first grid entry (the default order scans a first, which overrides it).
inline TuneResult coordinate_descent(const TuneGrid& grid, const Objective& objective,
                                     std::array<Coord, 4> order = kDefaultOrder,
                                     int max_cycles = 50, int workers = 1,
                                     const EvalLogger& logger = nullptr) {
    grid.validate();
    {
        std::array<bool, 4> seen{};
        for (Coord c : order) seen[static_cast<std::size_t>(c)] = true;
        if (!(seen[0] && seen[1] && seen[2] && seen[3]))
            throw std::invalid_argument("coordinate_descent: order must name each coordinate once");
    }

    TuneResult result;
    result.a = grid.a_grid.front();
    result.lambda = grid.initial_lambda;
    result.p = grid.initial_p;
    result.q = grid.initial_q;

    for (int cycle = 1; cycle <= max_cycles; ++cycle) {
        bool changed = false;
        for (Coord coord : order) {
            const std::vector<double>* coord_grid = nullptr;
            double* value = nullptr;
            switch (coord) {
                case Coord::Leakage: coord_grid = &grid.a_grid; value = &result.a; break;
                case Coord::SpectralRadius: coord_grid = &grid.lambda_grid; value = &result.lambda; break;
                case Coord::BiasScale: coord_grid = &grid.p_grid; value = &result.p; break;
                case Coord::InputScale: coord_grid = &grid.q_grid; value = &result.q; break;
            }

            const std::vector<double> gains = detail::scan_gains(
                objective, coord, *coord_grid, result.a, result.lambda, result.p, result.q, workers);
            if (logger) {
                for (std::size_t i = 0; i < coord_grid->size(); ++i) {
                    double ca = result.a, cl = result.lambda, cp = result.p, cq = result.q;
                    switch (coord) {
                        case Coord::Leakage: ca = (*coord_grid)[i]; break;
                        case Coord::SpectralRadius: cl = (*coord_grid)[i]; break;
                        case Coord::BiasScale: cp = (*coord_grid)[i]; break;
                        case Coord::InputScale: cq = (*coord_grid)[i]; break;
                    }
                    logger(cycle, coord, ca, cl, cp, cq, gains[i]);
                }
            }

            double selected_gain = kUntrainableGain;
            const double selected = detail::select_value(*coord_grid, gains, *value, &selected_gain);
            if (selected != *value)
                changed = true;
            *value = selected;
            result.gain_db = selected_gain;

            ++result.trace.scans;
            result.trace.records.push_back({cycle, result.trace.scans, coord, result.a,
                                            result.lambda, result.p, result.q, selected_gain});
        }
        result.trace.cycles = cycle;
        if (!changed) {
            result.trace.converged = true;
            break;
        }
    }
    return result;
}

inline TuneResult coordinate_descent(const TuneGrid& grid, const TuneScenario& scenario,
                                     std::array<Coord, 4> order = kDefaultOrder,
                                     int max_cycles = 50, int workers = 1,
                                     const EvalLogger& logger = nullptr) {
    return coordinate_descent(grid, make_objective(scenario), order, max_cycles, workers, logger);
}

} // namespace esnd::tuning
