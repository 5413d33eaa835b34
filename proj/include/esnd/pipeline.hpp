#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "esnd/chaos.hpp"
#include "esnd/esn.hpp"
#include "esnd/metrics.hpp"
#include "esnd/noise.hpp"
#include "esnd/wiener.hpp"

// Shared plumbing between the tuning and experiment drivers: seeded scenario
// construction (orbit + noise) and single denoising evaluations for both
// methods on a common record.

namespace esnd::pipeline {

struct CellSeeds {
    std::uint64_t base = 0;     ///< recorded in result rows
    std::uint64_t orbit = 0;
    std::uint64_t noise = 0;
    std::uint64_t weights = 0;
};

/// Seeds are a pure function of (master seed, alpha value, repetition).
/// Keying on the alpha value itself means extending a sweep grid never
/// changes the cells that were already there.
inline CellSeeds derive_cell_seeds(std::uint64_t master_seed, double alpha, int repetition) {
    CellSeeds seeds;
    seeds.base = rng::mix(rng::mix(master_seed, rng::bits_of(alpha)),
                          static_cast<std::uint64_t>(repetition));
    seeds.orbit = rng::mix(seeds.base, 1);
    seeds.noise = rng::mix(seeds.base, 2);
    seeds.weights = rng::mix(seeds.base, 3);
    return seeds;
}

/// One denoising scenario: a clean orbit, its corrupted version, and the
/// parameters that produced them. d0 is drawn uniformly from (-0.99, 0.99).
struct Scenario {
    std::vector<double> d;
    std::vector<double> u;
    double alpha = 0.0;
    double snr_in_db = 0.0;
    double d0 = 0.0;
    double realized_snr_db = 0.0;
};

inline Scenario make_scenario(double alpha, double snr_in_db, const CellSeeds& seeds,
                              std::size_t total_len) {
    rng::Engine eng(seeds.orbit);
    const double d0 = rng::uniform(eng, -0.99, 0.99);
    chaos::Orbit orbit = chaos::generate_orbit({alpha, d0}, total_len);
    noise::CorruptedSignal corrupted = noise::corrupt(orbit.samples, {snr_in_db, seeds.noise});

    Scenario scenario;
    scenario.d = std::move(corrupted.d);
    scenario.u = std::move(corrupted.u);
    scenario.alpha = alpha;
    scenario.snr_in_db = snr_in_db;
    scenario.d0 = d0;
    scenario.realized_snr_db = corrupted.realized_snr_db;
    return scenario;
}

struct DenoiseOutcome {
    double snr_out_db = 0.0;
    double snr_out_ref_db = 0.0;
    double gain_db = 0.0;
};

inline DenoiseOutcome score(std::span<const double> y, std::span<const double> d,
                            std::size_t start, std::size_t end, double snr_in_db) {
    DenoiseOutcome out;
    const double lin = metrics::snr_out(y, d, start, end);
    out.snr_out_db = 10.0 * std::log10(lin);
    out.snr_out_ref_db = 10.0 * std::log10(metrics::snr_out_ref(y, d, start, end));
    out.gain_db = metrics::gain_db(lin, snr_in_db);
    return out;
}

inline Eigen::Map<const Eigen::MatrixXd> as_row(std::span<const double> x) {
    return {x.data(), 1, static_cast<Eigen::Index>(x.size())};
}

/// Trains an ESN on the scenario's first transient + train_len samples and
/// scores it on the next eval_len samples of the same stream, without
/// resetting the state in between.
inline DenoiseOutcome esn_denoise(const esn::EsnConfig& config, const Scenario& scenario,
                                  std::size_t eval_len) {
    const std::size_t head = static_cast<std::size_t>(config.transient) +
                             static_cast<std::size_t>(config.train_len);
    if (scenario.u.size() < head + eval_len)
        throw std::invalid_argument("esn_denoise: scenario record shorter than training + evaluation window");

    const std::span<const double> u(scenario.u);
    const std::span<const double> d(scenario.d);

    esn::TrainedEsn net = esn::train(config, as_row(u.first(head)), as_row(d.first(head)));
    Eigen::MatrixXd y = esn::run(net, as_row(u.subspan(head, eval_len)));

    const std::span<const double> y_span(y.data(), eval_len);
    return score(y_span, d.subspan(head, eval_len), 0, eval_len, scenario.snr_in_db);
}

/// Designs the FIR Wiener baseline on the same training window the ESN uses
/// and scores it on the same evaluation window. The filter runs over the full
/// record, so evaluation outputs see real history rather than zero padding.
inline DenoiseOutcome wiener_denoise(int taps, const Scenario& scenario, int transient,
                                     int train_len, std::size_t eval_len, int delay = 0) {
    const std::size_t head = static_cast<std::size_t>(transient) + static_cast<std::size_t>(train_len);
    if (scenario.u.size() < head + eval_len)
        throw std::invalid_argument("wiener_denoise: scenario record shorter than training + evaluation window");

    const std::span<const double> u(scenario.u);
    const std::span<const double> d(scenario.d);

    wiener::Correlations corr = wiener::estimate_correlations(
        u.subspan(transient, train_len), d.subspan(transient, train_len), taps, delay);
    wiener::WienerFilter filter = wiener::design(corr.autocorr, corr.crosscorr);
    std::vector<double> y = wiener::apply(filter, u);

    return score(y, d, head, head + eval_len, scenario.snr_in_db);
}

} // namespace esnd::pipeline
