#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "esnd/rng.hpp"

namespace esnd::noise {

/// Additive white Gaussian noise at a requested input SNR. A snr_in_db of
/// +infinity disables the noise entirely.
struct NoiseSpec {
    double snr_in_db = 2.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (std::isnan(snr_in_db) || snr_in_db == -std::numeric_limits<double>::infinity())
            throw std::domain_error("NoiseSpec: snr_in_db must be finite or +inf");
    }
};

struct CorruptedSignal {
    std::vector<double> u;  ///< d + w
    std::vector<double> d;  ///< clean signal, kept for supervision and metrics
    double realized_snr_db = 0.0;
};

inline double mean_power(std::span<const double> x) {
    if (x.empty())
        throw std::invalid_argument("mean_power: empty signal");
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc / static_cast<double>(x.size());
}

/// Adds zero-mean Gaussian noise with variance mean_power(d) / 10^(snr/10).
/// The variance is calibrated against the measured power of this particular
/// record, not a theoretical value, so the realized SNR tracks the request
/// on finite records. realized_snr_db reports the actual draw.
inline CorruptedSignal corrupt(std::span<const double> d, const NoiseSpec& spec) {
    spec.validate();
    if (d.empty())
        throw std::invalid_argument("corrupt: empty signal");

    CorruptedSignal out;
    out.d.assign(d.begin(), d.end());

    const double signal_power = mean_power(d);
    const bool noiseless = std::isinf(spec.snr_in_db) || signal_power == 0.0;
    if (noiseless) {
        out.u = out.d;
        out.realized_snr_db = std::numeric_limits<double>::infinity();
        return out;
    }

    const double sigma = std::sqrt(signal_power / std::pow(10.0, spec.snr_in_db / 10.0));
    rng::Gaussian gauss(spec.seed);

    out.u.resize(d.size());
    double noise_energy = 0.0;
    for (std::size_t n = 0; n < d.size(); ++n) {
        const double w = sigma * gauss();
        out.u[n] = d[n] + w;
        noise_energy += w * w;
    }
    const double noise_power = noise_energy / static_cast<double>(d.size());
    out.realized_snr_db = 10.0 * std::log10(signal_power / noise_power);
    return out;
}

} // namespace esnd::noise
