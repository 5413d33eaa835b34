#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "esnd/rng.hpp"

namespace esnd::chaos {

/// Skew tent map parameters: peak abscissa alpha and initial condition d0,
/// both strictly inside (-1, 1).
struct MapParams {
    double alpha = 0.0;
    double d0 = 0.0;

    void validate() const {
        if (!(alpha > -1.0 && alpha < 1.0))
            throw std::domain_error("MapParams: alpha must lie strictly inside (-1, 1)");
        if (!(d0 > -1.0 && d0 < 1.0))
            throw std::domain_error("MapParams: d0 must lie strictly inside (-1, 1)");
    }
};

struct Orbit {
    std::vector<double> samples;
    MapParams params;
};

/// Iterates land on the boundary occasionally (the map's peak value is
/// exactly 1); they are pulled back to the nearest interior point at this
/// distance before the next step.
inline constexpr double kInteriorMargin = 0x1.0p-52;

/// One application of the skew tent map. The left branch covers -1 < d < alpha,
/// the right branch alpha <= d < 1; the boundary d == alpha belongs to the
/// right branch.
inline double map_step(double d, double alpha) {
    if (!(alpha > -1.0 && alpha < 1.0))
        throw std::domain_error("map_step: alpha must lie strictly inside (-1, 1)");
    if (!(d > -1.0 && d < 1.0))
        throw std::domain_error("map_step: d must lie strictly inside (-1, 1)");
    if (d < alpha)
        return (1.0 - alpha) / (1.0 + alpha) + 2.0 * d / (1.0 + alpha);
    return (1.0 + alpha) / (1.0 - alpha) - 2.0 * d / (1.0 - alpha);
}

/// Generates length samples starting from params.d0.
///
/// Two perturbations keep long orbits on the map's uniform invariant density:
///   - iterates landing on or beyond +-1 are clamped to the nearest interior
///     point at distance 2^-52;
///   - a seeded dither of magnitude <= 2^-52 (one ulp at the iterate scale) is
///     added after each map evaluation. When alpha is exactly representable
///     with dyadic branch slopes (alpha = 0 in particular) the bare iteration
///     is exact in binary arithmetic and collapses every orbit onto a short
///     cycle within ~53 steps; the dither supplies the low-order bits the real
///     map would have.
/// The dither stream is seeded from (alpha, d0), so the orbit is a pure
/// function of (alpha, d0, length) and longer runs extend shorter ones.
inline Orbit generate_orbit(const MapParams& params, std::size_t length) {
    params.validate();
    if (length < 1)
        throw std::invalid_argument("generate_orbit: length must be at least 1");

    Orbit orbit;
    orbit.params = params;
    orbit.samples.resize(length);
    orbit.samples[0] = params.d0;

    rng::Engine dither(rng::mix(rng::bits_of(params.alpha), rng::bits_of(params.d0)));
    double d = params.d0;
    for (std::size_t n = 1; n < length; ++n) {
        double next = map_step(d, params.alpha);
        next += (rng::uniform01(dither) - 0.5) * 0x1.0p-51;
        if (next >= 1.0)
            next = 1.0 - kInteriorMargin;
        else if (next <= -1.0)
            next = -1.0 + kInteriorMargin;
        orbit.samples[n] = next;
        d = next;
    }
    return orbit;
}

/// Power spectral density of skew tent orbits at normalized frequency omega,
/// P(omega) = (1 - alpha^2) / (3 (1 + alpha^2 - 2 alpha cos omega)).
/// Its mean over omega equals the orbit variance 1/3.
inline double analytic_psd(double alpha, double omega) {
    if (!(alpha > -1.0 && alpha < 1.0))
        throw std::domain_error("analytic_psd: alpha must lie strictly inside (-1, 1)");
    return (1.0 - alpha * alpha) / (3.0 * (1.0 + alpha * alpha - 2.0 * alpha * std::cos(omega)));
}

struct PsdBin {
    double omega = 0.0;
    double power = 0.0;
};

/// Averaged periodogram over non-overlapping rectangular windows.
///
/// The record is demeaned over the segmented portion, so by Parseval the mean
/// of the returned powers equals that portion's sample variance. Bins are
/// returned in ascending omega order covering (-pi, pi].
inline std::vector<PsdBin> estimate_psd(std::span<const double> samples, std::size_t segment_length) {
    if (segment_length < 2)
        throw std::invalid_argument("estimate_psd: segment_length must be at least 2");
    if (samples.size() < 4 * segment_length)
        throw std::invalid_argument("estimate_psd: record shorter than four segments");

    const std::size_t n_segments = samples.size() / segment_length;
    const std::size_t used = n_segments * segment_length;

    double mean = 0.0;
    for (std::size_t i = 0; i < used; ++i) mean += samples[i];
    mean /= static_cast<double>(used);

    Eigen::FFT<double> fft;
    std::vector<double> segment(segment_length);
    std::vector<std::complex<double>> spectrum(segment_length);
    std::vector<double> accum(segment_length, 0.0);

    for (std::size_t s = 0; s < n_segments; ++s) {
        for (std::size_t i = 0; i < segment_length; ++i)
            segment[i] = samples[s * segment_length + i] - mean;
        fft.fwd(spectrum, segment);
        for (std::size_t k = 0; k < segment_length; ++k)
            accum[k] += std::norm(spectrum[k]);
    }

    const double scale = 1.0 / (static_cast<double>(n_segments) * static_cast<double>(segment_length));
    const double step = 2.0 * std::numbers::pi / static_cast<double>(segment_length);

    std::vector<PsdBin> bins;
    bins.reserve(segment_length);
    // negative frequencies first so omega ascends over (-pi, pi]
    for (std::size_t k = segment_length / 2 + 1; k < segment_length; ++k)
        bins.push_back({static_cast<double>(k) * step - 2.0 * std::numbers::pi, accum[k] * scale});
    for (std::size_t k = 0; k <= segment_length / 2; ++k)
        bins.push_back({static_cast<double>(k) * step, accum[k] * scale});
    return bins;
}

inline std::vector<PsdBin> estimate_psd(const Orbit& orbit, std::size_t segment_length) {
    return estimate_psd(std::span<const double>(orbit.samples), segment_length);
}

} // namespace esnd::chaos
