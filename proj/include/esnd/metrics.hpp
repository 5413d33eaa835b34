#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

namespace esnd::metrics {

/// Per-(alpha, SNR_in) processing-gain record with repetition statistics.
struct GainReport {
    double alpha = 0.0;
    double snr_in_db = 0.0;
    double snr_out_db = 0.0;
    double gain_db = 0.0;        ///< snr_out_db - snr_in_db, exactly
    int repetitions = 0;
    double gain_mean_db = 0.0;
    double gain_std_db = 0.0;
    std::size_t eval_len = 0;
};

/// Output SNR over the half-open window [start, end):
///   sum y^2 / sum (d - y)^2
/// The numerator is the estimate's power, not the clean signal's; that is the
/// form the gain figures are defined with, and it is what makes the optimal
/// linear filter score exactly 0 dB gain on a white signal. Returns +inf when
/// the error is identically zero.
inline double snr_out(std::span<const double> y, std::span<const double> d,
                      std::size_t start, std::size_t end) {
    if (end <= start)
        throw std::invalid_argument("snr_out: end must exceed start");
    if (y.size() < end || d.size() < end)
        throw std::invalid_argument("snr_out: window not covered by the sequences");

    double num = 0.0, den = 0.0;
    for (std::size_t n = start; n < end; ++n) {
        num += y[n] * y[n];
        const double e = d[n] - y[n];
        den += e * e;
    }
    if (den == 0.0)
        return std::numeric_limits<double>::infinity();
    return num / den;
}

/// Reference variant with the clean signal's power in the numerator,
/// sum d^2 / sum (d - y)^2. Reported alongside for comparison only.
inline double snr_out_ref(std::span<const double> y, std::span<const double> d,
                          std::size_t start, std::size_t end) {
    if (end <= start)
        throw std::invalid_argument("snr_out_ref: end must exceed start");
    if (y.size() < end || d.size() < end)
        throw std::invalid_argument("snr_out_ref: window not covered by the sequences");

    double num = 0.0, den = 0.0;
    for (std::size_t n = start; n < end; ++n) {
        num += d[n] * d[n];
        const double e = d[n] - y[n];
        den += e * e;
    }
    if (den == 0.0)
        return std::numeric_limits<double>::infinity();
    return num / den;
}

/// Processing gain in dB: 10 log10(snr_out_linear) - snr_in_db.
inline double gain_db(double snr_out_linear, double snr_in_db) {
    if (!(snr_out_linear > 0.0))
        throw std::domain_error("gain_db: SNR ratio must be positive");
    return 10.0 * std::log10(snr_out_linear) - snr_in_db;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

/// Sample mean and sample standard deviation (n-1 denominator).
/// A single value has std 0 by convention.
inline MeanStd aggregate(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("aggregate: empty input");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() == 1)
        return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) {
        const double dv = v - mean;
        ss += dv * dv;
    }
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

} // namespace esnd::metrics
