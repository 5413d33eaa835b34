#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "esnd/noise.hpp"

namespace esnd::wiener {

struct Correlations {
    Eigen::VectorXd autocorr;   ///< r_u(k), k = 0..max_lag-1
    Eigen::VectorXd crosscorr;  ///< r_du(k), k = 0..max_lag-1
};

/// FIR Wiener filter: taps solve the Toeplitz normal equations R h = p built
/// from the vectors kept here as diagnostics.
struct WienerFilter {
    Eigen::VectorXd taps;
    Eigen::VectorXd autocorr;
    Eigen::VectorXd crosscorr;
};

/// Biased (1/M) correlation estimates over a common record:
///   r_u(k)  = (1/M) sum_n u(n) u(n-k)
///   r_du(k) = (1/M) sum_n d(n-delay) u(n-k)
/// The biased form keeps the Toeplitz matrix positive semidefinite. delay
/// shifts the estimation target to d(n-delay) for delayed-filter designs;
/// the default 0 estimates d(n) from u(n..n-K+1).
inline Correlations estimate_correlations(std::span<const double> u, std::span<const double> d,
                                          int max_lag, int delay = 0) {
    if (u.size() != d.size())
        throw std::invalid_argument("estimate_correlations: u and d lengths differ");
    if (max_lag < 1)
        throw std::invalid_argument("estimate_correlations: max_lag must be >= 1");
    if (delay < 0)
        throw std::invalid_argument("estimate_correlations: delay must be non-negative");
    const std::size_t m = u.size();
    if (m < 10 * static_cast<std::size_t>(max_lag))
        throw std::invalid_argument("estimate_correlations: record too short (need at least 10 * max_lag samples)");

    Correlations corr;
    corr.autocorr.resize(max_lag);
    corr.crosscorr.resize(max_lag);
    for (int k = 0; k < max_lag; ++k) {
        double ru = 0.0;
        for (std::size_t n = static_cast<std::size_t>(k); n < m; ++n)
            ru += u[n] * u[n - static_cast<std::size_t>(k)];
        corr.autocorr[k] = ru / static_cast<double>(m);

        double rdu = 0.0;
        const std::size_t first = static_cast<std::size_t>(std::max(k, delay));
        for (std::size_t n = first; n < m; ++n)
            rdu += d[n - static_cast<std::size_t>(delay)] * u[n - static_cast<std::size_t>(k)];
        corr.crosscorr[k] = rdu / static_cast<double>(m);
    }
    return corr;
}

/// Solves R h = p for the taps. R must be numerically positive definite;
/// the solve residual is verified against ||R h - p|| <= 1e-8 ||p||.
inline WienerFilter design(const Eigen::VectorXd& autocorr, const Eigen::VectorXd& crosscorr) {
    if (autocorr.size() != crosscorr.size() || autocorr.size() < 1)
        throw std::invalid_argument("design: correlation vectors must have equal, positive length");

    const Eigen::Index k = autocorr.size();
    Eigen::MatrixXd toeplitz(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            toeplitz(i, j) = autocorr[std::abs(i - j)];

    Eigen::LLT<Eigen::MatrixXd> llt(toeplitz);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("design: autocorrelation matrix is not positive definite; "
                                 "estimate over a longer record");

    WienerFilter filter;
    filter.taps = llt.solve(crosscorr);
    filter.autocorr = autocorr;
    filter.crosscorr = crosscorr;

    const double residual = (toeplitz * filter.taps - crosscorr).norm();
    if (residual > 1e-8 * crosscorr.norm())
        throw std::runtime_error("design: normal-equation residual exceeds 1e-8 * ||p||");
    return filter;
}

/// Causal FIR convolution, y(n) = sum_k h(k) u(n-k) with u(n) = 0 for n < 0.
inline std::vector<double> apply(const WienerFilter& filter, std::span<const double> u) {
    const Eigen::Index k = filter.taps.size();
    std::vector<double> y(u.size(), 0.0);
    for (std::size_t n = 0; n < u.size(); ++n) {
        const Eigen::Index reach = std::min<Eigen::Index>(k - 1, static_cast<Eigen::Index>(n));
        double acc = 0.0;
        for (Eigen::Index j = 0; j <= reach; ++j)
            acc += filter.taps[j] * u[n - static_cast<std::size_t>(j)];
        y[n] = acc;
    }
    return y;
}

} // namespace esnd::wiener
