#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "esnd/chaos.hpp"
#include "esnd/noise.hpp"
#include "oracles.hpp"

using esnd::noise::corrupt;
using esnd::noise::mean_power;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(MeanPower, Basics) {
    EXPECT_DOUBLE_EQ(mean_power(std::vector<double>{0.0, 0.0, 0.0}), 0.0);
    EXPECT_DOUBLE_EQ(mean_power(std::vector<double>{1.0, -1.0, 1.0, -1.0}), 1.0);
    EXPECT_THROW(mean_power(std::vector<double>{}), std::invalid_argument);
}

TEST(MeanPower, LongOrbitPowerIsOneThird) {
    // uniform density on (-1,1): E[d^2] = integral x^2/2 dx = 1/3
    const auto orbit = esnd::chaos::generate_orbit({0.7, 0.55}, 1000000);
    EXPECT_NEAR(mean_power(orbit.samples), 1.0 / 3.0, 0.01);
}

TEST(Corrupt, InfiniteSnrDisablesNoise) {
    const std::vector<double> d{0.1, -0.2, 0.4};
    const auto out = corrupt(d, {kInf, 7});
    EXPECT_EQ(out.u, d);
    EXPECT_EQ(out.realized_snr_db, kInf);
}

TEST(Corrupt, NoiseVarianceMatchesRequestedSnr) {
    const auto orbit = esnd::chaos::generate_orbit({0.7, 0.31}, 1000000);
    const double pd = mean_power(orbit.samples);
    const double requested_sigma2 = pd / std::pow(10.0, 2.0 / 10.0);
    // with pd near 1/3 this is the 0.21034 working point
    EXPECT_NEAR(requested_sigma2, 0.21034, 0.007);

    const auto out = corrupt(orbit.samples, {2.0, 11});
    std::vector<double> w(out.u.size());
    for (std::size_t n = 0; n < w.size(); ++n) w[n] = out.u[n] - out.d[n];
    EXPECT_NEAR(mean_power(w) / requested_sigma2, 1.0, 0.01);
}

TEST(Corrupt, RealizedSnrTracksRequest) {
    const auto orbit = esnd::chaos::generate_orbit({0.5, 0.13}, 1000000);
    const auto out = corrupt(orbit.samples, {2.0, 23});
    EXPECT_NEAR(out.realized_snr_db, 2.0, 0.05);
}

TEST(Corrupt, Reproducible) {
    const auto orbit = esnd::chaos::generate_orbit({0.5, 0.13}, 2000);
    const auto a = corrupt(orbit.samples, {2.0, 5});
    const auto b = corrupt(orbit.samples, {2.0, 5});
    EXPECT_EQ(a.u, b.u);
    const auto c = corrupt(orbit.samples, {2.0, 6});
    EXPECT_NE(a.u, c.u);
}

TEST(Corrupt, NoiseIsWhite) {
    const auto orbit = esnd::chaos::generate_orbit({0.5, 0.13}, 1000000);
    const auto out = corrupt(orbit.samples, {2.0, 31});
    std::vector<double> w(out.u.size());
    for (std::size_t n = 0; n < w.size(); ++n) w[n] = out.u[n] - out.d[n];

    const double m = static_cast<double>(w.size());
    double r0 = 0.0;
    for (double v : w) r0 += v * v;
    for (int lag = 1; lag <= 20; ++lag) {
        double rk = 0.0;
        for (std::size_t n = static_cast<std::size_t>(lag); n < w.size(); ++n)
            rk += w[n] * w[n - static_cast<std::size_t>(lag)];
        EXPECT_LT(std::abs(rk / r0), 4.0 / std::sqrt(m)) << "lag=" << lag;
    }
}

TEST(Corrupt, SegmentsComeFromOneStream) {
    // noise over a long record is drawn sequentially, so the training and
    // evaluation segments can never replay the same positions
    const auto orbit = esnd::chaos::generate_orbit({0.5, 0.13}, 20000);
    const auto out = corrupt(orbit.samples, {2.0, 9});
    std::vector<double> first, second;
    for (std::size_t n = 0; n < 10000; ++n) {
        first.push_back(out.u[n] - out.d[n]);
        second.push_back(out.u[n + 10000] - out.d[n + 10000]);
    }
    EXPECT_NE(first, second);
}

TEST(Corrupt, RejectsBadInput) {
    EXPECT_THROW(corrupt(std::vector<double>{}, {2.0, 0}), std::invalid_argument);
    EXPECT_THROW(corrupt(std::vector<double>{0.1}, {std::nan(""), 0}), std::domain_error);
    EXPECT_THROW(corrupt(std::vector<double>{0.1}, {-kInf, 0}), std::domain_error);
}
