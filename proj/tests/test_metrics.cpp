#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "esnd/chaos.hpp"
#include "esnd/metrics.hpp"
#include "esnd/rng.hpp"

using namespace esnd::metrics;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(SnrOut, PerfectEstimateIsInfinite) {
    const std::vector<double> d{0.1, -0.3, 0.5};
    EXPECT_EQ(snr_out(d, d, 0, 3), kInf);
}

TEST(SnrOut, NullEstimateIsZero) {
    const std::vector<double> y{0.0, 0.0, 0.0};
    const std::vector<double> d{0.1, -0.3, 0.5};
    EXPECT_DOUBLE_EQ(snr_out(y, d, 0, 3), 0.0);
}

TEST(SnrOut, NumeratorIsTheEstimatePower) {
    // y = d + g with unit-power g and d power ~1/3: the ratio expectation is
    // (1/3 + 1)/1, which distinguishes the estimate-power numerator from the
    // clean-power one (whose expectation is 1/3)
    const auto orbit = esnd::chaos::generate_orbit({0.6, 0.17}, 1000000);
    esnd::rng::Gaussian gauss(13);
    std::vector<double> y(orbit.samples.size());
    for (std::size_t n = 0; n < y.size(); ++n)
        y[n] = orbit.samples[n] + gauss();

    const double literal = snr_out(y, orbit.samples, 0, y.size());
    const double reference = snr_out_ref(y, orbit.samples, 0, y.size());
    EXPECT_NEAR(literal, 4.0 / 3.0, 0.02);
    EXPECT_NEAR(reference, 1.0 / 3.0, 0.01);
}

TEST(SnrOut, WindowValidation) {
    const std::vector<double> d{0.1, -0.3, 0.5};
    EXPECT_THROW(snr_out(d, d, 2, 2), std::invalid_argument);
    EXPECT_THROW(snr_out(d, d, 0, 4), std::invalid_argument);
}

TEST(GainDb, KnownValues) {
    EXPECT_DOUBLE_EQ(gain_db(1.0, 0.0), 0.0);
    // 10 log10(10^0.77) - 2 = 5.7, the tuned-network working point
    EXPECT_NEAR(gain_db(std::pow(10.0, 0.77), 2.0), 5.7, 1e-12);
    // 10 log10(10^0.51) - 2 = 3.1, the baseline working point
    EXPECT_NEAR(gain_db(std::pow(10.0, 0.51), 2.0), 3.1, 1e-12);
}

TEST(GainDb, RejectsNonPositiveRatios) {
    EXPECT_THROW(gain_db(0.0, 0.0), std::domain_error);
    EXPECT_THROW(gain_db(-1.0, 0.0), std::domain_error);
}

TEST(GainDb, DecibelRoundTrip) {
    for (double x = -50.0; x <= 50.0; x += 2.5)
        EXPECT_NEAR(gain_db(std::pow(10.0, x / 10.0), 0.0), x, 1e-12);
}

TEST(Aggregate, ConstantAndTextbookValues) {
    const std::vector<double> constant{3.0, 3.0, 3.0};
    const MeanStd a = aggregate(constant);
    EXPECT_DOUBLE_EQ(a.mean, 3.0);
    EXPECT_DOUBLE_EQ(a.std, 0.0);

    const std::vector<double> textbook{1.0, 2.0, 3.0, 4.0, 5.0};
    const MeanStd b = aggregate(textbook);
    EXPECT_DOUBLE_EQ(b.mean, 3.0);
    EXPECT_NEAR(b.std, 1.5811388300841898, 1e-15);  // sqrt(2.5)
}

TEST(Aggregate, EdgeCases) {
    EXPECT_THROW(aggregate(std::vector<double>{}), std::invalid_argument);
    const std::vector<double> single{7.0};
    const MeanStd s = aggregate(single);
    EXPECT_DOUBLE_EQ(s.mean, 7.0);
    EXPECT_DOUBLE_EQ(s.std, 0.0);
}
