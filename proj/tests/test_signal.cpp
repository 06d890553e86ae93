#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "snakecpg/signal.hpp"

using namespace snakecpg::cpg;

namespace {

std::vector<double> sine(double freq, double offset, double amp, double dt, double T,
                         double phase = 0.3) {
  std::vector<double> v;
  for (double t = 0; t < T; t += dt)
    v.push_back(offset + amp * std::sin(2 * std::numbers::pi * freq * t + phase));
  return v;
}

}  // namespace

TEST(MeasureBias, SineWithOffset) {
  const auto v = sine(1.3, 0.25, 1.0, 1e-3, 7.0);
  const auto b = measure_bias(v);
  EXPECT_TRUE(b.oscillatory);
  EXPECT_NEAR(b.bias, 0.25, 1e-5);
  EXPECT_GE(b.periods, 8u);
}

TEST(MeasureBias, ConstantSignal) {
  const std::vector<double> v(100, 0.7);
  const auto b = measure_bias(v);
  EXPECT_FALSE(b.oscillatory);
  EXPECT_NEAR(b.bias, 0.7, 1e-14);
}

TEST(MeasureBias, EmptyThrows) {
  EXPECT_THROW(measure_bias(std::vector<double>{}), std::invalid_argument);
}

// A window mean is biased by the partial period; the crossing-aligned
// estimate is not.
TEST(MeasureBias, IgnoresPartialPeriod) {
  const auto v = sine(1.0, 0.0, 1.0, 1e-3, 3.25, 0.0);
  EXPECT_NEAR(measure_bias(v).bias, 0.0, 1e-5);
}

TEST(MeasureFrequency, Sine) {
  EXPECT_NEAR(measure_frequency(sine(2.5, 0.1, 0.5, 1e-3, 4.0), 1e-3), 2.5, 1e-4);
  EXPECT_NEAR(measure_frequency(sine(0.7, 0.0, 2.0, 1e-3, 10.0), 1e-3), 0.7, 1e-4);
}

TEST(MeasureFrequency, Errors) {
  EXPECT_THROW(measure_frequency(sine(1, 0, 1, 1e-3, 1.5), 1e-3), std::runtime_error);
  EXPECT_THROW(measure_frequency(sine(1, 0, 1, 1e-3, 5), 0.0), std::invalid_argument);
}

TEST(HalfAmplitude, PeakToPeak) {
  EXPECT_NEAR(half_amplitude(sine(1.0, 3.0, 0.4, 1e-3, 2.0)), 0.4, 1e-6);
  EXPECT_DOUBLE_EQ(half_amplitude(std::vector<double>{}), 0.0);
}
