#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "snakecpg/cpg.hpp"
#include "snakecpg/signal.hpp"
#include "support.hpp"

using namespace snakecpg;
using namespace snakecpg::cpg;

TEST(DecodeAction, ZeroGivesHalf) {
  const double a[4] = {0, 0, 0, 0};
  const auto u = decode_action(a);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(u.u_e[i], 0.5);
    EXPECT_DOUBLE_EQ(u.u_f[i], 0.5);
  }
}

TEST(DecodeAction, LogThree) {
  const double a[4] = {std::log(3.0), 0, 0, 0};
  const auto u = decode_action(a);
  EXPECT_NEAR(u.u_e[0], 0.75, 1e-15);
  EXPECT_NEAR(u.u_f[0], 0.25, 1e-15);
  const double b[4] = {-std::log(3.0), 0, 0, 0};
  EXPECT_NEAR(decode_action(b).u_e[0], 0.25, 1e-15);
}

TEST(DecodeAction, RejectsNonFinite) {
  const double a[4] = {0, std::numeric_limits<double>::quiet_NaN(), 0, 0};
  EXPECT_THROW(decode_action(a), std::domain_error);
  const double b[4] = {0, 0, std::numeric_limits<double>::infinity(), 0};
  EXPECT_THROW(decode_action(b), std::domain_error);
}

TEST(DecodeAction, SumsToOneOnWideRange) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-50, 50);
  for (int k = 0; k < 10000; ++k) {
    const double a[4] = {d(rng), d(rng), d(rng), d(rng)};
    const auto u = decode_action(a);
    for (int i = 0; i < 4; ++i) {
      EXPECT_LE(std::abs(u.u_e[i] + u.u_f[i] - 1.0), 1e-12);
      EXPECT_GE(u.u_e[i], 0.0);
      EXPECT_LE(u.u_e[i], 1.0);
    }
  }
}

TEST(ComposeTonic, DegenerateWeight) {
  const auto u1 = TonicInput::uniform(0.8, 0.2), u2 = TonicInput::uniform(0.1, 0.9);
  EXPECT_EQ(compose_tonic(u1, u2, 1.0, 0.0), u1);
}

TEST(ComposeTonic, ArithmeticMean) {
  auto u1 = TonicInput::uniform(0.5, 0.5), u2 = TonicInput::uniform(0.5, 0.5);
  u1.u_e[0] = 0.8;
  u2.u_e[0] = 0.2;
  EXPECT_DOUBLE_EQ(compose_tonic(u1, u2, 0.5, 0.5).u_e[0], 0.5);
}

TEST(ComposeTonic, FixedPointAndLinearImbalance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-4, 4), w(0, 1);
  for (int k = 0; k < 200; ++k) {
    const double a[4] = {d(rng), d(rng), d(rng), d(rng)};
    const double b[4] = {d(rng), d(rng), d(rng), d(rng)};
    const auto u1 = decode_action(a), u2 = decode_action(b);
    const double w1 = w(rng);
    const auto same = compose_tonic(u1, u1, w1, 1.0 - w1);
    const auto u = compose_tonic(u1, u2, w1, 1.0 - w1);
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(same.u_e[i], u1.u_e[i], 1e-15);
      EXPECT_NEAR(same.u_f[i], u1.u_f[i], 1e-15);
      const double expect = w1 * u1.imbalance()[i] + (1.0 - w1) * u2.imbalance()[i];
      EXPECT_NEAR(u.imbalance()[i], expect, 1e-15);
    }
  }
}

TEST(ComposeTonic, RejectsOffSimplex) {
  const auto u = TonicInput::uniform(0.5, 0.5);
  EXPECT_THROW(compose_tonic(u, u, 0.6, 0.6), std::invalid_argument);
  EXPECT_THROW(compose_tonic(u, u, -0.1, 1.1), std::invalid_argument);
}

TEST(StepNetwork, ZeroIsEquilibrium) {
  const auto p = default_params();
  auto s = OscillatorNetworkState::zeros(p.n);
  const CpgCommand cmd{TonicInput::uniform(0, 0), 1.0};
  for (int k = 0; k < 1000; ++k) s = step_network(s, p, cmd, 1e-3);
  EXPECT_EQ(s, OscillatorNetworkState::zeros(p.n));
}

TEST(StepNetwork, Deterministic) {
  const auto p = default_params();
  auto a = OscillatorNetworkState::kicked(p.n), b = a;
  const auto cmd = testutil::imbalance_command(0.1, 2.0);
  for (int k = 0; k < 500; ++k) {
    a = step_network(a, p, cmd, 1e-3);
    b = step_network(b, p, cmd, 1e-3);
  }
  EXPECT_EQ(a, b);
}

TEST(StepNetwork, StabilityBound) {
  const auto p = default_params();
  const auto s = OscillatorNetworkState::kicked(p.n);
  const auto cmd = testutil::imbalance_command(0.0, 0.5);
  const double dt_max = p.tau_r * 0.5 / 5.0;
  EXPECT_NO_THROW(step_network(s, p, cmd, dt_max));
  EXPECT_THROW(step_network(s, p, cmd, dt_max * 1.01), std::invalid_argument);
  EXPECT_THROW(step_network(s, p, cmd, 0.0), std::invalid_argument);
  EXPECT_THROW(step_network(s, p, CpgCommand{cmd.tonic, 0.0}, 1e-3), std::invalid_argument);
}

TEST(StepNetwork, RejectsNonFiniteState) {
  const auto p = default_params();
  auto s = OscillatorNetworkState::zeros(p.n);
  s.y_f[2] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(step_network(s, p, testutil::imbalance_command(0), 1e-3), std::domain_error);
}

// Against an independent forward-Euler integration at a much finer step.
TEST(StepNetwork, AgreesWithFineEuler) {
  const auto p = default_params();
  const auto cmd = testutil::imbalance_command(0.2, 1.0);
  auto s = OscillatorNetworkState::kicked(p.n);
  auto e = s;
  const double dt = 1e-3, h = 1e-6;
  const std::size_t n = p.n;
  for (int k = 0; k < 200; ++k) s = step_network(s, p, cmd, dt);
  for (int k = 0; k < 200000; ++k) {
    auto next = e;
    for (std::size_t i = 0; i < n; ++i) {
      double inh_e = 0, inh_f = 0;
      for (std::size_t j = 0; j < n; ++j) {
        inh_e += p.w[j * n + i] * e.y_e[j];
        inh_f += p.w[j * n + i] * e.y_f[j];
      }
      const double ze = std::max(0.0, e.x_e[i]), zf = std::max(0.0, e.x_f[i]);
      next.x_e[i] += h / p.tau_r * (-e.x_e[i] - p.a * zf - p.b * e.y_e[i] - inh_e + cmd.tonic.u_e[i]);
      next.y_e[i] += h / p.tau_a * (-e.y_e[i] + ze);
      next.x_f[i] += h / p.tau_r * (-e.x_f[i] - p.a * ze - p.b * e.y_f[i] - inh_f + cmd.tonic.u_f[i]);
      next.y_f[i] += h / p.tau_a * (-e.y_f[i] + zf);
    }
    e = next;
  }
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(s.x_e[i], e.x_e[i], 1e-4);
    EXPECT_NEAR(s.y_f[i], e.y_f[i], 1e-4);
  }
}

TEST(NetworkOutput, Rectifier) {
  auto s = OscillatorNetworkState::zeros(4);
  s.x_e = {0.3, 1.0, -1.0, 0.0};
  s.x_f = {0.3, -2.0, 0.5, 0.0};
  const auto psi = network_output(s);
  EXPECT_DOUBLE_EQ(psi[0], 0.0);
  EXPECT_DOUBLE_EQ(psi[1], 1.0);
  EXPECT_DOUBLE_EQ(psi[2], -0.5);
}

TEST(Params, Validation) {
  auto p = default_params();
  EXPECT_NO_THROW(p.validate());
  p.tau_r = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = default_params();
  p.w.pop_back();
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Params, ChainCouplingShapes) {
  const auto sym = chain_coupling(4, 1.0);
  const auto head = headward_chain_coupling(4, 0.2);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < 4; ++i) {
      const bool adj = (i + 1 == j) || (j + 1 == i);
      EXPECT_DOUBLE_EQ(sym[j * 4 + i], adj ? 1.0 : 0.0);
      EXPECT_DOUBLE_EQ(head[j * 4 + i], j == i + 1 ? 0.2 : 0.0);
    }
}

TEST(Oscillation, SymmetricDriveHasNoBias) {
  const auto psi = testutil::psi_trace(default_params(), {TonicInput::uniform(1, 1), 1.0}, 10, 10);
  const auto b = measure_bias(psi);
  EXPECT_TRUE(b.oscillatory);
  EXPECT_LE(std::abs(b.bias), 0.02 * half_amplitude(psi));
}

TEST(Oscillation, SustainedForEveryOption) {
  for (double kf : {0.5, 1.0, 2.0, 4.0}) {
    const auto psi = testutil::psi_trace(default_params(), testutil::imbalance_command(0, kf), 10, 10);
    EXPECT_GT(half_amplitude(psi), 0.1) << "K_f " << kf;
    EXPECT_GE(measure_bias(psi).periods, 3u) << "K_f " << kf;
  }
}

TEST(Oscillation, BiasLinearInImbalance) {
  std::vector<double> du, bias;
  for (int k = -4; k <= 4; ++k) {
    du.push_back(0.1 * k);
    bias.push_back(measure_bias(testutil::psi_trace(default_params(),
                                                   testutil::imbalance_command(0.1 * k), 10, 10))
                       .bias);
  }
  const auto fit = testutil::fit_line(du, bias);
  EXPECT_GE(fit.r2, 0.98);
  EXPECT_GT(fit.slope, 0.0);
}

TEST(Oscillation, FrequencyScalesAsInverseRootKf) {
  const auto p = default_params();
  const double f1 = measure_frequency(testutil::psi_trace(p, testutil::imbalance_command(0, 1), 10, 10), 1e-3);
  const double f4 = measure_frequency(testutil::psi_trace(p, testutil::imbalance_command(0, 4), 10, 20), 1e-3);
  EXPECT_GE(f1 / f4, 1.8);
  EXPECT_LE(f1 / f4, 2.2);
}

// Scaling both time constants is an exact time rescaling, so the ratio is K_f.
TEST(Oscillation, BothConstantsScalingIsTimeRescaling) {
  auto p = default_params();
  p.scaling = FrequencyScaling::kBothTimeConstants;
  const double f1 = measure_frequency(testutil::psi_trace(p, testutil::imbalance_command(0, 1), 10, 10), 1e-3);
  const double f2 = measure_frequency(testutil::psi_trace(p, testutil::imbalance_command(0, 2), 20, 20), 1e-3);
  EXPECT_NEAR(f1 / f2, 2.0, 0.02);
}
