// Bias and frequency estimators for sampled oscillator outputs.

#ifndef SNAKECPG_SIGNAL_HPP_
#define SNAKECPG_SIGNAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace snakecpg::cpg {

struct BiasEstimate {
  double bias = 0.0;
  bool oscillatory = false;
  std::size_t periods = 0;
};

namespace detail {

inline double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Fractional sample positions of upward crossings of the mean-removed signal.
inline std::vector<double> upward_crossings(std::span<const double> v) {
  const double m = mean(v);
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const double a = v[k] - m, b = v[k + 1] - m;
    if (a < 0.0 && b >= 0.0) out.push_back(static_cast<double>(k) + a / (a - b));
  }
  return out;
}

inline constexpr double kAmplitudeTolerance = 1e-9;

}  // namespace detail

// Mean over an integer number of periods delimited by upward zero crossings.
// Trapezoidal weights with interpolated endpoints keep the estimate free of
// the half-sample phase error of a plain window mean.
inline BiasEstimate measure_bias(std::span<const double> signal) {
  BiasEstimate est;
  if (signal.empty()) throw std::invalid_argument("empty signal");
  const auto [lo, hi] = std::minmax_element(signal.begin(), signal.end());
  const auto cross = detail::upward_crossings(signal);
  if (*hi - *lo < detail::kAmplitudeTolerance || cross.size() < 2) {
    est.bias = detail::mean(signal);
    return est;
  }
  auto sample = [&](double t) {
    const auto k = static_cast<std::size_t>(std::floor(t));
    if (k + 1 >= signal.size()) return signal.back();
    const double frac = t - static_cast<double>(k);
    return signal[k] * (1.0 - frac) + signal[k + 1] * frac;
  };
  const double t0 = cross.front(), t1 = cross.back();
  double area = 0.0;
  auto first = static_cast<std::size_t>(std::floor(t0)) + 1;
  auto last = static_cast<std::size_t>(std::floor(t1));
  double prev_t = t0, prev_v = sample(t0);
  for (std::size_t k = first; k <= last; ++k) {
    const double t = static_cast<double>(k);
    area += 0.5 * (prev_v + signal[k]) * (t - prev_t);
    prev_t = t;
    prev_v = signal[k];
  }
  area += 0.5 * (prev_v + sample(t1)) * (t1 - prev_t);
  est.bias = area / (t1 - t0);
  est.oscillatory = true;
  est.periods = cross.size() - 1;
  return est;
}

// Frequency in Hz from the mean spacing of upward zero crossings.
inline double measure_frequency(std::span<const double> signal, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const auto cross = detail::upward_crossings(signal);
  if (cross.size() < 3) throw std::runtime_error("insufficient cycles");
  const double span = cross.back() - cross.front();
  return static_cast<double>(cross.size() - 1) / (span * dt);
}

// Peak-to-peak half amplitude.
inline double half_amplitude(std::span<const double> signal) {
  if (signal.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(signal.begin(), signal.end());
  return 0.5 * (*hi - *lo);
}

}  // namespace snakecpg::cpg

#endif  // SNAKECPG_SIGNAL_HPP_
