// Shared helpers for the test binaries.

#ifndef SNAKECPG_TESTS_SUPPORT_HPP_
#define SNAKECPG_TESTS_SUPPORT_HPP_

#include <cmath>
#include <vector>

#include "snakecpg/cpg.hpp"

namespace snakecpg::testutil {

// psi_link sampled every dt after discarding `settle` seconds.
inline std::vector<double> psi_trace(const cpg::OscillatorParams& p, const cpg::CpgCommand& cmd,
                                     double settle, double measure, std::size_t link = 0,
                                     double dt = 1e-3) {
  auto s = cpg::OscillatorNetworkState::kicked(p.n);
  const auto n_settle = static_cast<std::size_t>(std::llround(settle / dt));
  const auto n_measure = static_cast<std::size_t>(std::llround(measure / dt));
  for (std::size_t k = 0; k < n_settle; ++k) s = cpg::step_network(s, p, cmd, dt);
  std::vector<double> out;
  out.reserve(n_measure);
  for (std::size_t k = 0; k < n_measure; ++k) {
    s = cpg::step_network(s, p, cmd, dt);
    out.push_back(cpg::network_output(s)[link]);
  }
  return out;
}

// Tonic input with u_e + u_f = 1 and imbalance du on every link.
inline cpg::CpgCommand imbalance_command(double du, double k_f = 1.0) {
  return {cpg::TonicInput::uniform(0.5 + du / 2, 0.5 - du / 2), k_f};
}

struct LinearFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double my = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += e * e;
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  f.r2 = 1.0 - ss_res / ss_tot;
  return f;
}

}  // namespace snakecpg::testutil

#endif  // SNAKECPG_TESTS_SUPPORT_HPP_
