// Matsuoka oscillator network: tonic-input decoding/composition and RK4
// integration of the coupled extensor/flexor neuron pairs.

#ifndef SNAKECPG_CPG_HPP_
#define SNAKECPG_CPG_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace snakecpg {

inline constexpr std::size_t kNumLinks = 4;

using LinkVector = std::array<double, kNumLinks>;

namespace cpg {

// Where the frequency ratio K_f enters the neuron dynamics.
//
// kDischarge multiplies only the discharge time constant, so that for a == b
// the oscillation frequency follows 1/sqrt(K_f). kBothTimeConstants multiplies
// tau_r and tau_a, which is a pure time rescaling (frequency follows 1/K_f).
enum class FrequencyScaling { kDischarge, kBothTimeConstants };

struct OscillatorParams {
  double tau_r = 0.05;
  double tau_a = 0.8;
  double a = 1.3;
  double b = 3.0;
  std::size_t n = kNumLinks;
  // Row-major n x n, entry [j * n + i] is w_ji, the inhibition of oscillator
  // i by the self-inhibition state of oscillator j.
  std::vector<double> w;
  FrequencyScaling scaling = FrequencyScaling::kDischarge;

  double coupling(std::size_t j, std::size_t i) const { return w[j * n + i]; }

  void validate() const {
    if (!(tau_r > 0.0) || !(tau_a > 0.0))
      throw std::invalid_argument("oscillator time constants must be positive");
    if (n < 1) throw std::invalid_argument("oscillator count must be >= 1");
    if (w.size() != n * n)
      throw std::invalid_argument("coupling matrix must be n x n");
    for (double v : w)
      if (!std::isfinite(v))
        throw std::invalid_argument("coupling weights must be finite");
  }
};

// Nearest-neighbour chain: w_ji = weight for |i - j| == 1.
inline std::vector<double> chain_coupling(std::size_t n, double weight) {
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w[i * n + (i + 1)] = weight;
    w[(i + 1) * n + i] = weight;
  }
  return w;
}

// One-way chain in which oscillator i is inhibited by its tail-side neighbour
// i + 1. The head then lags the tail and the body wave travels tailward,
// which drives the chain forward.
inline std::vector<double> headward_chain_coupling(std::size_t n,
                                                   double weight) {
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) w[(i + 1) * n + i] = weight;
  return w;
}

inline OscillatorParams default_params() {
  OscillatorParams p;
  p.w = headward_chain_coupling(p.n, 0.2);
  return p;
}

struct OscillatorNetworkState {
  std::vector<double> x_e, y_e, x_f, y_f;

  static OscillatorNetworkState zeros(std::size_t n) {
    OscillatorNetworkState s;
    s.x_e.assign(n, 0.0);
    s.y_e.assign(n, 0.0);
    s.x_f.assign(n, 0.0);
    s.y_f.assign(n, 0.0);
    return s;
  }

  // Small asymmetric kick so that a symmetric drive leaves the unstable
  // equilibrium and settles on the limit cycle.
  static OscillatorNetworkState kicked(std::size_t n) {
    OscillatorNetworkState s = zeros(n);
    for (std::size_t i = 0; i < n; ++i)
      s.x_e[i] = 0.1 * std::cos(1.3 * static_cast<double>(i));
    return s;
  }

  std::size_t size() const { return x_e.size(); }

  bool finite() const {
    for (const auto* v : {&x_e, &y_e, &x_f, &y_f})
      for (double e : *v)
        if (!std::isfinite(e)) return false;
    return true;
  }

  bool operator==(const OscillatorNetworkState&) const = default;
};

struct TonicInput {
  LinkVector u_e{};
  LinkVector u_f{};

  static TonicInput uniform(double ue, double uf) {
    TonicInput t;
    t.u_e.fill(ue);
    t.u_f.fill(uf);
    return t;
  }

  // Steering imbalance u_e - u_f per oscillator.
  LinkVector imbalance() const {
    LinkVector d{};
    for (std::size_t i = 0; i < kNumLinks; ++i) d[i] = u_e[i] - u_f[i];
    return d;
  }

  bool operator==(const TonicInput&) const = default;
};

struct CpgCommand {
  TonicInput tonic;
  double k_f = 1.0;
};

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline TonicInput decode_action(std::span<const double> action) {
  if (action.size() != kNumLinks)
    throw std::invalid_argument("action must have 4 components");
  TonicInput t;
  for (std::size_t i = 0; i < kNumLinks; ++i) {
    if (!std::isfinite(action[i]))
      throw std::domain_error("non-finite action component");
    t.u_e[i] = sigmoid(action[i]);
    t.u_f[i] = 1.0 - t.u_e[i];
  }
  return t;
}

inline TonicInput compose_tonic(const TonicInput& u1, const TonicInput& u2,
                                double w1, double w2) {
  if (!(w1 >= 0.0) || !(w2 >= 0.0) || std::abs(w1 + w2 - 1.0) > 1e-12)
    throw std::invalid_argument(
        "composition weights must be nonnegative and sum to 1");
  TonicInput u;
  for (std::size_t i = 0; i < kNumLinks; ++i) {
    u.u_e[i] = std::clamp(w1 * u1.u_e[i] + w2 * u2.u_e[i], 0.0, 1.0);
    u.u_f[i] = std::clamp(w1 * u1.u_f[i] + w2 * u2.u_f[i], 0.0, 1.0);
  }
  return u;
}

namespace detail {

struct Derivative {
  std::vector<double> dx_e, dy_e, dx_f, dy_f;
};

inline void evaluate(const OscillatorNetworkState& s, const OscillatorParams& p,
                     const CpgCommand& cmd, Derivative& d) {
  const std::size_t n = p.n;
  const double rise = p.tau_r * cmd.k_f;
  const double adapt =
      p.scaling == FrequencyScaling::kBothTimeConstants ? p.tau_a * cmd.k_f
                                                        : p.tau_a;
  d.dx_e.resize(n);
  d.dy_e.resize(n);
  d.dx_f.resize(n);
  d.dy_f.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z_e = std::max(0.0, s.x_e[i]);
    const double z_f = std::max(0.0, s.x_f[i]);
    double inhib_e = 0.0, inhib_f = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = p.coupling(j, i);
      if (w == 0.0) continue;
      inhib_e += w * s.y_e[j];
      inhib_f += w * s.y_f[j];
    }
    const double ue = i < kNumLinks ? cmd.tonic.u_e[i] : 0.0;
    const double uf = i < kNumLinks ? cmd.tonic.u_f[i] : 0.0;
    d.dx_e[i] = (-s.x_e[i] - p.a * z_f - p.b * s.y_e[i] - inhib_e + ue) / rise;
    d.dy_e[i] = (z_e - s.y_e[i]) / adapt;
    d.dx_f[i] = (-s.x_f[i] - p.a * z_e - p.b * s.y_f[i] - inhib_f + uf) / rise;
    d.dy_f[i] = (z_f - s.y_f[i]) / adapt;
  }
}

inline void axpy(const OscillatorNetworkState& s, const Derivative& d,
                 double h, OscillatorNetworkState& out) {
  const std::size_t n = s.size();
  out.x_e.resize(n);
  out.y_e.resize(n);
  out.x_f.resize(n);
  out.y_f.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.x_e[i] = s.x_e[i] + h * d.dx_e[i];
    out.y_e[i] = s.y_e[i] + h * d.dy_e[i];
    out.x_f[i] = s.x_f[i] + h * d.dx_f[i];
    out.y_f[i] = s.y_f[i] + h * d.dy_f[i];
  }
}

}  // namespace detail

// Largest step accepted by step_network for a given frequency ratio.
inline double max_stable_dt(const OscillatorParams& p, double k_f) {
  const double adapt =
      p.scaling == FrequencyScaling::kBothTimeConstants ? k_f * p.tau_a
                                                        : p.tau_a;
  return std::min(k_f * p.tau_r, adapt) / 5.0;
}

// One classical RK4 step of the network. The rectified outputs are recomputed
// at every stage.
inline OscillatorNetworkState step_network(const OscillatorNetworkState& s,
                                           const OscillatorParams& p,
                                           const CpgCommand& cmd, double dt) {
  if (!(cmd.k_f > 0.0) || !std::isfinite(cmd.k_f))
    throw std::invalid_argument("frequency ratio must be positive");
  if (!(dt > 0.0) || dt > max_stable_dt(p, cmd.k_f) * (1.0 + 1e-12))
    throw std::invalid_argument("time step violates the stability bound");
  if (s.size() != p.n) throw std::invalid_argument("state size != n");
  if (!s.finite()) throw std::domain_error("non-finite oscillator state");

  detail::Derivative k1, k2, k3, k4;
  OscillatorNetworkState tmp;
  detail::evaluate(s, p, cmd, k1);
  detail::axpy(s, k1, dt / 2, tmp);
  detail::evaluate(tmp, p, cmd, k2);
  detail::axpy(s, k2, dt / 2, tmp);
  detail::evaluate(tmp, p, cmd, k3);
  detail::axpy(s, k3, dt, tmp);
  detail::evaluate(tmp, p, cmd, k4);

  OscillatorNetworkState next = s;
  const double c = dt / 6.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    next.x_e[i] += c * (k1.dx_e[i] + 2 * k2.dx_e[i] + 2 * k3.dx_e[i] + k4.dx_e[i]);
    next.y_e[i] += c * (k1.dy_e[i] + 2 * k2.dy_e[i] + 2 * k3.dy_e[i] + k4.dy_e[i]);
    next.x_f[i] += c * (k1.dx_f[i] + 2 * k2.dx_f[i] + 2 * k3.dx_f[i] + k4.dx_f[i]);
    next.y_f[i] += c * (k1.dy_f[i] + 2 * k2.dy_f[i] + 2 * k3.dy_f[i] + k4.dy_f[i]);
  }
  return next;
}

// psi_i = max(0, x_i^e) - max(0, x_i^f) for the first four oscillators.
inline LinkVector network_output(const OscillatorNetworkState& s) {
  LinkVector psi{};
  for (std::size_t i = 0; i < kNumLinks && i < s.size(); ++i)
    psi[i] = std::max(0.0, s.x_e[i]) - std::max(0.0, s.x_f[i]);
  return psi;
}

}  // namespace cpg
}  // namespace snakecpg

#endif  // SNAKECPG_CPG_HPP_
