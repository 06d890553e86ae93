// Feed-forward actor/critic networks with hand-written backpropagation, the
// option/termination sampling of the controller, GAE and the clipped PPO
// update.

#ifndef SNAKECPG_POLICY_HPP_
#define SNAKECPG_POLICY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace snakecpg::policy {

struct NetSpec {
  std::size_t input = 14;
  std::size_t hidden = 128;
  std::size_t actions = 4;
  // Option head size; zero for an action-only network.
  std::size_t options = 0;
  bool termination = false;
  // Fixed per-input multipliers applied before the first layer. Empty means 1.
  std::vector<double> input_scale;
  double init_log_std = std::log(0.5);

  void validate() const {
    if (input == 0 || hidden == 0 || actions == 0)
      throw std::invalid_argument("network sizes must be positive");
    if (termination && options == 0)
      throw std::invalid_argument("termination head needs an option head");
    if (!input_scale.empty() && input_scale.size() != input)
      throw std::invalid_argument("input_scale size must equal input width");
  }

  bool operator==(const NetSpec&) const = default;
};

// Offsets of every tensor in the flat parameter vector. The actor block comes
// first, the critic block after it.
struct Layout {
  std::size_t w1, b1, w2, b2, mu_w, mu_b, opt_w, opt_b, beta_w, beta_b, log_std;
  std::size_t actor_end;
  std::size_t cw1, cb1, cw2, cb2, v_w, v_b;
  std::size_t total;

  explicit Layout(const NetSpec& s) {
    std::size_t o = 0;
    auto take = [&o](std::size_t n) {
      const std::size_t at = o;
      o += n;
      return at;
    };
    const std::size_t h = s.hidden;
    w1 = take(h * s.input);
    b1 = take(h);
    w2 = take(h * h);
    b2 = take(h);
    mu_w = take(s.actions * h);
    mu_b = take(s.actions);
    opt_w = take(s.options * h);
    opt_b = take(s.options);
    beta_w = take(s.termination ? h : 0);
    beta_b = take(s.termination ? 1 : 0);
    log_std = take(s.actions);
    actor_end = o;
    cw1 = take(h * s.input);
    cb1 = take(h);
    cw2 = take(h * h);
    cb2 = take(h);
    v_w = take(h);
    v_b = take(1);
    total = o;
  }
};

struct Output {
  std::vector<double> mean;
  std::vector<double> log_std;
  std::vector<double> option_logits;
  std::vector<double> option_probs;
  double beta_logit = 0.0;
  double beta = 0.0;
  double value = 0.0;
};

// Activations kept for backpropagation.
struct Cache {
  std::vector<double> x, h1, h2, g1, g2;
};

// Loss gradients with respect to the head outputs.
struct HeadGrads {
  std::vector<double> mean, log_std, option_logits;
  double beta_logit = 0.0;
  double value = 0.0;
};

inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (p.empty()) return p;
  const double m = *std::max_element(logits.begin(), logits.end());
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += p[k] = std::exp(logits[k] - m);
  for (double& v : p) v /= s;
  return p;
}

class Network {
 public:
  Network() : Network(NetSpec{}) {}

  // All-zero weights except the log-std entries.
  explicit Network(NetSpec spec) : spec_(std::move(spec)), layout_(spec_) {
    spec_.validate();
    params_.assign(layout_.total, 0.0);
    for (std::size_t k = 0; k < spec_.actions; ++k)
      params_[layout_.log_std + k] = spec_.init_log_std;
  }

  static Network random(NetSpec spec, std::uint64_t seed) {
    Network n(std::move(spec));
    n.initialize(seed);
    return n;
  }

  void initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const auto& L = layout_;
    const std::size_t h = spec_.hidden, in = spec_.input;
    auto fill = [&](std::size_t at, std::size_t count, double fan_in, double gain) {
      const double s = gain / std::sqrt(fan_in);
      for (std::size_t k = 0; k < count; ++k) params_[at + k] = s * nd(rng);
    };
    std::fill(params_.begin(), params_.end(), 0.0);
    fill(L.w1, h * in, in, 1.0);
    fill(L.w2, h * h, h, 1.0);
    fill(L.mu_w, spec_.actions * h, h, 0.01);
    fill(L.opt_w, spec_.options * h, h, 0.01);
    if (spec_.termination) fill(L.beta_w, h, h, 0.01);
    for (std::size_t k = 0; k < spec_.actions; ++k)
      params_[L.log_std + k] = spec_.init_log_std;
    fill(L.cw1, h * in, in, 1.0);
    fill(L.cw2, h * h, h, 1.0);
    fill(L.v_w, h, h, 1.0);
  }

  const NetSpec& spec() const { return spec_; }
  const Layout& layout() const { return layout_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }

  std::uint64_t actor_digest() const {
    return fnv1a(params_.data(), layout_.actor_end * sizeof(double));
  }
  std::uint64_t digest() const {
    return fnv1a(params_.data(), params_.size() * sizeof(double));
  }

  Output forward(std::span<const double> input, Cache* cache = nullptr) const {
    if (input.size() != spec_.input)
      throw std::invalid_argument("input width " + std::to_string(input.size()) +
                                  " != " + std::to_string(spec_.input));
    for (double v : input)
      if (!std::isfinite(v)) throw std::domain_error("non-finite network input");
    Cache local;
    Cache& c = cache ? *cache : local;
    const auto& L = layout_;
    const std::size_t h = spec_.hidden, in = spec_.input;
    c.x.assign(input.begin(), input.end());
    if (!spec_.input_scale.empty())
      for (std::size_t i = 0; i < in; ++i) c.x[i] *= spec_.input_scale[i];

    dense_tanh(L.w1, L.b1, c.x, h, c.h1);
    dense_tanh(L.w2, L.b2, c.h1, h, c.h2);
    dense_tanh(L.cw1, L.cb1, c.x, h, c.g1);
    dense_tanh(L.cw2, L.cb2, c.g1, h, c.g2);

    Output o;
    o.mean.resize(spec_.actions);
    o.log_std.resize(spec_.actions);
    for (std::size_t a = 0; a < spec_.actions; ++a) {
      o.mean[a] = params_[L.mu_b + a] + dot_row(L.mu_w + a * h, c.h2);
      o.log_std[a] = params_[L.log_std + a];
    }
    o.option_logits.resize(spec_.options);
    for (std::size_t k = 0; k < spec_.options; ++k)
      o.option_logits[k] = params_[L.opt_b + k] + dot_row(L.opt_w + k * h, c.h2);
    o.option_probs = softmax(o.option_logits);
    if (spec_.termination) {
      o.beta_logit = params_[L.beta_b] + dot_row(L.beta_w, c.h2);
      o.beta = stable_sigmoid(o.beta_logit);
    }
    o.value = params_[L.v_b] + dot_row(L.v_w, c.g2);
    return o;
  }

  // Accumulates dLoss/dparams into grad given dLoss/dheads.
  void backward(const Cache& c, const HeadGrads& g, std::span<double> grad) const {
    if (grad.size() != params_.size())
      throw std::invalid_argument("gradient buffer size mismatch");
    const auto& L = layout_;
    const std::size_t h = spec_.hidden;
    std::vector<double> dh2(h, 0.0);
    auto head = [&](std::size_t w, std::size_t b, double d) {
      if (d == 0.0) return;
      grad[b] += d;
      for (std::size_t j = 0; j < h; ++j) {
        grad[w + j] += d * c.h2[j];
        dh2[j] += d * params_[w + j];
      }
    };
    for (std::size_t a = 0; a < spec_.actions && a < g.mean.size(); ++a)
      head(L.mu_w + a * h, L.mu_b + a, g.mean[a]);
    for (std::size_t a = 0; a < spec_.actions && a < g.log_std.size(); ++a)
      grad[L.log_std + a] += g.log_std[a];
    for (std::size_t k = 0; k < spec_.options && k < g.option_logits.size(); ++k)
      head(L.opt_w + k * h, L.opt_b + k, g.option_logits[k]);
    if (spec_.termination) head(L.beta_w, L.beta_b, g.beta_logit);
    back_trunk(L.w1, L.b1, L.w2, L.b2, c.x, c.h1, c.h2, dh2, grad);

    if (g.value != 0.0) {
      std::vector<double> dg2(h);
      grad[L.v_b] += g.value;
      for (std::size_t j = 0; j < h; ++j) {
        grad[L.v_w + j] += g.value * c.g2[j];
        dg2[j] = g.value * params_[L.v_w + j];
      }
      back_trunk(L.cw1, L.cb1, L.cw2, L.cb2, c.x, c.g1, c.g2, dg2, grad);
    }
  }

 private:
  double dot_row(std::size_t w, const std::vector<double>& v) const {
    double s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) s += params_[w + j] * v[j];
    return s;
  }

  void dense_tanh(std::size_t w, std::size_t b, const std::vector<double>& in,
                  std::size_t out_n, std::vector<double>& out) const {
    out.resize(out_n);
    const std::size_t n = in.size();
    for (std::size_t r = 0; r < out_n; ++r) {
      double s = params_[b + r];
      const double* row = params_.data() + w + r * n;
      for (std::size_t j = 0; j < n; ++j) s += row[j] * in[j];
      out[r] = std::tanh(s);
    }
  }

  // Backpropagates dy2 through two tanh layers x -> y1 -> y2.
  void back_trunk(std::size_t w1, std::size_t b1, std::size_t w2, std::size_t b2,
                  const std::vector<double>& x, const std::vector<double>& y1,
                  const std::vector<double>& y2, std::vector<double>& dy2,
                  std::span<double> grad) const {
    const std::size_t h = spec_.hidden, in = x.size();
    std::vector<double> dy1(h, 0.0);
    for (std::size_t r = 0; r < h; ++r) {
      const double d = dy2[r] * (1.0 - y2[r] * y2[r]);
      if (d == 0.0) continue;
      grad[b2 + r] += d;
      const double* row = params_.data() + w2 + r * h;
      double* grow = grad.data() + w2 + r * h;
      for (std::size_t j = 0; j < h; ++j) {
        grow[j] += d * y1[j];
        dy1[j] += d * row[j];
      }
    }
    for (std::size_t r = 0; r < h; ++r) {
      const double d = dy1[r] * (1.0 - y1[r] * y1[r]);
      if (d == 0.0) continue;
      grad[b1 + r] += d;
      double* grow = grad.data() + w1 + r * in;
      for (std::size_t j = 0; j < in; ++j) grow[j] += d * x[j];
    }
  }

  NetSpec spec_;
  Layout layout_;
  std::vector<double> params_;
};

// ---------------------------------------------------------------------------
// Distributions

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

inline double gaussian_log_prob(std::span<const double> mean,
                                std::span<const double> log_std,
                                std::span<const double> x) {
  double lp = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double z = (x[i] - mean[i]) * std::exp(-log_std[i]);
    lp += -0.5 * z * z - log_std[i] - kLogSqrt2Pi;
  }
  return lp;
}

inline double gaussian_entropy(std::span<const double> log_std) {
  double h = 0.0;
  for (double s : log_std) h += s + 0.5 + kLogSqrt2Pi;
  return h;
}

inline double categorical_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

// Probability of holding option `o` at this step given the previous option:
// (1 - beta) [o == prev] + beta pi(o); without a previous option it is pi(o).
inline double option_transition_prob(const Output& out, int option,
                                     int prev_option) {
  const double pi = out.option_probs.at(static_cast<std::size_t>(option));
  if (prev_option < 0) return pi;
  return (option == prev_option ? 1.0 - out.beta : 0.0) + out.beta * pi;
}

// Joint log-probability of an action and, for option networks, the option.
inline double log_prob(const Output& out, std::span<const double> action,
                       int option = -1, int prev_option = -1) {
  double lp = gaussian_log_prob(out.mean, out.log_std, action);
  if (!out.option_probs.empty() && option >= 0)
    lp += std::log(std::max(option_transition_prob(out, option, prev_option),
                            1e-300));
  return lp;
}

struct Sample {
  std::vector<double> action;
  int option = -1;
  bool terminated = false;
  double log_prob = 0.0;
};

// Gaussian action sample; for option networks the previous option terminates
// with probability beta and a new one is drawn from the option distribution.
template <class Rng>
Sample sample_step(const Output& out, Rng& rng, int prev_option = -1) {
  Sample s;
  std::normal_distribution<double> nd(0.0, 1.0);
  s.action.resize(out.mean.size());
  for (std::size_t i = 0; i < out.mean.size(); ++i)
    s.action[i] = out.mean[i] + std::exp(out.log_std[i]) * nd(rng);
  if (!out.option_probs.empty()) {
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    s.terminated = prev_option < 0 || ud(rng) < out.beta;
    if (s.terminated) {
      std::discrete_distribution<int> cat(out.option_probs.begin(),
                                          out.option_probs.end());
      s.option = cat(rng);
    } else {
      s.option = prev_option;
    }
  }
  s.log_prob = log_prob(out, s.action, s.option, prev_option);
  return s;
}

// Mean action; the option switches to the most likely one when beta > 1/2.
inline Sample greedy_step(const Output& out, int prev_option = -1) {
  Sample s;
  s.action = out.mean;
  if (!out.option_probs.empty()) {
    s.terminated = prev_option < 0 || out.beta > 0.5;
    s.option = s.terminated
                   ? static_cast<int>(std::max_element(out.option_probs.begin(),
                                                       out.option_probs.end()) -
                                      out.option_probs.begin())
                   : prev_option;
  }
  s.log_prob = log_prob(out, s.action, s.option, prev_option);
  return s;
}

// d log p / d heads for the joint action/option log-probability.
inline void log_prob_grad(const Output& out, std::span<const double> action,
                          int option, int prev_option, double scale,
                          HeadGrads& g) {
  const std::size_t na = out.mean.size();
  g.mean.resize(na, 0.0);
  g.log_std.resize(na, 0.0);
  for (std::size_t i = 0; i < na; ++i) {
    const double inv = std::exp(-out.log_std[i]);
    const double z = (action[i] - out.mean[i]) * inv;
    g.mean[i] += scale * z * inv;
    g.log_std[i] += scale * (z * z - 1.0);
  }
  if (out.option_probs.empty() || option < 0) return;
  const std::size_t K = out.option_probs.size();
  g.option_logits.resize(K, 0.0);
  const auto o = static_cast<std::size_t>(option);
  const double q = std::max(option_transition_prob(out, option, prev_option), 1e-300);
  const double pi_o = out.option_probs[o];
  const double w = prev_option < 0 ? 1.0 : out.beta;
  // dq/dlogit_k = w pi_o (delta_ok - pi_k)
  for (std::size_t k = 0; k < K; ++k)
    g.option_logits[k] +=
        scale * w * pi_o * ((k == o ? 1.0 : 0.0) - out.option_probs[k]) / q;
  if (prev_option >= 0) {
    const double dq_dbeta = option == prev_option ? pi_o - 1.0 : pi_o;
    g.beta_logit += scale * dq_dbeta * out.beta * (1.0 - out.beta) / q;
  }
}

// ---------------------------------------------------------------------------
// Advantages

struct Advantages {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// values[t] for t < T, bootstrap is V(s_T) (zero after a terminal state).
inline Advantages gae_advantages(std::span<const double> rewards,
                                 std::span<const double> values,
                                 double bootstrap, double gamma, double lambda) {
  if (rewards.empty()) throw std::invalid_argument("empty trajectory");
  if (values.size() != rewards.size())
    throw std::invalid_argument("values and rewards must align");
  const std::size_t T = rewards.size();
  Advantages a;
  a.advantages.resize(T);
  a.returns.resize(T);
  double next_value = bootstrap, acc = 0.0;
  for (std::size_t t = T; t-- > 0;) {
    const double delta = rewards[t] + gamma * next_value - values[t];
    acc = delta + gamma * lambda * acc;
    a.advantages[t] = acc;
    a.returns[t] = acc + values[t];
    next_value = values[t];
  }
  return a;
}

inline double discounted_return(std::span<const double> rewards, double gamma) {
  double g = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) g = rewards[t] + gamma * g;
  return g;
}

// ---------------------------------------------------------------------------
// Optimisation

struct LearnerConfig {
  double gamma = 0.99;
  double gae_lambda = 0.96;
  double clip = 0.2;
  // Approximate-KL early stop per epoch; zero disables it.
  double kl_target = 0.02;
  double actor_lr = 3e-4;
  double critic_lr = 5e-4;
  std::size_t minibatch = 64;
  std::size_t epochs = 4;
  double entropy_coef = 0.01;
  double max_grad_norm = 0.5;
  bool normalize_advantages = true;
  // Multiplies rewards before advantage estimation.
  double reward_scale = 1.0;

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in (0,1)");
    if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0))
      throw std::invalid_argument("gae_lambda must be in [0,1]");
    if (!(clip > 0.0) || !(actor_lr > 0.0) || !(critic_lr > 0.0) ||
        minibatch == 0 || epochs == 0 || !(reward_scale > 0.0))
      throw std::invalid_argument("learner rates must be positive");
  }
};

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, std::size_t actor_end, double actor_lr, double critic_lr)
      : m_(n, 0.0), v_(n, 0.0), actor_end_(actor_end), actor_lr_(actor_lr),
        critic_lr_(critic_lr) {}

  // Updates params[begin, end) only; moments of other entries are untouched.
  void step(std::vector<double>& params, std::span<const double> grad,
            std::size_t begin = 0, std::size_t end = SIZE_MAX) {
    if (grad.size() != params.size() || m_.size() != params.size())
      throw std::invalid_argument("optimizer size mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    end = std::min(end, params.size());
    for (std::size_t i = begin; i < end; ++i) {
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      const double lr = i < actor_end_ ? actor_lr_ : critic_lr_;
      params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
    }
  }

  std::size_t steps() const { return t_; }

 private:
  static constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
  std::size_t actor_end_ = 0;
  double actor_lr_ = 0.0, critic_lr_ = 0.0;
};

struct PpoSample {
  std::vector<double> input;
  std::vector<double> action;
  int option = -1;
  int prev_option = -1;
  double log_prob_old = 0.0;
  double advantage = 0.0;
  double ret = 0.0;
  // False for steps this network did not act on; only the critic trains there.
  bool policy_active = true;
};

struct LossTerms {
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double total = 0.0;
};

// Mean clipped-surrogate + value + entropy loss over `idx`, accumulating its
// gradient into grad. Advantages are used as given.
inline LossTerms ppo_loss(const Network& net, std::span<const PpoSample> batch,
                          std::span<const std::size_t> idx,
                          const LearnerConfig& cfg, std::span<double> grad) {
  LossTerms L;
  if (idx.empty()) return L;
  const double inv_n = 1.0 / static_cast<double>(idx.size());
  std::size_t active = 0;
  for (std::size_t i : idx) active += batch[i].policy_active ? 1 : 0;
  const double inv_active = active ? 1.0 / static_cast<double>(active) : 0.0;
  Cache cache;
  HeadGrads g;
  for (std::size_t i : idx) {
    const PpoSample& s = batch[i];
    const Output out = net.forward(s.input, &cache);
    g = HeadGrads{};
    g.mean.assign(out.mean.size(), 0.0);
    g.log_std.assign(out.mean.size(), 0.0);
    g.option_logits.assign(out.option_probs.size(), 0.0);

    if (s.policy_active) {
      const double lp = log_prob(out, s.action, s.option, s.prev_option);
      const double ratio = std::exp(lp - s.log_prob_old);
      const double clipped = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
      const double unclipped_term = ratio * s.advantage;
      const double clipped_term = clipped * s.advantage;
      L.policy -= std::min(unclipped_term, clipped_term) * inv_active;
      L.approx_kl += (s.log_prob_old - lp) * inv_active;
      if (unclipped_term <= clipped_term)
        log_prob_grad(out, s.action, s.option, s.prev_option,
                      -s.advantage * ratio * inv_active, g);

      // Entropy bonus: Gaussian part depends on log-std only.
      const double h_gauss = gaussian_entropy(out.log_std);
      const double h_cat = categorical_entropy(out.option_probs);
      L.entropy += (h_gauss + h_cat) * inv_active;
      for (double& d : g.log_std) d -= cfg.entropy_coef * inv_active;
      for (std::size_t k = 0; k < out.option_probs.size(); ++k) {
        const double p = out.option_probs[k];
        const double dh = p > 0.0 ? -p * (std::log(p) + h_cat) : 0.0;
        g.option_logits[k] -= cfg.entropy_coef * dh * inv_active;
      }
    }
    const double err = out.value - s.ret;
    L.value += 0.5 * err * err * inv_n;
    g.value = err * inv_n;
    net.backward(cache, g, grad);
  }
  L.total = L.policy + L.value - cfg.entropy_coef * L.entropy;
  return L;
}

struct UpdateStats {
  LossTerms last;
  std::size_t epochs_run = 0;
  std::size_t steps = 0;
  bool kl_stopped = false;
};

inline void normalize_advantages(std::vector<PpoSample>& batch) {
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& s : batch)
    if (s.policy_active) {
      sum += s.advantage;
      sq += s.advantage * s.advantage;
      ++n;
    }
  if (n < 2) return;
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(sq / static_cast<double>(n) - mean * mean, 0.0);
  const double sd = std::sqrt(var) + 1e-8;
  for (auto& s : batch)
    if (s.policy_active) s.advantage = (s.advantage - mean) / sd;
}

// Several epochs of minibatch Adam steps on one network.
template <class Rng>
UpdateStats ppo_update(Network& net, Adam& opt, std::vector<PpoSample> batch,
                       const LearnerConfig& cfg, Rng& rng) {
  cfg.validate();
  if (batch.empty()) throw std::invalid_argument("empty PPO batch");
  if (cfg.normalize_advantages) normalize_advantages(batch);
  UpdateStats st;
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(net.size());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double kl_sum = 0.0;
    std::size_t kl_n = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.minibatch) {
      const std::size_t end = std::min(order.size(), start + cfg.minibatch);
      std::span<const std::size_t> idx(order.data() + start, end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      st.last = ppo_loss(net, batch, idx, cfg, grad);
      double norm2 = 0.0;
      for (double g : grad) norm2 += g * g;
      if (!std::isfinite(norm2) || !std::isfinite(st.last.total))
        throw std::runtime_error("non-finite gradient in PPO update (loss " +
                                 std::to_string(st.last.total) + ")");
      if (cfg.max_grad_norm > 0.0 && norm2 > cfg.max_grad_norm * cfg.max_grad_norm) {
        const double s = cfg.max_grad_norm / std::sqrt(norm2);
        for (double& g : grad) g *= s;
      }
      opt.step(net.params(), grad);
      ++st.steps;
      kl_sum += st.last.approx_kl;
      ++kl_n;
    }
    ++st.epochs_run;
    if (cfg.kl_target > 0.0 && kl_n > 0 &&
        kl_sum / static_cast<double>(kl_n) > 1.5 * cfg.kl_target) {
      st.kl_stopped = true;
      break;
    }
  }
  return st;
}

// Regresses the critic on (input, return) pairs without touching the actor.
template <class Rng>
double fit_value(Network& net, Adam& opt, std::span<const PpoSample> batch,
                 const LearnerConfig& cfg, std::size_t epochs, Rng& rng) {
  if (batch.empty()) return 0.0;
  std::vector<PpoSample> critic_only(batch.begin(), batch.end());
  for (auto& s : critic_only) s.policy_active = false;
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(net.size());
  double loss = 0.0;
  for (std::size_t e = 0; e < epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.minibatch) {
      const std::size_t end = std::min(order.size(), start + cfg.minibatch);
      std::span<const std::size_t> idx(order.data() + start, end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      loss = ppo_loss(net, critic_only, idx, cfg, grad).value;
      if (!std::isfinite(loss)) throw std::runtime_error("non-finite value loss");
      opt.step(net.params(), grad, net.layout().actor_end);
    }
  }
  return loss;
}

}  // namespace snakecpg::policy

#endif  // SNAKECPG_POLICY_HPP_
