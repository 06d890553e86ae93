// Cooperative two-player training: the controller C1 and the event-triggered
// regulator R2 share one reward and take turns best-responding to each other
// (smooth fictitious play), each turn being a PPO run against the frozen
// partner.

#ifndef SNAKECPG_GAME_HPP_
#define SNAKECPG_GAME_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "snakecpg/cpg.hpp"
#include "snakecpg/interface.hpp"
#include "snakecpg/policy.hpp"

namespace snakecpg::game {

enum class Player { kController, kRegulator };

inline const char* phase_name(Player p) {
  return p == Player::kController ? "C" : "R";
}

struct JointPolicy {
  policy::Network pi1;
  std::optional<policy::Network> pi2;
  Player flag = Player::kRegulator;
};

struct GameConfig {
  double epsilon = 0.5;
  std::size_t n_max = 6;
  double lambda_br = 100.0;
  double w1 = 0.5;
  double w2 = 0.5;
  std::size_t eval_episodes = 20;
  // Inner PPO loop.
  std::size_t episodes_per_update = 8;
  std::size_t min_updates = 4;
  std::size_t max_updates = 40;
  double epsilon_inner = 0.5;
  std::size_t window = 3;
  std::size_t value_fit_epochs = 8;
  std::vector<double> options{0.5, 1.0, 2.0, 4.0};
  policy::LearnerConfig learner;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(epsilon > 0.0) || n_max < 1 || !(lambda_br > 0.0))
      throw std::invalid_argument("need epsilon > 0, n_max >= 1, lambda > 0");
    if (!(w1 >= 0.0) || !(w2 >= 0.0) || std::abs(w1 + w2 - 1.0) > 1e-12)
      throw std::invalid_argument("composition weights must lie on the simplex");
    if (eval_episodes < 1 || episodes_per_update < 1 || max_updates < 1 ||
        window < 1)
      throw std::invalid_argument("episode counts must be >= 1");
    learner.validate();
  }

  // Entropy coefficient used while learning: at least 1/lambda.
  policy::LearnerConfig learner_with_floor() const {
    policy::LearnerConfig c = learner;
    c.entropy_coef = std::max(c.entropy_coef, 1.0 / lambda_br);
    return c;
  }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Episode seeds derived from a base seed and a counter.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t base = 0) : base_(base) {}
  std::uint64_t next() { return splitmix64(base_ ^ splitmix64(count_++)); }
  std::uint64_t count() const { return count_; }

 private:
  std::uint64_t base_;
  std::uint64_t count_ = 0;
};

struct StepData {
  std::vector<double> obs;
  std::vector<double> a1;
  std::optional<std::vector<double>> a2;
  int option = -1;
  int prev_option = -1;
  double beta = 0.0;
  double logp1 = 0.0;
  double logp2 = 0.0;
  double reward = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
  bool event = false;
};

struct Trajectory {
  std::vector<StepData> steps;
  bool terminal = false;
  // Critic values at the final observation, used when truncated.
  double boot_v1 = 0.0;
  double boot_v2 = 0.0;

  double total_reward() const {
    double s = 0.0;
    for (const auto& st : steps) s += st.reward;
    return s;
  }
  double discounted(double gamma) const {
    std::vector<double> r;
    r.reserve(steps.size());
    for (const auto& st : steps) r.push_back(st.reward);
    return policy::discounted_return(r, gamma);
  }
  double event_rate() const {
    if (steps.empty()) return 0.0;
    std::size_t n = 0;
    for (const auto& st : steps) n += st.event ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(steps.size());
  }
  std::vector<double> rewards() const {
    std::vector<double> r;
    for (const auto& st : steps) r.push_back(st.reward);
    return r;
  }
};

namespace detail {

inline std::span<const double> head(const std::vector<double>& obs,
                                    const policy::Network& net) {
  const std::size_t w = net.spec().input;
  if (obs.size() < w) throw std::invalid_argument("observation narrower than network input");
  return {obs.data(), w};
}

inline cpg::TonicInput decode(const std::vector<double>& a) {
  if (a.size() < kNumLinks) throw std::invalid_argument("action needs 4 components");
  return cpg::decode_action(std::span<const double>(a.data(), kNumLinks));
}

}  // namespace detail

struct RolloutOptions {
  bool greedy = false;
  std::size_t max_steps = 1000000;
};

// One episode. C1 acts every step; R2 acts only when the environment reports
// the event trigger, and then the two tonic inputs are composed.
template <Environment E, class Rng>
Trajectory rollout(E& env, const JointPolicy& joint, const GameConfig& cfg,
                   std::uint64_t env_seed, Rng& rng, RolloutOptions opt = {}) {
  Trajectory tr;
  std::vector<double> obs = env.reset(env_seed);
  int prev_option = -1;
  const double max_option =
      cfg.options.empty() ? 1.0 : *std::max_element(cfg.options.begin(), cfg.options.end());
  for (std::size_t t = 0; t < opt.max_steps; ++t) {
    StepData sd;
    sd.obs = obs;
    sd.event = env.event_active();
    const policy::Output o1 = joint.pi1.forward(detail::head(obs, joint.pi1));
    const policy::Sample s1 =
        opt.greedy ? policy::greedy_step(o1, prev_option)
                   : policy::sample_step(o1, rng, prev_option);
    sd.a1 = s1.action;
    sd.option = s1.option;
    sd.prev_option = prev_option;
    sd.beta = o1.beta;
    sd.logp1 = s1.log_prob;
    sd.v1 = o1.value;

    JointAction ja;
    ja.a1 = s1.action;
    ja.option = std::max(0, s1.option);
    ja.k_f = (s1.option >= 0 && static_cast<std::size_t>(s1.option) < cfg.options.size())
                 ? cfg.options[static_cast<std::size_t>(s1.option)]
                 : 1.0;
    ja.option_code = ja.k_f / max_option;
    ja.beta = o1.beta;
    cpg::TonicInput u = detail::decode(s1.action);

    if (joint.pi2) {
      const policy::Output o2 = joint.pi2->forward(detail::head(obs, *joint.pi2));
      sd.v2 = o2.value;
      if (sd.event) {
        const policy::Sample s2 =
            opt.greedy ? policy::greedy_step(o2) : policy::sample_step(o2, rng);
        sd.a2 = s2.action;
        sd.logp2 = s2.log_prob;
        ja.a2 = s2.action;
        u = cpg::compose_tonic(u, detail::decode(s2.action), cfg.w1, cfg.w2);
      }
    }
    ja.command = {u, ja.k_f};

    const EnvStep es = env.step(ja);
    sd.reward = es.reward;
    if (!std::isfinite(sd.reward)) throw std::domain_error("non-finite reward");
    tr.steps.push_back(std::move(sd));
    prev_option = s1.option;
    obs = es.observation;
    if (es.terminal) {
      tr.terminal = true;
      break;
    }
    if (es.truncated) break;
  }
  if (!tr.terminal) {
    tr.boot_v1 = joint.pi1.forward(detail::head(obs, joint.pi1)).value;
    if (joint.pi2) tr.boot_v2 = joint.pi2->forward(detail::head(obs, *joint.pi2)).value;
  }
  return tr;
}

// Per-episode training-log record.
struct EpisodeLog {
  std::size_t macro = 0;
  std::string phase;  // "eval", "R", "C" or "check"
  std::size_t update = 0;
  std::size_t episode = 0;
  double reward = 0.0;
  double discounted = 0.0;
  std::size_t length = 0;
  double event_rate = 0.0;
  std::uint64_t c1_digest = 0;
  std::uint64_t r2_digest = 0;
};

using Logger = std::function<void(const EpisodeLog&)>;

// Samples for one player's network. Advantages use that player's critic.
inline std::vector<policy::PpoSample> build_samples(
    const std::vector<Trajectory>& batch, const JointPolicy& joint,
    Player who, const policy::LearnerConfig& lc) {
  std::vector<policy::PpoSample> out;
  const policy::Network& net = who == Player::kController ? joint.pi1 : *joint.pi2;
  const std::size_t w = net.spec().input;
  for (const auto& tr : batch) {
    if (tr.steps.empty()) continue;
    std::vector<double> r, v;
    for (const auto& s : tr.steps) {
      r.push_back(s.reward * lc.reward_scale);
      v.push_back(who == Player::kController ? s.v1 : s.v2);
    }
    const double boot = tr.terminal ? 0.0
                                    : (who == Player::kController ? tr.boot_v1 : tr.boot_v2);
    const auto adv = policy::gae_advantages(r, v, boot, lc.gamma, lc.gae_lambda);
    for (std::size_t t = 0; t < tr.steps.size(); ++t) {
      const StepData& s = tr.steps[t];
      policy::PpoSample p;
      p.input.assign(s.obs.begin(), s.obs.begin() + static_cast<std::ptrdiff_t>(w));
      p.advantage = adv.advantages[t];
      p.ret = adv.returns[t];
      if (who == Player::kController) {
        p.action = s.a1;
        p.option = net.spec().options ? s.option : -1;
        p.prev_option = net.spec().options ? s.prev_option : -1;
        p.log_prob_old = s.logp1;
      } else {
        p.policy_active = s.a2.has_value();
        p.action = s.a2 ? *s.a2 : std::vector<double>(net.spec().actions, 0.0);
        p.log_prob_old = s.logp2;
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

// Critic regression targets: discounted Monte-Carlo returns (scaled).
inline std::vector<policy::PpoSample> return_samples(
    const std::vector<Trajectory>& batch, const policy::Network& net,
    const policy::LearnerConfig& lc) {
  std::vector<policy::PpoSample> out;
  const std::size_t w = net.spec().input;
  for (const auto& tr : batch) {
    double g = 0.0;
    std::vector<double> rets(tr.steps.size());
    for (std::size_t t = tr.steps.size(); t-- > 0;) {
      g = tr.steps[t].reward * lc.reward_scale + lc.gamma * g;
      rets[t] = g;
    }
    for (std::size_t t = 0; t < tr.steps.size(); ++t) {
      policy::PpoSample p;
      p.input.assign(tr.steps[t].obs.begin(),
                     tr.steps[t].obs.begin() + static_cast<std::ptrdiff_t>(w));
      p.action.assign(net.spec().actions, 0.0);
      p.ret = rets[t];
      p.policy_active = false;
      out.push_back(std::move(p));
    }
  }
  return out;
}

struct EvalResult {
  double value = 0.0;        // mean discounted return from s0
  double mean_reward = 0.0;  // mean undiscounted episode reward
  double critic_s0 = 0.0;    // controller critic at s0, reward units
};

// Frozen-policy evaluation. With fit_values the critics are regressed on the
// observed returns after all episodes have run; actors never change.
template <Environment E, class Rng>
EvalResult policy_eval(E& env, JointPolicy& joint, const GameConfig& cfg,
                       std::size_t episodes, SeedStream& seeds, Rng& rng,
                       bool fit_values = false, const Logger& log = {},
                       std::size_t macro = 0, const char* phase = "eval") {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  std::vector<Trajectory> batch;
  EvalResult r;
  for (std::size_t k = 0; k < episodes; ++k) {
    batch.push_back(rollout(env, joint, cfg, seeds.next(), rng));
    const Trajectory& tr = batch.back();
    const double disc = tr.discounted(cfg.learner.gamma);
    r.value += disc;
    r.mean_reward += tr.total_reward();
    if (!tr.steps.empty()) r.critic_s0 += tr.steps.front().v1 / cfg.learner.reward_scale;
    if (log)
      log({macro, phase, 0, k, tr.total_reward(), disc, tr.steps.size(), tr.event_rate(),
           joint.pi1.digest(), joint.pi2 ? joint.pi2->digest() : 0});
  }
  const double n = static_cast<double>(episodes);
  r.value /= n;
  r.mean_reward /= n;
  r.critic_s0 /= n;
  if (fit_values && cfg.value_fit_epochs > 0) {
    const auto lc = cfg.learner;
    policy::Adam a1(joint.pi1.size(), joint.pi1.layout().actor_end, lc.actor_lr, lc.critic_lr);
    policy::fit_value(joint.pi1, a1, return_samples(batch, joint.pi1, lc), lc,
                      cfg.value_fit_epochs, rng);
    if (joint.pi2) {
      policy::Adam a2(joint.pi2->size(), joint.pi2->layout().actor_end, lc.actor_lr,
                      lc.critic_lr);
      policy::fit_value(*joint.pi2, a2, return_samples(batch, *joint.pi2, lc), lc,
                        cfg.value_fit_epochs, rng);
    }
  }
  return r;
}

struct LearnResult {
  double value = 0.0;  // mean episode reward over the final window
  std::size_t updates = 0;
  std::size_t episodes = 0;
  bool converged = false;
  std::vector<double> update_rewards;
};

// PPO on the learner only, the partner frozen. Stops when the windowed mean
// episode reward changes by at most epsilon_inner, or at max_updates.
template <Environment E, class Rng>
LearnResult ppo_learning(E& env, JointPolicy& joint, Player learner,
                         const GameConfig& cfg, SeedStream& seeds, Rng& rng,
                         const Logger& log = {}, std::size_t macro = 0) {
  cfg.validate();
  if (learner == Player::kRegulator && !joint.pi2)
    throw std::invalid_argument("no regulator to train");
  policy::Network& net = learner == Player::kController ? joint.pi1 : *joint.pi2;
  const policy::LearnerConfig lc = cfg.learner_with_floor();
  policy::Adam opt(net.size(), net.layout().actor_end, lc.actor_lr, lc.critic_lr);
  LearnResult res;
  auto window_mean = [&](std::size_t end) {
    double s = 0.0;
    for (std::size_t k = end - cfg.window; k < end; ++k) s += res.update_rewards[k];
    return s / static_cast<double>(cfg.window);
  };
  for (std::size_t u = 0; u < cfg.max_updates; ++u) {
    std::vector<Trajectory> batch;
    double mean = 0.0;
    for (std::size_t k = 0; k < cfg.episodes_per_update; ++k) {
      batch.push_back(rollout(env, joint, cfg, seeds.next(), rng));
      const Trajectory& tr = batch.back();
      mean += tr.total_reward();
      if (log)
        log({macro, phase_name(learner), u, res.episodes, tr.total_reward(),
             tr.discounted(lc.gamma), tr.steps.size(), tr.event_rate(), joint.pi1.digest(),
             joint.pi2 ? joint.pi2->digest() : 0});
      ++res.episodes;
    }
    mean /= static_cast<double>(cfg.episodes_per_update);
    res.update_rewards.push_back(mean);
    auto samples = build_samples(batch, joint, learner, lc);
    bool any_active = false;
    for (const auto& s : samples) any_active = any_active || s.policy_active;
    if (!samples.empty()) {
      if (any_active)
        policy::ppo_update(net, opt, std::move(samples), lc, rng);
      else
        policy::fit_value(net, opt, samples, lc, lc.epochs, rng);
    }
    res.updates = u + 1;
    const std::size_t n = res.update_rewards.size();
    if (n >= std::max(cfg.min_updates, 2 * cfg.window) &&
        std::abs(window_mean(n) - window_mean(n - cfg.window)) <= cfg.epsilon_inner) {
      res.converged = true;
      break;
    }
  }
  const std::size_t n = res.update_rewards.size();
  const std::size_t w = std::min(cfg.window, n);
  for (std::size_t k = n - w; k < n; ++k) res.value += res.update_rewards[k];
  res.value /= static_cast<double>(w);
  return res;
}

// Called after each macro-iteration with the iteration index (0 = initial
// evaluation) and the joint policy at that boundary.
using MacroHook = std::function<void(std::size_t, const JointPolicy&)>;

struct PlayResult {
  JointPolicy joint;
  std::vector<double> values;  // V^0, V^1, ...
  std::vector<Player> learners;
  std::size_t iterations = 0;
  bool converged = false;
  bool max_iterations = false;
};

// Alternating best responses starting with the regulator. V^i is the mean
// discounted return of the joint policy after macro-iteration i.
template <Environment E>
PlayResult fictitious_play(E& env, JointPolicy joint, const GameConfig& cfg,
                           const Logger& log = {}, const MacroHook& hook = {}) {
  cfg.validate();
  if (!joint.pi2) throw std::invalid_argument("fictitious play needs both players");
  std::mt19937_64 rng(splitmix64(cfg.seed));
  SeedStream seeds(cfg.seed);
  PlayResult out;
  out.values.push_back(
      policy_eval(env, joint, cfg, cfg.eval_episodes, seeds, rng, true, log, 0, "eval").value);
  joint.flag = Player::kRegulator;
  if (hook) hook(0, joint);
  for (std::size_t i = 1; i <= cfg.n_max; ++i) {
    ppo_learning(env, joint, joint.flag, cfg, seeds, rng, log, i);
    out.learners.push_back(joint.flag);
    out.values.push_back(
        policy_eval(env, joint, cfg, cfg.eval_episodes, seeds, rng, true, log, i, "check")
            .value);
    out.iterations = i;
    if (hook) hook(i, joint);
    joint.flag = joint.flag == Player::kRegulator ? Player::kController
                                                  : Player::kRegulator;
    if (std::abs(out.values[i] - out.values[i - 1]) <= cfg.epsilon) {
      out.converged = true;
      break;
    }
  }
  out.max_iterations = !out.converged;
  out.joint = std::move(joint);
  return out;
}

}  // namespace snakecpg::game

#endif  // SNAKECPG_GAME_HPP_
