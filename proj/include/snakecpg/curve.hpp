// Shape analysis of a fictitious-play training log: evaluation phase, the
// alternating best-response phases, and the dip that follows a switch.

#ifndef SNAKECPG_CURVE_HPP_
#define SNAKECPG_CURVE_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "snakecpg/game.hpp"

namespace snakecpg::curve {

struct Phase {
  std::size_t macro = 0;
  std::string name;  // "eval", "R", "C" or "check"
  std::vector<double> rewards;
  std::vector<double> update_means;  // per PPO update, training phases only
  double mean = 0.0;
};

inline std::vector<Phase> phases(const std::vector<game::EpisodeLog>& log) {
  std::vector<Phase> out;
  std::map<std::size_t, std::vector<double>> by_update;
  auto close = [&] {
    if (out.empty()) return;
    Phase& p = out.back();
    double s = 0.0;
    for (double r : p.rewards) s += r;
    p.mean = p.rewards.empty() ? 0.0 : s / static_cast<double>(p.rewards.size());
    for (auto& [u, rs] : by_update) {
      double m = 0.0;
      for (double r : rs) m += r;
      p.update_means.push_back(m / static_cast<double>(rs.size()));
    }
    by_update.clear();
  };
  for (const auto& l : log) {
    if (out.empty() || out.back().macro != l.macro || out.back().name != l.phase) {
      close();
      out.push_back({l.macro, l.phase, {}, {}, 0.0});
    }
    out.back().rewards.push_back(l.reward);
    if (l.phase == "R" || l.phase == "C") by_update[l.update].push_back(l.reward);
  }
  close();
  return out;
}

struct Shape {
  bool has_eval = false;
  bool eval_frozen = false;  // parameters unchanged across the eval phase
  bool alternating = false;  // training phases go R, C, R, ...
  bool dip = false;          // some phase opens below the level before the switch
  bool recovery = false;     // ... and later climbs above that opening
  double eval_mean = 0.0;
  double final_mean = 0.0;   // last training phase
  std::size_t dip_macro = 0;

  bool ok() const {
    return has_eval && eval_frozen && alternating && dip && recovery &&
           final_mean >= eval_mean;
  }
};

inline Shape analyze(const std::vector<game::EpisodeLog>& log) {
  Shape s;
  const auto ph = phases(log);
  std::vector<const Phase*> train;
  for (const auto& p : ph)
    if (p.name == "R" || p.name == "C") train.push_back(&p);
  if (!ph.empty() && ph.front().name == "eval") {
    s.has_eval = true;
    s.eval_mean = ph.front().mean;
    s.eval_frozen = true;
    const auto& first = log.front();
    for (const auto& l : log)
      if (l.phase == "eval" && l.macro == 0)
        s.eval_frozen = s.eval_frozen && l.c1_digest == first.c1_digest &&
                        l.r2_digest == first.r2_digest;
  }
  s.alternating = !train.empty() && train.front()->name == "R";
  for (std::size_t k = 1; k < train.size(); ++k)
    s.alternating = s.alternating && train[k]->name != train[k - 1]->name;
  if (!train.empty()) s.final_mean = train.back()->mean;
  for (std::size_t k = 0; k < train.size() && !s.recovery; ++k) {
    const auto& um = train[k]->update_means;
    if (um.size() < 2) continue;
    const double before = k == 0 ? s.eval_mean : train[k - 1]->update_means.back();
    if (um.front() < before) {
      s.dip = true;
      s.dip_macro = train[k]->macro;
      for (std::size_t u = 1; u < um.size(); ++u) s.recovery = s.recovery || um[u] > um.front();
    }
  }
  return s;
}

}  // namespace snakecpg::curve

#endif  // SNAKECPG_CURVE_HPP_
