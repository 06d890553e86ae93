// Attracting and FIRAS repulsive potential fields and the shared reward.

#ifndef SNAKECPG_FIELD_HPP_
#define SNAKECPG_FIELD_HPP_

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "snakecpg/geometry.hpp"
#include "snakecpg/robot.hpp"

namespace snakecpg::reward {

struct FieldParams {
  double k_att = 1.0;
  double k_rep = 0.01;
  double rho_0 = 0.2;
  std::vector<double> levels{0.2, 0.1, 0.05};
  double omega_goal = 100.0;
  double omega_att = 1.0;
  double omega_rep = 1.0;

  void validate() const {
    if (!(k_att > 0.0) || !(k_rep > 0.0) || !(rho_0 > 0.0))
      throw std::invalid_argument("field gains and cutoff must be positive");
    for (std::size_t k = 0; k < levels.size(); ++k) {
      if (!(levels[k] > 0.0))
        throw std::invalid_argument("reward levels must be positive");
      if (k > 0 && !(levels[k] < levels[k - 1]))
        throw std::invalid_argument("reward levels must be sorted descending");
    }
    if (!(omega_goal >= 0.0) || !(omega_att >= 0.0) || !(omega_rep >= 0.0))
      throw std::invalid_argument("reward weights must be nonnegative");
  }
};

inline double attract_potential(Vec2 p, Vec2 goal, double k_att) {
  const Vec2 d = p - goal;
  return 0.5 * k_att * dot(d, d);
}

inline Vec2 attract_force(Vec2 p, Vec2 goal, double k_att) {
  return (p - goal) * -k_att;
}

// Distance from p to the obstacle surface; a zero radius gives the point form.
inline double surface_distance(Vec2 p, const env::Obstacle& ob) {
  return norm(p - ob.center) - ob.radius;
}

inline double repulse_potential(Vec2 p, std::span<const env::Obstacle> obstacles,
                                double k_rep, double rho_0) {
  double u = 0.0;
  for (const auto& ob : obstacles) {
    const double rho = surface_distance(p, ob);
    if (rho <= 0.0) throw std::domain_error("singular repulsion");
    if (rho > rho_0) continue;
    const double g = 1.0 / rho - 1.0 / rho_0;
    u += 0.5 * k_rep * g * g;
  }
  return u;
}

// Sum over obstacles within rho_0 of k_rep (1/rho - 1/rho_0)/rho^2 along the
// outward normal, i.e. -grad of repulse_potential. For a point obstacle this is
// k_rep (p - p_o)(1/rho - 1/rho_0)/rho^3.
inline Vec2 repulse_force(Vec2 p, std::span<const env::Obstacle> obstacles,
                          double k_rep, double rho_0) {
  Vec2 f;
  for (const auto& ob : obstacles) {
    const double rho = surface_distance(p, ob);
    if (rho <= 0.0) throw std::domain_error("singular repulsion");
    if (rho > rho_0) continue;
    const Vec2 d = p - ob.center;
    const Vec2 outward = d / norm(d);
    f += outward * (k_rep * (1.0 / rho - 1.0 / rho_0) / (rho * rho));
  }
  return f;
}

inline double goal_reward(double theta_g, double rho_g,
                          std::span<const double> levels) {
  if (!(rho_g >= 0.0)) throw std::invalid_argument("rho_g must be >= 0");
  double s = 0.0;
  for (double l : levels)
    if (rho_g < l) s += 1.0 / l;
  return std::cos(theta_g) * s;
}

struct RewardTerms {
  double goal = 0.0;
  double attract = 0.0;
  double repulse = 0.0;
  double total = 0.0;
};

inline RewardTerms reward_terms(Vec2 v, Vec2 p, Vec2 goal, double theta_g,
                                std::span<const env::Obstacle> obstacles,
                                const FieldParams& fp) {
  RewardTerms r;
  r.goal = goal_reward(theta_g, norm(goal - p), fp.levels);
  r.attract = dot(v, attract_force(p, goal, fp.k_att));
  r.repulse = dot(v, repulse_force(p, obstacles, fp.k_rep, fp.rho_0));
  r.total = fp.omega_goal * r.goal + fp.omega_att * r.attract +
            fp.omega_rep * r.repulse;
  return r;
}

inline double step_reward(Vec2 v, Vec2 p, Vec2 goal, double theta_g,
                          std::span<const env::Obstacle> obstacles,
                          const FieldParams& fp) {
  return reward_terms(v, p, goal, theta_g, obstacles, fp).total;
}

}  // namespace snakecpg::reward

#endif  // SNAKECPG_FIELD_HPP_
