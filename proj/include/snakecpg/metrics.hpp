// Per-episode outcomes and their aggregation into the comparison table.

#ifndef SNAKECPG_METRICS_HPP_
#define SNAKECPG_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>

namespace snakecpg::bench {

struct EpisodeMetrics {
  bool success = false;
  std::optional<double> time_to_goal;
  double jam_time = 0.0;
  double task_time = 0.0;
  double distance = 0.0;  // head path length at the control rate
  double mean_speed = 0.0;
  double event_trigger_fraction = 0.0;
};

struct AggregateMetrics {
  double jam_ratio = 0.0;
  double avg_linear_velocity = 0.0;
  double success_rate = 0.0;
  std::optional<double> avg_time_per_goal;
  std::size_t episodes = 0;
  double event_trigger_fraction = 0.0;
};

// Sums run in episode order, so equal inputs give bit-identical results.
inline AggregateMetrics compute_metrics(std::span<const EpisodeMetrics> eps) {
  if (eps.empty()) throw std::invalid_argument("no episodes to aggregate");
  AggregateMetrics a;
  a.episodes = eps.size();
  double jam = 0.0, task = 0.0, dist = 0.0, weighted_speed = 0.0, goal_time = 0.0;
  double events = 0.0;
  std::size_t successes = 0;
  for (const auto& e : eps) {
    jam += e.jam_time;
    task += e.task_time;
    dist += e.distance;
    weighted_speed += e.distance * e.mean_speed;
    events += e.event_trigger_fraction;
    if (e.success) {
      ++successes;
      goal_time += e.time_to_goal.value_or(e.task_time);
    }
  }
  a.jam_ratio = task > 0.0 ? jam / task : 0.0;
  a.avg_linear_velocity = dist > 0.0 ? weighted_speed / dist : 0.0;
  a.success_rate = static_cast<double>(successes) / static_cast<double>(eps.size());
  if (successes > 0) a.avg_time_per_goal = goal_time / static_cast<double>(successes);
  a.event_trigger_fraction = events / static_cast<double>(eps.size());
  return a;
}

}  // namespace snakecpg::bench

#endif  // SNAKECPG_METRICS_HPP_
