// Text artifacts: metric tables, per-step trajectory records (JSON lines),
// and the per-episode training log (CSV).

#ifndef SNAKECPG_EXPORT_HPP_
#define SNAKECPG_EXPORT_HPP_

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "snakecpg/game.hpp"
#include "snakecpg/metrics.hpp"
#include "snakecpg/task.hpp"

namespace snakecpg::io {

using json = nlohmann::json;

inline constexpr const char* kTableHeader =
    "Method\tJam ratio\tAvg. linear velocity (m/s)\tSuccess rate\tAvg. time per goal (s)";

inline std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct TableRow {
  std::string method;
  bench::AggregateMetrics metrics;
};

inline std::string metrics_table(const std::vector<TableRow>& rows) {
  std::string s = std::string(kTableHeader) + "\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    s += r.method + "\t" + fmt(m.jam_ratio) + "\t" + fmt(m.avg_linear_velocity) + "\t" +
         fmt(m.success_rate) + "\t" +
         (m.avg_time_per_goal ? fmt(*m.avg_time_per_goal, 2) : std::string("n/a")) + "\n";
  }
  return s;
}

inline constexpr const char* kEpisodeHeader =
    "episode\tsuccess\ttime_to_goal\tjam_time\ttask_time\tdistance\tmean_speed\tevent_fraction";

inline std::string episode_table(const std::vector<bench::EpisodeMetrics>& eps) {
  std::string s = std::string(kEpisodeHeader) + "\n";
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const auto& e = eps[k];
    s += std::to_string(k) + "\t" + (e.success ? "1" : "0") + "\t" +
         (e.time_to_goal ? fmt(*e.time_to_goal, 2) : std::string("n/a")) + "\t" +
         fmt(e.jam_time, 2) + "\t" + fmt(e.task_time, 2) + "\t" + fmt(e.distance) + "\t" +
         fmt(e.mean_speed) + "\t" + fmt(e.event_trigger_fraction) + "\n";
  }
  return s;
}

// Doubles go through JSON's shortest round-trip formatting, so re-reading a
// dump gives back the same bits.
template <std::size_t N>
json arr(const std::array<double, N>& a) {
  return json(std::vector<double>(a.begin(), a.end()));
}

inline json step_record(const env::StepRecord& r) {
  return {{"t", r.time},
          {"head", {r.head.position.x, r.head.position.y, r.head.heading}},
          {"v", {r.velocity.x, r.velocity.y}},
          {"kappa", arr(r.kappa)},
          {"psi", arr(r.psi)},
          {"du", arr(r.tonic_imbalance)},
          {"k_f", r.k_f},
          {"f", arr(r.f)},
          {"reward", {{"goal", r.reward.goal},
                      {"attract", r.reward.attract},
                      {"repulse", r.reward.repulse},
                      {"total", r.reward.total}}},
          {"event", r.event},
          {"regulator", r.regulator_active},
          {"jammed", r.jammed},
          {"status", env::to_string(r.status)}};
}

template <std::size_t N>
void read_arr(const json& j, std::array<double, N>& a) {
  if (j.size() != N) throw std::invalid_argument("record array has the wrong length");
  for (std::size_t i = 0; i < N; ++i) a[i] = j[i].get<double>();
}

inline env::StepRecord parse_step_record(const json& j) {
  env::StepRecord r;
  r.time = j.at("t").get<double>();
  const auto& h = j.at("head");
  r.head = {{h[0].get<double>(), h[1].get<double>()}, h[2].get<double>()};
  r.velocity = {j.at("v")[0].get<double>(), j.at("v")[1].get<double>()};
  read_arr(j.at("kappa"), r.kappa);
  read_arr(j.at("psi"), r.psi);
  read_arr(j.at("du"), r.tonic_imbalance);
  r.k_f = j.at("k_f").get<double>();
  read_arr(j.at("f"), r.f);
  const auto& w = j.at("reward");
  r.reward = {w.at("goal").get<double>(), w.at("attract").get<double>(),
              w.at("repulse").get<double>(), w.at("total").get<double>()};
  r.event = j.at("event").get<bool>();
  r.regulator_active = j.at("regulator").get<bool>();
  r.jammed = j.at("jammed").get<bool>();
  const std::string st = j.at("status").get<std::string>();
  r.status = env::EpisodeStatus::kRunning;
  for (auto s : {env::EpisodeStatus::kGoalReached, env::EpisodeStatus::kStarved,
                 env::EpisodeStatus::kMissedGoal})
    if (st == env::to_string(s)) r.status = s;
  return r;
}

// First line describes the episode; every following line is one control step.
inline void write_trajectory(std::ostream& o, const env::SnakeEnv& e,
                             const bench::EpisodeMetrics& m, std::uint64_t seed) {
  json obstacles = json::array();
  for (const auto& ob : e.scenario().obstacles)
    obstacles.push_back({ob.center.x, ob.center.y, ob.radius});
  json head = {{"kind", "episode"},
               {"seed", seed},
               {"goal", {e.scenario().goal.x, e.scenario().goal.y}},
               {"accept_radius", e.scenario().accept_radius},
               {"obstacles", obstacles},
               {"status", env::to_string(e.status())},
               {"success", m.success},
               {"task_time", m.task_time},
               {"jam_time", m.jam_time},
               {"distance", m.distance},
               {"event_trigger_fraction", m.event_trigger_fraction}};
  o << head.dump() << "\n";
  for (const auto& r : e.records()) o << step_record(r).dump() << "\n";
}

struct TrajectoryDump {
  json episode;
  std::vector<env::StepRecord> steps;
};

inline TrajectoryDump read_trajectory(std::istream& in) {
  TrajectoryDump d;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (first) {
      if (j.value("kind", "") != "episode") throw std::invalid_argument("missing episode header");
      d.episode = j;
      first = false;
    } else {
      d.steps.push_back(parse_step_record(j));
    }
  }
  if (first) throw std::invalid_argument("empty trajectory dump");
  return d;
}

inline constexpr const char* kLogHeader =
    "macro,phase,update,episode,reward,discounted,length,event_rate,c1_digest,r2_digest";

inline std::string log_line(const game::EpisodeLog& l) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%s,%zu,%zu,%.17g,%.17g,%zu,%.17g,%016llx,%016llx",
                l.macro, l.phase.c_str(), l.update, l.episode, l.reward, l.discounted,
                l.length, l.event_rate, static_cast<unsigned long long>(l.c1_digest),
                static_cast<unsigned long long>(l.r2_digest));
  return buf;
}

inline std::vector<game::EpisodeLog> read_log(std::istream& in) {
  std::vector<game::EpisodeLog> out;
  std::string line;
  if (!std::getline(in, line) || line != kLogHeader)
    throw std::invalid_argument("training log header mismatch");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> c;
    std::string cell;
    while (std::getline(ss, cell, ',')) c.push_back(cell);
    if (c.size() != 10) throw std::invalid_argument("bad training log line: " + line);
    game::EpisodeLog l;
    l.macro = std::stoull(c[0]);
    l.phase = c[1];
    l.update = std::stoull(c[2]);
    l.episode = std::stoull(c[3]);
    l.reward = std::stod(c[4]);
    l.discounted = std::stod(c[5]);
    l.length = std::stoull(c[6]);
    l.event_rate = std::stod(c[7]);
    l.c1_digest = std::stoull(c[8], nullptr, 16);
    l.r2_digest = std::stoull(c[9], nullptr, 16);
    out.push_back(l);
  }
  return out;
}

}  // namespace snakecpg::io

#endif  // SNAKECPG_EXPORT_HPP_
