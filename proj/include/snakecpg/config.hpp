// Workbench configuration: one JSON object with a section per module. Every
// field is optional on input (defaults fill the gaps) and unknown keys are
// rejected so that typos do not pass silently.

#ifndef SNAKECPG_CONFIG_HPP_
#define SNAKECPG_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "snakecpg/game.hpp"
#include "snakecpg/pipeline.hpp"
#include "snakecpg/task.hpp"

namespace snakecpg::config {

using json = nlohmann::json;

struct Workbench {
  env::TaskConfig task;
  std::size_t hidden = 64;
  game::GameConfig game;
  std::size_t pretrain_updates = 150;
  double train_max_time = 30.0;
  std::size_t eval_episodes = 30;
  std::uint64_t eval_seed = 7;
  double eval_max_time = 60.0;
  bench::MazeSpec train_maze = bench::training_maze();
  bench::MazeSpec test_maze = bench::test_maze();
  bench::MazeSpec free_field = bench::empty_field();

  Workbench() {
    game.learner.reward_scale = 0.01;
    game.learner.actor_lr = 1e-3;
    game.epsilon = 100.0;
    game.n_max = 4;
    game.eval_episodes = 16;
    game.min_updates = 10;
    game.max_updates = 30;
    game.epsilon_inner = 20.0;
    free_field.goal_distance = 1.5;
  }

  void validate() const {
    task.validate();
    game.validate();
    if (hidden == 0 || pretrain_updates == 0 || eval_episodes == 0)
      throw std::invalid_argument("hidden, pretrain_updates, eval_episodes must be > 0");
    if (!(train_max_time > 0.0) || !(eval_max_time > 0.0))
      throw std::invalid_argument("time limits must be > 0");
  }

  bench::PretrainConfig pretrain() const {
    bench::PretrainConfig p;
    p.updates = pretrain_updates;
    p.hidden = hidden;
    p.task = task;
    p.task.max_time = train_max_time;
    p.field = free_field;
    p.game = game;
    return p;
  }

  bench::TrainConfig train() const {
    bench::TrainConfig t;
    t.hidden = hidden;
    t.task = task;
    t.task.max_time = train_max_time;
    t.maze = train_maze;
    t.game = game;
    return t;
  }

  bench::EvalConfig eval() const {
    bench::EvalConfig e;
    e.episodes = eval_episodes;
    e.seed = eval_seed;
    e.maze = test_maze;
    e.task = task;
    e.task.max_time = eval_max_time;
    return e;
  }
};

namespace detail {

// Field visitor used for both directions.
struct Writer {
  json& j;
  template <class T>
  void operator()(const char* key, const T& v) { j[key] = v; }
};

struct Reader {
  const json& j;
  std::string section;
  std::set<std::string> known;

  template <class T>
  void operator()(const char* key, T& v) {
    known.insert(key);
    if (!j.contains(key)) return;
    try {
      v = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw std::invalid_argument("config " + section + "." + key + ": " + e.what());
    }
  }

  void finish() const {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!known.count(it.key()))
        throw std::invalid_argument("unknown config key " + section + "." + it.key());
  }
};

template <class V>
void fields(V& v, cpg::OscillatorParams& p) {
  v("tau_r", p.tau_r);
  v("tau_a", p.tau_a);
  v("a", p.a);
  v("b", p.b);
  v("n", p.n);
  v("w", p.w);
}

template <class V>
void fields(V& v, env::RobotConfig& r) {
  v("n_links", r.n_links);
  v("link_length", r.link_length);
  v("body_length", r.body_length);
  v("body_half_width", r.body_half_width);
  v("body_mass", r.body_mass);
  v("c_t", r.c_t);
  v("c_n", r.c_n);
  v("kappa_gain", r.kappa_gain);
  v("tau_act", r.tau_act);
  v("contact_stiffness", r.contact_stiffness);
  v("arc_samples", r.arc_samples);
}

template <class V>
void fields(V& v, reward::FieldParams& f) {
  v("k_att", f.k_att);
  v("k_rep", f.k_rep);
  v("rho_0", f.rho_0);
  v("levels", f.levels);
  v("omega_goal", f.omega_goal);
  v("omega_att", f.omega_att);
  v("omega_rep", f.omega_rep);
}

template <class V>
void fields(V& v, env::TerminationParams& t) {
  v("accept_radius", t.accept_radius);
  v("jam_speed", t.jam.v0);
  v("jam_time", t.jam.t_jam);
  v("starve_time", t.starve_time);
  v("missed_goal_steps", t.missed_goal_steps);
}

template <class V>
void task_fields(V& v, env::TaskConfig& t) {
  v("control_dt", t.control_dt);
  v("physics_dt", t.physics_dt);
  v("detection_radius", t.detection_radius);
  v("max_time", t.max_time);
  v("options", t.options);
  v("warmup", t.warmup);
  v("direct_curvature", t.direct_curvature);
  v("direct_psi_max", t.direct_psi_max);
  v("min_repulse_distance", t.min_repulse_distance);
}

template <class V>
void fields(V& v, policy::LearnerConfig& l) {
  v("gamma", l.gamma);
  v("gae_lambda", l.gae_lambda);
  v("clip", l.clip);
  v("kl_target", l.kl_target);
  v("actor_lr", l.actor_lr);
  v("critic_lr", l.critic_lr);
  v("minibatch", l.minibatch);
  v("epochs", l.epochs);
  v("entropy_coef", l.entropy_coef);
  v("max_grad_norm", l.max_grad_norm);
  v("normalize_advantages", l.normalize_advantages);
  v("reward_scale", l.reward_scale);
}

template <class V>
void fields(V& v, game::GameConfig& g) {
  v("epsilon", g.epsilon);
  v("n_max", g.n_max);
  v("lambda", g.lambda_br);
  v("w1", g.w1);
  v("w2", g.w2);
  v("eval_episodes", g.eval_episodes);
  v("episodes_per_update", g.episodes_per_update);
  v("min_updates", g.min_updates);
  v("max_updates", g.max_updates);
  v("epsilon_inner", g.epsilon_inner);
  v("window", g.window);
  v("value_fit_epochs", g.value_fit_epochs);
  v("seed", g.seed);
}

template <class V>
void fields(V& v, bench::MazeSpec& m) {
  v("rows", m.rows);
  v("cols", m.cols);
  v("spacing", m.spacing);
  v("radius", m.radius);
  v("noise_clip", m.noise_clip);
  v("goal_distance", m.goal_distance);
  v("max_deviation_deg", m.max_deviation_deg);
  v("accept_radius", m.accept_radius);
}

template <class V>
void bench_fields(V& v, Workbench& w) {
  v("hidden", w.hidden);
  v("pretrain_updates", w.pretrain_updates);
  v("train_max_time", w.train_max_time);
  v("eval_episodes", w.eval_episodes);
  v("eval_seed", w.eval_seed);
  v("eval_max_time", w.eval_max_time);
}

template <class T, class F>
json write_section(T& obj, F f) {
  json j = json::object();
  Writer w{j};
  f(w, obj);
  return j;
}

template <class T, class F>
void read_section(const json& root, const char* name, T& obj, F f) {
  if (!root.contains(name)) return;
  const json& j = root.at(name);
  if (!j.is_object()) throw std::invalid_argument(std::string("config section ") + name + " must be an object");
  Reader r{j, name, {}};
  f(r, obj);
  r.finish();
}

inline const char* scaling_name(cpg::FrequencyScaling s) {
  return s == cpg::FrequencyScaling::kDischarge ? "discharge" : "both";
}

}  // namespace detail

inline json to_json(const Workbench& wb) {
  Workbench w = wb;
  using namespace detail;
  auto f = [](auto& v, auto& s) { fields(v, s); };
  json j;
  j["cpg"] = write_section(w.task.cpg, f);
  j["cpg"]["scaling"] = scaling_name(w.task.cpg.scaling);
  j["robot"] = write_section(w.task.robot, f);
  json offs = json::array();
  for (const auto& o : w.task.robot.sensor_offsets) offs.push_back({o.x, o.y});
  j["robot"]["sensor_offsets"] = offs;
  j["reward"] = write_section(w.task.field, f);
  j["termination"] = write_section(w.task.termination, f);
  j["task"] = write_section(w.task, [](auto& v, auto& s) { task_fields(v, s); });
  j["learner"] = write_section(w.game.learner, f);
  j["game"] = write_section(w.game, f);
  j["bench"] = write_section(w, [](auto& v, auto& s) { bench_fields(v, s); });
  j["train_maze"] = write_section(w.train_maze, f);
  j["test_maze"] = write_section(w.test_maze, f);
  j["free_field"] = write_section(w.free_field, f);
  return j;
}

inline Workbench from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw std::invalid_argument("config root must be an object");
  static const std::set<std::string> sections{"cpg", "robot", "reward", "termination",
                                              "task", "learner", "game", "bench",
                                              "train_maze", "test_maze", "free_field"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!sections.count(it.key())) throw std::invalid_argument("unknown config section " + it.key());
  Workbench w;
  auto f = [](auto& v, auto& s) { fields(v, s); };

  // Coupling matrix size follows n unless w is given explicitly.
  if (j.contains("cpg")) {
    json c = j.at("cpg");
    std::string scaling = c.value("scaling", std::string("discharge"));
    c.erase("scaling");
    if (scaling == "discharge")
      w.task.cpg.scaling = cpg::FrequencyScaling::kDischarge;
    else if (scaling == "both")
      w.task.cpg.scaling = cpg::FrequencyScaling::kBothTimeConstants;
    else
      throw std::invalid_argument("cpg.scaling must be \"discharge\" or \"both\"");
    const std::size_t n0 = w.task.cpg.n;
    read_section(json{{"cpg", c}}, "cpg", w.task.cpg, f);
    if (w.task.cpg.n != n0 && !c.contains("w"))
      w.task.cpg.w = cpg::headward_chain_coupling(w.task.cpg.n, 0.2);
  }
  if (j.contains("robot")) {
    json r = j.at("robot");
    if (r.contains("sensor_offsets")) {
      const auto& o = r.at("sensor_offsets");
      if (!o.is_array() || o.size() != w.task.robot.sensor_offsets.size())
        throw std::invalid_argument("robot.sensor_offsets needs 4 [x, y] pairs");
      for (std::size_t k = 0; k < o.size(); ++k)
        w.task.robot.sensor_offsets[k] = {o[k].at(0).get<double>(), o[k].at(1).get<double>()};
      r.erase("sensor_offsets");
    }
    read_section(json{{"robot", r}}, "robot", w.task.robot, f);
  }
  read_section(j, "reward", w.task.field, f);
  read_section(j, "termination", w.task.termination, f);
  read_section(j, "task", w.task, [](auto& v, auto& s) { task_fields(v, s); });
  read_section(j, "learner", w.game.learner, f);
  read_section(j, "game", w.game, f);
  read_section(j, "bench", w, [](auto& v, auto& s) { bench_fields(v, s); });
  read_section(j, "train_maze", w.train_maze, f);
  read_section(j, "test_maze", w.test_maze, f);
  read_section(j, "free_field", w.free_field, f);
  w.game.options = w.task.options;
  w.validate();
  return w;
}

inline Workbench load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  return from_json(j);
}

inline std::string dump(const Workbench& w) { return to_json(w).dump(2) + "\n"; }

inline std::uint64_t digest(const Workbench& w) {
  const std::string s = to_json(w).dump();
  return policy::fnv1a(s.data(), s.size());
}

inline void save(const Workbench& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << dump(w);
}

}  // namespace snakecpg::config

#endif  // SNAKECPG_CONFIG_HPP_
