// snakebench: train, evaluate and inspect snake policies.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "snakecpg/checkpoint.hpp"
#include "snakecpg/config.hpp"
#include "snakecpg/curve.hpp"
#include "snakecpg/export.hpp"
#include "snakecpg/pipeline.hpp"
#include "snakecpg/plot.hpp"

namespace fs = std::filesystem;
using namespace snakecpg;

namespace {

void write_file(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream o(p);
  if (!o) throw std::runtime_error("cannot write " + p.string());
  o << s;
}

config::Workbench load_config(const std::string& path) {
  return path.empty() ? config::Workbench{} : config::load(path);
}

checkpoint::Checkpoint make_checkpoint(const game::JointPolicy& j, const config::Workbench& wb,
                                       const std::string& role) {
  checkpoint::Checkpoint c;
  c.joint = j;
  c.config_digest = config::digest(wb);
  c.meta = {{"role", role}, {"direct_curvature", wb.task.direct_curvature}};
  return c;
}

// "untrained" stands for a freshly initialised controller.
checkpoint::Checkpoint load_policy(const std::string& path, const config::Workbench& wb,
                                   std::uint64_t seed) {
  if (path == "untrained") {
    checkpoint::Checkpoint c;
    c.joint.pi1 = policy::Network::random(
        bench::controller_spec(wb.hidden, wb.task.options.size()), game::splitmix64(seed ^ 0xC1));
    c.meta = {{"role", "untrained"}, {"direct_curvature", false}};
    return c;
  }
  return checkpoint::load(path);
}

bench::EvalConfig eval_config(const config::Workbench& wb, const checkpoint::Checkpoint& c) {
  bench::EvalConfig ec = wb.eval();
  ec.task.direct_curvature = c.meta.value("direct_curvature", false);
  return ec;
}

struct LogFile {
  std::ofstream out;
  explicit LogFile(const fs::path& p) : out(p) {
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << io::kLogHeader << "\n";
  }
  game::Logger logger() {
    return [this](const game::EpisodeLog& l) { out << io::log_line(l) << "\n" << std::flush; };
  }
};

int run_pretrain(const config::Workbench& wb0, const fs::path& out, std::uint64_t seed,
                 bool no_cpg) {
  config::Workbench wb = wb0;
  wb.task.direct_curvature = no_cpg;
  fs::create_directories(out);
  config::save(wb, (out / "config.json").string());
  LogFile log(out / "pretrain_log.csv");
  game::LearnResult r;
  const auto joint = bench::pretrain_free(wb.pretrain(), seed, log.logger(), &r);
  const std::string name = no_cpg ? "no_cpg.ckpt" : "pi1_0.ckpt";
  checkpoint::save(make_checkpoint(joint, wb, no_cpg ? "no-cpg" : "obstacle-free"),
                   (out / name).string());
  std::printf("pretrained %zu updates, final mean reward %.2f -> %s\n", r.updates, r.value,
              (out / name).c_str());
  return 0;
}

int run_train(const config::Workbench& wb, const fs::path& out, const std::string& pretrained,
              std::uint64_t seed) {
  fs::create_directories(out / "checkpoints");
  config::Workbench w = wb;
  w.game.seed = seed;
  config::save(w, (out / "config.json").string());
  game::JointPolicy base;
  if (pretrained.empty()) {
    LogFile plog(out / "pretrain_log.csv");
    base = bench::pretrain_free(w.pretrain(), seed, plog.logger());
    checkpoint::save(make_checkpoint(base, w, "obstacle-free"), (out / "pi1_0.ckpt").string());
  } else {
    base = checkpoint::load(pretrained).joint;
  }
  LogFile log(out / "train_log.csv");
  auto hook = [&](std::size_t i, const game::JointPolicy& j) {
    auto c = make_checkpoint(j, w, "obstacle-aware");
    c.meta["macro"] = i;
    checkpoint::save(c, (out / "checkpoints" / ("macro_" + std::to_string(i) + ".ckpt")).string());
  };
  const auto res = bench::train_joint(base.pi1, w.train(), log.logger(), hook);
  checkpoint::save(make_checkpoint(res.joint, w, "obstacle-aware"), (out / "joint.ckpt").string());
  log.out.close();

  std::ifstream lin(out / "train_log.csv");
  const auto entries = io::read_log(lin);
  std::string curve = "macro\tphase\tupdate\tmean_reward\n";
  for (const auto& p : curve::phases(entries)) {
    if (p.update_means.empty()) {
      curve += std::to_string(p.macro) + "\t" + p.name + "\t-\t" + io::fmt(p.mean, 3) + "\n";
      continue;
    }
    for (std::size_t u = 0; u < p.update_means.size(); ++u)
      curve += std::to_string(p.macro) + "\t" + p.name + "\t" + std::to_string(u) + "\t" +
               io::fmt(p.update_means[u], 3) + "\n";
  }
  write_file(out / "learning_curve.tsv", curve);
  std::cout << curve;
  std::printf("iterations %zu, converged %s\n", res.iterations, res.converged ? "yes" : "no");
  for (std::size_t i = 0; i < res.values.size(); ++i) std::printf("V^%zu = %.3f\n", i, res.values[i]);
  return 0;
}

int run_evaluate(const config::Workbench& wb, const std::string& ckpt, const std::string& name,
                 const std::string& out) {
  const auto c = load_policy(ckpt, wb, wb.eval_seed);
  const auto res = bench::evaluate(c.joint, eval_config(wb, c), wb.game);
  const std::string table = io::metrics_table({{name, res.aggregate}});
  std::cout << table;
  if (!out.empty()) {
    fs::create_directories(out);
    write_file(fs::path(out) / "metrics.tsv", table);
    write_file(fs::path(out) / "episodes.tsv", io::episode_table(res.episodes));
    config::save(wb, (fs::path(out) / "config.json").string());
  }
  return 0;
}

int run_compare(const config::Workbench& wb, const std::vector<std::string>& entries,
                const std::string& out) {
  std::vector<io::TableRow> rows;
  for (const auto& e : entries) {
    const auto eq = e.find('=');
    const std::string label = eq == std::string::npos ? e : e.substr(0, eq);
    const std::string path = eq == std::string::npos ? e : e.substr(eq + 1);
    const auto c = load_policy(path, wb, wb.eval_seed);
    rows.push_back({label, bench::evaluate(c.joint, eval_config(wb, c), wb.game).aggregate});
  }
  const std::string table = io::metrics_table(rows);
  std::cout << table;
  if (!out.empty()) {
    write_file(fs::path(out) / "compare.tsv", table);
    config::save(wb, (fs::path(out) / "config.json").string());
  }
  return 0;
}

int run_rollout(const config::Workbench& wb0, const std::string& ckpt, std::uint64_t seed,
                const std::string& maze, bool no_obstacles, const std::string& out) {
  config::Workbench wb = wb0;
  const auto c = load_policy(ckpt, wb, seed);
  bench::EvalConfig ec = eval_config(wb, c);
  ec.episodes = 1;
  ec.seed = seed;
  if (maze == "train") ec.maze = wb.train_maze;
  if (maze == "free") ec.maze = wb.free_field;
  if (no_obstacles) {
    ec.maze.rows = 0;
    ec.maze.cols = 0;
  }
  std::ostringstream dump;
  bench::evaluate(c.joint, ec, wb.game,
                  [&](std::size_t, const env::SnakeEnv& e, const game::Trajectory& tr) {
                    io::write_trajectory(dump, e, bench::episode_metrics(e, tr),
                                         game::splitmix64(seed));
                  });
  const std::string s = dump.str();
  std::cout << s.substr(0, s.find('\n') + 1);
  if (!out.empty()) write_file(out, s);
  return 0;
}

io::TrajectoryDump read_dump(const std::string& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p);
  return io::read_trajectory(in);
}

int run_plot(const std::vector<std::string>& paths, const std::string& log,
             const std::string& events, const fs::path& out) {
  fs::create_directories(out);
  if (!paths.empty()) {
    std::vector<io::TrajectoryDump> dumps;
    std::string table = "episode\tt\tx\ty\tpotential_reward\n";
    for (std::size_t k = 0; k < paths.size(); ++k) {
      dumps.push_back(read_dump(paths[k]));
      for (const auto& s : dumps.back().steps)
        table += std::to_string(k) + "\t" + io::fmt(s.time, 3) + "\t" +
                 io::fmt(s.head.position.x, 6) + "\t" + io::fmt(s.head.position.y, 6) + "\t" +
                 io::fmt(plot::shaping(s), 6) + "\n";
    }
    write_file(out / "paths.svg", plot::path_figure(dumps));
    write_file(out / "paths.tsv", table);
  }
  if (!log.empty()) {
    std::ifstream in(log);
    if (!in) throw std::runtime_error("cannot open " + log);
    const auto entries = io::read_log(in);
    std::string table = "index\tmacro\tphase\treward\n";
    for (std::size_t k = 0; k < entries.size(); ++k)
      table += std::to_string(k) + "\t" + std::to_string(entries[k].macro) + "\t" +
               entries[k].phase + "\t" + io::fmt(entries[k].reward, 3) + "\n";
    write_file(out / "learning_curve.svg", plot::learning_curve_figure(entries));
    write_file(out / "learning_curve_points.tsv", table);
  }
  if (!events.empty()) {
    const auto d = read_dump(events);
    std::string table = "t\tevent\tu1\tkf_inv_sqrt\tkappa1\tf1\n";
    for (const auto& s : d.steps)
      table += io::fmt(s.time, 3) + "\t" + (s.event ? "1" : "0") + "\t" +
               io::fmt(s.tonic_imbalance[0], 6) + "\t" + io::fmt(1.0 / std::sqrt(s.k_f), 6) +
               "\t" + io::fmt(s.kappa[0], 6) + "\t" + io::fmt(s.f[0], 6) + "\n";
    write_file(out / "events.svg", plot::event_figure(d));
    write_file(out / "events.tsv", table);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snake CPG workbench"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);

  std::uint64_t seed = 1;
  std::string out = "out";
  std::size_t updates = 0;
  bool no_cpg = false;
  auto* pre = app.add_subcommand("pretrain-free", "train the controller in an empty field");
  pre->add_option("--seed", seed);
  pre->add_option("--out", out, "output directory");
  pre->add_option("--updates", updates, "PPO updates (overrides config)");
  pre->add_flag("--no-cpg", no_cpg, "direct-curvature ablation without the oscillators");

  std::string pretrained;
  auto* train = app.add_subcommand("train", "fictitious play in the training maze");
  train->add_option("--seed", seed);
  train->add_option("--out", out, "output directory");
  train->add_option("--pretrained", pretrained, "controller checkpoint to start from")
      ->check(CLI::ExistingFile);
  train->add_option("--updates", updates, "pretraining updates when no checkpoint is given");

  std::string ckpt = "untrained", name = "policy", eval_out;
  std::size_t episodes = 0;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("evaluate", "test-maze metrics for one policy");
  eval->add_option("--checkpoint", ckpt, "checkpoint path or 'untrained'");
  eval->add_option("--episodes", episodes);
  auto* eval_seed_opt = eval->add_option("--seed", eval_seed);
  eval->add_option("--name", name, "row label");
  eval->add_option("--out", eval_out, "also write tables here");

  std::string maze = "test", traj_out;
  bool no_obstacles = false;
  auto* roll = app.add_subcommand("rollout", "one episode with full trajectory export");
  roll->add_option("--checkpoint", ckpt, "checkpoint path or 'untrained'");
  roll->add_option("--seed", seed);
  roll->add_option("--maze", maze)->check(CLI::IsMember({"test", "train", "free"}));
  roll->add_flag("--no-obstacles", no_obstacles);
  roll->add_option("--out", traj_out, "JSON-lines output file");

  std::vector<std::string> entries;
  std::string cmp_out;
  auto* cmp = app.add_subcommand("compare", "evaluate several policies into one table");
  cmp->add_option("--checkpoint", entries, "label=path (path may be 'untrained')")->required();
  cmp->add_option("--episodes", episodes);
  auto* cmp_seed_opt = cmp->add_option("--seed", eval_seed);
  cmp->add_option("--out", cmp_out);

  std::vector<std::string> traj;
  std::string log, events, plot_out = "plots";
  auto* pl = app.add_subcommand("plot", "SVG figures from exported records");
  pl->add_option("--trajectory", traj, "trajectory dumps for the path figure");
  pl->add_option("--log", log, "training log for the learning curve");
  pl->add_option("--events", events, "trajectory dump for the event traces");
  pl->add_option("--out", plot_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    config::Workbench wb = load_config(config_path);
    if (updates > 0) wb.pretrain_updates = updates;
    if (episodes > 0) wb.eval_episodes = episodes;
    if (*eval_seed_opt || *cmp_seed_opt) wb.eval_seed = eval_seed;
    wb.validate();
    if (*pre) return run_pretrain(wb, out, seed, no_cpg);
    if (*train) return run_train(wb, out, pretrained, seed);
    if (*eval) return run_evaluate(wb, ckpt, name, eval_out);
    if (*roll) return run_rollout(wb, ckpt, seed, maze, no_obstacles, traj_out);
    if (*cmp) return run_compare(wb, entries, cmp_out);
    if (*pl) return run_plot(traj, log, events, plot_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
