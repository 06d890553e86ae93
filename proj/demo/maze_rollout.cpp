// Open-loop gait through the test maze with a constant, balanced tonic
// input. Prints the head track once a second.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "snakecpg/task.hpp"

using namespace snakecpg;

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  env::TaskConfig cfg;
  cfg.max_time = 60.0;
  env::SnakeEnv e(cfg, bench::test_maze());
  e.reset(seed);
  std::printf("goal (%.3f, %.3f), %zu obstacles\n", e.scenario().goal.x, e.scenario().goal.y,
              e.scenario().obstacles.size());
  std::printf("t\tx\ty\tevent\tjammed\treward\n");
  double total = 0.0;
  for (int k = 0;; ++k) {
    JointAction a;
    a.a1.assign(kNumLinks, 0.0);
    a.k_f = 1.0;
    a.command = {cpg::TonicInput::uniform(0.5, 0.5), 1.0};
    const auto s = e.step(a);
    total += s.reward;
    const auto& r = e.records().back();
    if (k % 20 == 19 || s.terminal || s.truncated)
      std::printf("%.2f\t%.4f\t%.4f\t%d\t%d\t%.3f\n", r.time, r.head.position.x,
                  r.head.position.y, r.event ? 1 : 0, r.jammed ? 1 : 0, total);
    if (s.terminal || s.truncated) break;
  }
  std::printf("status %s, jam time %.2f s\n", std::string(env::to_string(e.status())).c_str(), e.jam_time());
}
