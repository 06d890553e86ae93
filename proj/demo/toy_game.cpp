// Fictitious play on the 2x2 coordination game. Both players start near
// uniform; the profile settles on the only cell paying 1.

#include <cstdio>
#include <cstdlib>

#include "snakecpg/toy.hpp"

using namespace snakecpg;

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  auto env = toy::MatrixGameEnv::coordination();
  auto joint = toy::matrix_game_players(seed);
  auto [r0, c0] = toy::matrix_game_marginals(joint);
  std::printf("start: P(row 1) %.3f  P(col 1) %.3f\n", r0, c0);
  const auto res = game::fictitious_play(
      env, joint, toy::matrix_game_config(seed), {},
      [](std::size_t i, const game::JointPolicy& j) {
        const auto [r, c] = toy::matrix_game_marginals(j);
        std::printf("macro %zu: P(row 1) %.3f  P(col 1) %.3f\n", i, r, c);
      });
  for (std::size_t i = 0; i < res.values.size(); ++i) std::printf("V^%zu = %.4f\n", i, res.values[i]);
  std::printf("%s after %zu iterations\n", res.converged ? "converged" : "stopped", res.iterations);
}
