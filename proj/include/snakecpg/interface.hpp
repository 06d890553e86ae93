// What the trainer hands to an environment each control step, and what it
// gets back.

#ifndef SNAKECPG_INTERFACE_HPP_
#define SNAKECPG_INTERFACE_HPP_

#include <concepts>
#include <cstdint>
#include <optional>
#include <vector>

#include "snakecpg/cpg.hpp"

namespace snakecpg {

struct JointAction {
  std::vector<double> a1;                 // controller action
  std::optional<std::vector<double>> a2;  // regulator action, when triggered
  int option = 0;
  double k_f = 1.0;
  double option_code = 0.0;  // k_f / max option, echoed into the observation
  double beta = 0.0;
  cpg::CpgCommand command;   // composed tonic input and k_f
};

struct EnvStep {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminal = false;   // absorbing; no bootstrap
  bool truncated = false;  // time limit; bootstrap from observation
  // Trigger state at the new observation.
  bool event = false;
};

template <class E>
concept Environment = requires(E& e, const E& ce, std::uint64_t seed,
                               const JointAction& a) {
  { e.reset(seed) } -> std::convertible_to<std::vector<double>>;
  { e.step(a) } -> std::same_as<EnvStep>;
  { ce.event_active() } -> std::convertible_to<bool>;
};

}  // namespace snakecpg

#endif  // SNAKECPG_INTERFACE_HPP_
