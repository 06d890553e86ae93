// Oscillator response to the two steering knobs: tonic imbalance shifts the
// bias of psi, K_f slows the rhythm.

#include <cmath>
#include <cstdio>
#include <vector>

#include "snakecpg/cpg.hpp"
#include "snakecpg/signal.hpp"

using namespace snakecpg;

namespace {

std::vector<double> trace(const cpg::CpgCommand& cmd, double settle, double measure) {
  const auto p = cpg::default_params();
  const double dt = 1e-3;
  auto s = cpg::OscillatorNetworkState::kicked(p.n);
  std::vector<double> out;
  const auto n0 = static_cast<int>(settle / dt), n1 = static_cast<int>(measure / dt);
  for (int k = 0; k < n0 + n1; ++k) {
    s = cpg::step_network(s, p, cmd, dt);
    if (k >= n0) out.push_back(cpg::network_output(s)[0]);
  }
  return out;
}

}  // namespace

int main() {
  std::printf("K_f\tfreq_hz\tamplitude\tf*sqrt(K_f)\n");
  for (double kf : {0.5, 1.0, 2.0, 4.0}) {
    const auto psi = trace({cpg::TonicInput::uniform(0.5, 0.5), kf}, 10, 20);
    const double f = cpg::measure_frequency(psi, 1e-3);
    std::printf("%.1f\t%.4f\t%.4f\t%.4f\n", kf, f, cpg::half_amplitude(psi), f * std::sqrt(kf));
  }
  std::printf("\ndu\tbias\n");
  for (int k = -4; k <= 4; ++k) {
    const double du = 0.1 * k;
    const auto psi = trace({cpg::TonicInput::uniform(0.5 + du / 2, 0.5 - du / 2), 1.0}, 10, 10);
    std::printf("%+.1f\t%+.5f\n", du, cpg::measure_bias(psi).bias);
  }
}
