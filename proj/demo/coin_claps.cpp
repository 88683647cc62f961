// Claps a spinning coin along z, then along axes tilted by beta from z, and
// compares the repeat frequency with the spin-1/2 expectation cos^2(beta/2).

#include <cmath>
#include <cstdio>
#include <numbers>

#include <pilotwave/coin_game.hpp>
#include <pilotwave/two_state.hpp>

int main() {
  using namespace pilotwave;
  std::printf("%8s %12s %12s %12s\n", "beta", "coin", "classical", "quantum");
  for (int deg = 0; deg <= 180; deg += 15) {
    const double beta = deg * std::numbers::pi / 180.0;
    const ClapAxis first(unit_z), second(Vec3{0.0, std::sin(beta), std::cos(beta)});
    const auto r = run_protocol({first, second}, 20000, 11);
    std::printf("%8d %12.4f %12.4f %12.4f\n", deg, *r.steps[1].p_agree_prev, classical_agreement(beta),
                quantum_agreement(beta));
  }
}
