// Six trajectories of one pure state from the magnet exit to the screen.

#include <cstdio>
#include <cstdlib>
#include <numbers>

#include <pilotwave/bohmian.hpp>

int main(int argc, char** argv) {
  using namespace pilotwave;
  const double theta0_deg = argc > 1 ? std::atof(argv[1]) : 90.0;
  const PhysicalConfig config;
  const BlochAngles angles(theta0_deg * std::numbers::pi / 180.0, 0.0);
  const auto result = run_ensemble(PureState{angles}, 6, config, 3);
  const auto params = derive_beam_params(config);
  std::printf("theta0 = %g deg, screen at t = %g s\n", theta0_deg, params.t_screen);
  std::printf("%4s %14s %14s %10s %6s\n", "id", "z_entry [m]", "z_screen [m]", "theta", "spot");
  for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
    const auto& tr = result.trajectories[i];
    std::printf("%4zu %14.6e %14.6e %10.3e %6s\n", i, tr.z0, tr.final_sample().z, tr.final_sample().theta_spin,
                tr.outcome == SpinOutcome::Up ? "up" : "down");
  }
  const auto report = crossing_check(result.trajectories);
  std::printf("crossings: %llu\n", static_cast<unsigned long long>(report.crossings));
}
