#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "two_state.hpp"

namespace pilotwave {

struct ParticleState {
  double x = 0.0;  // m
  double z = 0.0;  // m
  double t = 0.0;  // s
};

/// Screen spot: Up is the +hbar/2 eigenvalue of S_z.
enum class SpinOutcome { Up, Down };

struct TrajectorySample {
  double t = 0.0;  // s after the magnet exit
  double x = 0.0;
  double z = 0.0;
  double vz = 0.0;
  double theta_spin = 0.0;  // rad, polar angle of the local spin vector
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double x0 = 0.0;  // position at the magnet entrance
  double z0 = 0.0;
  BlochAngles source{0.0, 0.0};
  std::optional<SpinOutcome> outcome;
  bool tie = false;  // landed exactly on z = 0

  [[nodiscard]] const TrajectorySample& final_sample() const { return samples.back(); }
};

}  // namespace pilotwave
