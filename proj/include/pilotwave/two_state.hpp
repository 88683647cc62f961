#pragma once

// Measurement-postulate predictions for a spin-1/2 pure state and for the
// beam's statistical mixture, and the sequential-agreement curve.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "random.hpp"

namespace pilotwave {

/// Polar angles of a pure spin state on the Bloch sphere.
class BlochAngles {
 public:
  BlochAngles(double theta0, double phi0) : theta0_(theta0), phi0_(phi0) {
    if (!(theta0 >= 0.0 && theta0 <= std::numbers::pi)) throw std::invalid_argument("theta0 must lie in [0, pi]");
    if (!(phi0 >= 0.0 && phi0 < 2.0 * std::numbers::pi)) throw std::invalid_argument("phi0 must lie in [0, 2 pi)");
  }
  [[nodiscard]] double theta0() const noexcept { return theta0_; }
  [[nodiscard]] double phi0() const noexcept { return phi0_; }
  friend bool operator==(const BlochAngles&, const BlochAngles&) = default;

 private:
  double theta0_;
  double phi0_;
};

inline double born_up_probability(const BlochAngles& angles) {
  const double c = std::cos(angles.theta0() / 2.0);
  return c * c;
}

inline double born_down_probability(const BlochAngles& angles) {
  const double s = std::sin(angles.theta0() / 2.0);
  return s * s;
}

/// (1/pi) * integral_0^pi cos^2(theta/2) dtheta. theta0 is uniform on [0, pi].
inline constexpr double kMixtureUpProbability = 0.5;

/// Average of cos^2(theta/2) over the given polar angles.
inline double mean_up_probability(std::span<const double> thetas) {
  if (thetas.empty()) throw std::invalid_argument("need at least one polar angle");
  double sum = 0.0;
  for (double t : thetas) {
    const double c = std::cos(t / 2.0);
    sum += c * c;
  }
  return sum / static_cast<double>(thetas.size());
}

/// Monte Carlo estimate of the mixture's up probability.
inline double mixture_up_probability(std::uint64_t theta_samples, RandomStream& rng) {
  if (theta_samples < 1) throw std::invalid_argument("need at least one sample");
  double sum = 0.0;
  for (std::uint64_t i = 0; i < theta_samples; ++i) {
    const double c = std::cos(std::numbers::pi * rng.uniform() / 2.0);
    sum += c * c;
  }
  return sum / static_cast<double>(theta_samples);
}

/// Probability that a second apparatus rotated by `beta` repeats the first result.
inline double quantum_agreement(double beta) {
  if (!(beta >= 0.0 && beta <= std::numbers::pi)) throw std::invalid_argument("angle must lie in [0, pi]");
  const double c = std::cos(beta / 2.0);
  return c * c;
}

inline std::vector<std::pair<double, double>> quantum_agreement_curve(const std::vector<double>& angles) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(angles.size());
  for (double beta : angles) curve.emplace_back(beta, quantum_agreement(beta));
  return curve;
}

}  // namespace pilotwave
