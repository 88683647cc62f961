#pragma once

// Closed-form Pauli spinor wave packets in the (x, z) plane: the spinor at the
// magnet entrance and the split packets in free flight after the magnet.
//
// Amplitudes carry exp(-(.)^2 / (4 sigma0^2)) in both regimes so that the
// densities are unit-mass Gaussians of standard deviation sigma0.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "physical_config.hpp"
#include "two_state.hpp"

namespace pilotwave {

using complex = std::complex<double>;

struct Spinor {
  complex plus;
  complex minus;

  [[nodiscard]] double density() const noexcept { return std::norm(plus) + std::norm(minus); }
};

/// Density and Im(psi^dagger grad psi) at one point.
struct ProbabilityCurrent {
  double rho = 0.0;
  double jx = 0.0;
  double jz = 0.0;
};

/// Spinor value and its spatial gradient at one point.
struct SpinorJet {
  Spinor value;
  Spinor d_dx;
  Spinor d_dz;
};

enum class FieldRegime { Initial, PostField };

/// Normalised Gaussian density of standard deviation `sigma`.
inline double gaussian_density(double offset, double sigma) {
  return std::exp(-offset * offset / (2.0 * sigma * sigma)) / (std::sqrt(2.0 * std::numbers::pi) * sigma);
}

class SpinorField {
 public:
  /// Spinor at the magnet entrance (t = 0).
  static SpinorField initial(const BlochAngles& angles, const PhysicalConfig& config) {
    return SpinorField(FieldRegime::Initial, angles, config, derive_beam_params(config));
  }

  /// Spinor in free flight; t counts from the magnet exit.
  static SpinorField post_field(const BlochAngles& angles, const PhysicalConfig& config,
                                const DerivedBeamParams& params) {
    validate(config);
    return SpinorField(FieldRegime::PostField, angles, config, params);
  }

  [[nodiscard]] FieldRegime regime() const noexcept { return regime_; }
  [[nodiscard]] const BlochAngles& angles() const noexcept { return angles_; }
  [[nodiscard]] const PhysicalConfig& config() const noexcept { return config_; }
  [[nodiscard]] const DerivedBeamParams& params() const noexcept { return params_; }

  /// |cos(theta0/2)|^2 and |sin(theta0/2)|^2, the masses of the two packets.
  [[nodiscard]] double up_weight() const noexcept { return cos_half_ * cos_half_; }
  [[nodiscard]] double down_weight() const noexcept { return sin_half_ * sin_half_; }

  /// z-centre of the up packet; the down packet sits at the mirror image.
  [[nodiscard]] double packet_offset(double t) const {
    check_time(t);
    return regime_ == FieldRegime::Initial ? 0.0 : params_.z_delta + params_.u * t;
  }

  /// Wave number m u / hbar imprinted on the packets by the gradient.
  [[nodiscard]] double wave_number() const noexcept {
    return regime_ == FieldRegime::Initial ? 0.0 : config_.mass * params_.u / config_.hbar;
  }

  /// Upper bound of the density over the plane.
  [[nodiscard]] double peak_density() const noexcept {
    return 1.0 / (2.0 * std::numbers::pi * config_.sigma0 * config_.sigma0);
  }

  [[nodiscard]] Spinor evaluate(double x, double z, double t) const { return jet(x, z, t).value; }

  /// Same quantities as Im(psi^dagger grad psi) from jet(), without forming the
  /// phase factors: the Gaussian envelopes are real, so only the plane-wave
  /// phases +-k z contribute.
  [[nodiscard]] ProbabilityCurrent current(double x, double z, double t) const {
    check_time(t);
    const double s2 = config_.sigma0 * config_.sigma0;
    const double envelope_x = std::exp(-x * x / (2.0 * s2)) / (2.0 * std::numbers::pi * s2);
    if (regime_ == FieldRegime::Initial) return {envelope_x * std::exp(-z * z / (2.0 * s2)), 0.0, 0.0};
    const double a = params_.z_delta + params_.u * t;
    const double zp = z - a, zm = z + a;
    const double w_up = envelope_x * up_weight() * std::exp(-zp * zp / (2.0 * s2));
    const double w_down = envelope_x * down_weight() * std::exp(-zm * zm / (2.0 * s2));
    return {w_up + w_down, 0.0, wave_number() * (w_up - w_down)};
  }

  [[nodiscard]] SpinorJet jet(double x, double z, double t) const {
    check_time(t);
    const double s2 = config_.sigma0 * config_.sigma0;
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * s2);
    const double gx = std::exp(-x * x / (4.0 * s2));
    const double half_phi = angles_.phi0() / 2.0;

    SpinorJet j;
    if (regime_ == FieldRegime::Initial) {
      const double envelope = norm * gx * std::exp(-z * z / (4.0 * s2));
      j.value.plus = std::polar(envelope * cos_half_, half_phi);
      j.value.minus = std::polar(envelope * sin_half_, -half_phi);
      const double dz = -z / (2.0 * s2);
      j.d_dz = {j.value.plus * dz, j.value.minus * dz};
    } else {
      const double a = params_.z_delta + params_.u * t;
      const double k = wave_number();
      const double zp = z - a;
      const double zm = z + a;
      const double amp_p = norm * gx * cos_half_ * std::exp(-zp * zp / (4.0 * s2));
      const double amp_m = norm * gx * sin_half_ * std::exp(-zm * zm / (4.0 * s2));
      j.value.plus = std::polar(amp_p, k * z + config_.phi_plus + half_phi);
      j.value.minus = complex(0.0, 1.0) * std::polar(amp_m, -k * z + config_.phi_minus - half_phi);
      j.d_dz.plus = j.value.plus * complex(-zp / (2.0 * s2), k);
      j.d_dz.minus = j.value.minus * complex(-zm / (2.0 * s2), -k);
    }
    const double dx = -x / (2.0 * s2);
    j.d_dx = {j.value.plus * dx, j.value.minus * dx};
    return j;
  }

 private:
  SpinorField(FieldRegime regime, const BlochAngles& angles, const PhysicalConfig& config,
              const DerivedBeamParams& params)
      : regime_(regime),
        angles_(angles),
        config_(config),
        params_(params),
        cos_half_(std::cos(angles.theta0() / 2.0)),
        sin_half_(std::sin(angles.theta0() / 2.0)) {}

  void check_time(double t) const {
    if (regime_ == FieldRegime::Initial && t != 0.0)
      throw std::invalid_argument("initial spinor is only defined at t = 0");
    if (regime_ == FieldRegime::PostField && !(t >= 0.0))
      throw std::invalid_argument("post-field time must be non-negative");
  }

  FieldRegime regime_;
  BlochAngles angles_;
  PhysicalConfig config_;
  DerivedBeamParams params_;
  double cos_half_;
  double sin_half_;
};

inline SpinorField initial_spinor(const BlochAngles& angles, const PhysicalConfig& config) {
  return SpinorField::initial(angles, config);
}

inline SpinorField post_field_spinor(const BlochAngles& angles, const PhysicalConfig& config,
                                     const DerivedBeamParams& params) {
  return SpinorField::post_field(angles, config, params);
}

/// rho(z, t) with x integrated out, per metre.
inline double pure_density(const SpinorField& field, double z, double t) {
  const double a = field.packet_offset(t);
  const double sigma = field.config().sigma0;
  return field.up_weight() * gaussian_density(z - a, sigma) + field.down_weight() * gaussian_density(z + a, sigma);
}

/// Density of the beam's mixture of pure states, t counted from the magnet exit.
/// Mirror-symmetric in z bit for bit.
inline double mixture_density(const PhysicalConfig& config, const DerivedBeamParams& params, double z, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("post-field time must be non-negative");
  const double a = params.z_delta + params.u * t;
  const double lo = gaussian_density(z - a, config.sigma0);
  const double hi = gaussian_density(z + a, config.sigma0);
  return 0.5 * (lo + hi);
}

}  // namespace pilotwave
