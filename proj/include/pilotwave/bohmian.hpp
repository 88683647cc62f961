#pragma once

// de Broglie-Bohm particle layer on top of the closed-form spinor fields:
// guidance velocity, local spin vector, RK4 trajectories and ensembles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "experiment_stats.hpp"
#include "physical_config.hpp"
#include "random.hpp"
#include "spinor_field.hpp"
#include "trajectory.hpp"

namespace pilotwave {

/// Densities below this fraction of the field's peak count as a node.
inline constexpr double kNodeDensityFloor = 1e-300;
/// Final z may move by at most this much when the step is halved.
inline constexpr double kStepHalvingTolerance = 1e-8;
/// Default number of RK4 steps from the magnet exit to the screen.
inline constexpr std::size_t kDefaultTrajectorySteps = 4000;

struct Velocity {
  double vx = 0.0;
  double vz = 0.0;
};

/// Local spin vector in J s; |s| = hbar / 2.
struct SpinVector {
  double sx = 0.0;
  double sy = 0.0;
  double sz = 0.0;
  double theta = 0.0;
  /// Azimuth in the convention of the Bloch parametrisation
  /// (cos(theta/2) e^{i phi/2}, sin(theta/2) e^{-i phi/2}).
  double phi = 0.0;
};

namespace detail {

inline void check_density(const SpinorField& field, double rho, const ParticleState& state) {
  if (!(rho >= kNodeDensityFloor * field.peak_density()))
    throw NodeRegionError("density " + std::to_string(rho) + " at z = " + std::to_string(state.z) +
                          " m, t = " + std::to_string(state.t) + " s is numerically zero");
}

}  // namespace detail

/// v = (hbar / m rho) Im(psi^dagger grad psi).
inline Velocity guidance_velocity(const SpinorField& field, const ParticleState& state) {
  const ProbabilityCurrent c = field.current(state.x, state.z, state.t);
  detail::check_density(field, c.rho, state);
  const double scale = field.config().hbar / (field.config().mass * c.rho);
  return {scale * c.jx, scale * c.jz};
}

/// s = (hbar / 2 rho) psi^dagger sigma psi at the particle position.
inline SpinVector spin_vector(const SpinorField& field, const ParticleState& state) {
  const Spinor psi = field.evaluate(state.x, state.z, state.t);
  const double rho = psi.density();
  detail::check_density(field, rho, state);
  const complex cross = std::conj(psi.plus) * psi.minus;
  const double half_hbar = field.config().hbar / 2.0;
  SpinVector s;
  s.sx = half_hbar * 2.0 * cross.real() / rho;
  s.sy = half_hbar * 2.0 * cross.imag() / rho;
  s.sz = half_hbar * (std::norm(psi.plus) - std::norm(psi.minus)) / rho;
  s.theta = std::atan2(std::hypot(s.sx, s.sy), s.sz);
  double phi = std::atan2(-s.sy, s.sx);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  s.phi = phi >= 2.0 * std::numbers::pi ? 0.0 : phi;
  return s;
}

/// Position at the magnet exit of the particle that entered at `z_entry`.
///
/// The flow through the magnet is one-dimensional in z and cannot reorder
/// particles, so it maps the entrance distribution N(0, sigma0) onto the exit
/// distribution (up/down packets at +-z_delta) quantile by quantile.
inline double field_exit_position(const SpinorField& post_field, double z_entry) {
  if (post_field.regime() != FieldRegime::PostField)
    throw std::invalid_argument("field_exit_position needs the post-field spinor");
  const double sigma = post_field.config().sigma0;
  const double offset = post_field.params().z_delta;
  const double up = post_field.up_weight(), down = post_field.down_weight();
  const double root2_sigma = std::numbers::sqrt2 * sigma;

  // Compare tails with erfc so that far-out particles keep full precision.
  const bool upper = z_entry > 0.0;
  const double target = 0.5 * std::erfc((upper ? z_entry : -z_entry) / root2_sigma);
  auto tail = [&](double z) {
    if (upper) return 0.5 * (up * std::erfc((z - offset) / root2_sigma) + down * std::erfc((z + offset) / root2_sigma));
    return 0.5 * (up * std::erfc(-(z - offset) / root2_sigma) + down * std::erfc(-(z + offset) / root2_sigma));
  };
  // Mixture of copies shifted by +-offset: the quantile lies within offset of z_entry.
  double lo = z_entry - offset, hi = z_entry + offset;
  if (offset == 0.0) return z_entry;
  for (int iter = 0; iter < 200 && lo < hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    // upper tail decreases with z, lower tail increases
    const bool go_right = upper ? tail(mid) > target : tail(mid) < target;
    (go_right ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct TrajectoryOptions {
  /// Record every `record_stride`-th step; the final step is always recorded.
  std::size_t record_stride = 1;
  bool verify_step_halving = true;
};

namespace detail {

struct Rk4Result {
  double x, z;
};

inline Rk4Result rk4_run(const SpinorField& field, const ParticleState& initial, double h, std::size_t steps,
                         std::size_t stride, std::vector<TrajectorySample>* record) {
  double x = initial.x, z = initial.z;
  auto velocity = [&](double px, double pz, double t) { return guidance_velocity(field, {px, pz, t}); };
  auto push = [&](std::size_t step, double vz) {
    const double t = initial.t + static_cast<double>(step) * h;
    const double theta = spin_vector(field, {x, z, t}).theta;
    record->push_back({t, x, z, vz, theta});
  };
  for (std::size_t step = 0; step < steps; ++step) {
    const double t = initial.t + static_cast<double>(step) * h;
    const Velocity k1 = velocity(x, z, t);
    if (record && step % stride == 0) push(step, k1.vz);
    const Velocity k2 = velocity(x + 0.5 * h * k1.vx, z + 0.5 * h * k1.vz, t + 0.5 * h);
    const Velocity k3 = velocity(x + 0.5 * h * k2.vx, z + 0.5 * h * k2.vz, t + 0.5 * h);
    const Velocity k4 = velocity(x + h * k3.vx, z + h * k3.vz, t + h);
    x += h / 6.0 * (k1.vx + 2.0 * k2.vx + 2.0 * k3.vx + k4.vx);
    z += h / 6.0 * (k1.vz + 2.0 * k2.vz + 2.0 * k3.vz + k4.vz);
  }
  if (record) {
    const double t_end = initial.t + static_cast<double>(steps) * h;
    push(steps, velocity(x, z, t_end).vz);
  }
  return {x, z};
}

}  // namespace detail

/// Fixed-step RK4 integration of the guidance equation. The step is shrunk
/// slightly if needed so that the last sample lands exactly on t_end. With
/// step-halving verification the run is repeated at dt/2 and the final z must
/// agree within kStepHalvingTolerance.
inline Trajectory integrate_trajectory(const SpinorField& field, const ParticleState& initial, double dt, double t_end,
                                       const TrajectoryOptions& options = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (!(t_end > initial.t)) throw std::invalid_argument("t_end must be later than the initial time");
  if (options.record_stride < 1) throw std::invalid_argument("record stride must be at least 1");
  const double span = t_end - initial.t;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
  const double h = span / static_cast<double>(steps);

  Trajectory traj;
  traj.source = field.angles();
  traj.x0 = initial.x;
  traj.z0 = initial.z;
  traj.samples.reserve(steps / options.record_stride + 2);
  const auto end = detail::rk4_run(field, initial, h, steps, options.record_stride, &traj.samples);

  if (options.verify_step_halving) {
    const auto fine = detail::rk4_run(field, initial, h / 2.0, 2 * steps, 1, nullptr);
    const double change = std::abs(fine.z - end.z);
    if (!(change < kStepHalvingTolerance))
      throw NonConvergedError("halving the step moved the final z by " + std::to_string(change) + " m");
  }
  return traj;
}

struct InitialPosition {
  double x = 0.0;
  double z = 0.0;
};

namespace detail {

inline InitialPosition draw_position(RandomStream& rng, double sigma) {
  const double x = sigma * rng.normal();
  const double z = sigma * rng.normal();
  return {x, z};
}

}  // namespace detail

/// Positions at the magnet entrance drawn from |psi_0|^2, one substream per index.
inline std::vector<InitialPosition> sample_initial_positions(std::size_t n, const PhysicalConfig& config,
                                                             std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one position");
  std::vector<InitialPosition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = RandomStream::substream(seed, i);
    out.push_back(detail::draw_position(rng, config.sigma0));
  }
  return out;
}

struct EnsembleOptions {
  std::size_t steps = kDefaultTrajectorySteps;
  std::size_t record_stride = 40;
  bool verify_step_halving = true;
};

/// Integrates n trajectories from the magnet exit to the screen and classifies
/// the impacts. Mixture members draw theta0 uniform on [0, pi) and phi0
/// uniform on [0, 2 pi) from their own substream after their position.
inline EnsembleResult run_ensemble(const BeamSource& source, std::size_t n, const PhysicalConfig& config,
                                   std::uint64_t seed, const EnsembleOptions& options = {}) {
  if (n < 1) throw std::invalid_argument("ensemble needs at least one trajectory");
  if (options.steps < 1) throw std::invalid_argument("ensemble needs at least one step");
  const auto params = derive_beam_params(config);
  // fail before doing any work when the spots would overlap
  (void)classify_impact(1.0, params, config);

  EnsembleResult result;
  result.source = source;
  result.seed = seed;
  if (const auto* pure = std::get_if<PureState>(&source)) result.born_expected = born_up_probability(pure->angles);
  result.trajectories.reserve(n);

  const double dt = params.t_screen / static_cast<double>(options.steps);
  const TrajectoryOptions traj_options{options.record_stride, options.verify_step_halving};
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = RandomStream::substream(seed, i);
    const auto pos = detail::draw_position(rng, config.sigma0);
    BlochAngles angles{0.0, 0.0};
    if (const auto* pure = std::get_if<PureState>(&source)) {
      angles = pure->angles;
    } else {
      const double theta0 = std::numbers::pi * rng.uniform();
      const double phi0 = 2.0 * std::numbers::pi * rng.uniform();
      angles = BlochAngles(theta0, phi0);
    }
    const auto field = post_field_spinor(angles, config, params);
    try {
      const ParticleState start{pos.x, field_exit_position(field, pos.z), 0.0};
      Trajectory traj = integrate_trajectory(field, start, dt, params.t_screen, traj_options);
      traj.x0 = pos.x;
      traj.z0 = pos.z;
      const auto impact = classify_impact(traj.final_sample().z, params, config);
      traj.outcome = impact.label;
      traj.tie = impact.tie;
      (impact.label == SpinOutcome::Up ? result.n_up : result.n_down) += 1;
      result.trajectories.push_back(std::move(traj));
    } catch (const std::exception& e) {
      throw TrajectoryError(i, e.what());
    }
  }
  result.fraction_up = static_cast<double>(result.n_up) / static_cast<double>(n);
  return result;
}

}  // namespace pilotwave
