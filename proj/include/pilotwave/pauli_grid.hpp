#pragma once

// Spectral solver for the two-component Pauli equation on a periodic (x, z)
// grid, used as an independent check of the closed-form post-field packets.
//
// The magnet field is B = (B'x, 0, B0 - B'z). Dropping the transverse B'x
// term leaves the longitudinal Zeeman term mu_B (B0 - B'z) sigma_z, which is
// diagonal in spin. The solver works in its interaction picture:
//   psi(x, z, t) = exp(-i mu_B t (B_long(z) . sigma) / hbar) phi(x, z, t)
// where each component of phi is a slowly varying envelope obeying
//   i hbar d(phi_+-)/dt = (hbar^2 / 2m) (k +- kappa(t) e_z)^2 phi_+-,
// kappa(t) = mu_B B' t / hbar. At the paper's scale psi itself oscillates on a
// 4 nm wavelength, far below any practical grid spacing; phi does not.
// Each step applies the exact k-space propagator of that Hamiltonian over the
// step. lab_spinor() restores the factored-out 2x2 Zeeman propagator per node.

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "physical_config.hpp"
#include "spinor_field.hpp"
#include "vec3.hpp"

namespace pilotwave {

/// Row-major 2x2 complex matrix.
using Mat2 = std::array<complex, 4>;

/// exp(-i scale (b . sigma)) for a real field vector b.
inline Mat2 su2_exponential(const Vec3& b, double scale) {
  const double magnitude = b.norm();
  const double angle = scale * magnitude;
  const double c = std::cos(angle);
  if (magnitude == 0.0) return {complex(1.0), complex(0.0), complex(0.0), complex(1.0)};
  const double s = std::sin(angle) / magnitude;
  // exp(-i a n.sigma) = cos(a) I - i sin(a) n.sigma
  return {complex(c, -s * b.z), complex(-s * b.y, -s * b.x),  //
          complex(s * b.y, -s * b.x), complex(c, s * b.z)};
}

struct GridSpec {
  std::size_t nx = 256;
  std::size_t nz = 256;
  double extent_x = 0.0;  // m, full box width
  double extent_z = 0.0;  // m
  std::size_t steps = 2000;

  [[nodiscard]] double dx() const noexcept { return extent_x / static_cast<double>(nx); }
  [[nodiscard]] double dz() const noexcept { return extent_z / static_cast<double>(nz); }
  [[nodiscard]] double x_at(std::size_t i) const noexcept {
    return -extent_x / 2.0 + static_cast<double>(i) * dx();
  }
  [[nodiscard]] double z_at(std::size_t j) const noexcept {
    return -extent_z / 2.0 + static_cast<double>(j) * dz();
  }

  /// 14 sigma0 square box, 256 x 256 nodes, 2000 steps.
  static GridSpec defaults_for(const PhysicalConfig& config) {
    GridSpec spec;
    spec.extent_x = 14.0 * config.sigma0;
    spec.extent_z = 14.0 * config.sigma0;
    return spec;
  }
};

inline constexpr double kMinNodesPerSigma = 16.0;
/// Mass allowed within one sigma0 of the box edge.
inline constexpr double kBoundaryMassLimit = 1e-6;

/// Snapshot of the grid spinor. Values are the interaction-picture envelopes.
struct GridState {
  GridSpec spec;
  PhysicalConfig config;
  double time = 0.0;
  std::vector<complex> plus;   // index i * nz + j
  std::vector<complex> minus;

  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * spec.nz + j; }

  /// Spinor in the laboratory frame.
  [[nodiscard]] Spinor lab_spinor(std::size_t i, std::size_t j) const {
    const Mat2 u = su2_exponential(Vec3{0.0, 0.0, config.b0 - config.b0_grad * spec.z_at(j)},
                                   config.mu_bohr * time / config.hbar);
    const auto n = index(i, j);
    return {u[0] * plus[n] + u[1] * minus[n], u[2] * plus[n] + u[3] * minus[n]};
  }

  [[nodiscard]] double cell_area() const noexcept { return spec.dx() * spec.dz(); }

  [[nodiscard]] double component_norm(bool up) const {
    const auto& c = up ? plus : minus;
    double sum = 0.0;
    for (const auto& v : c) sum += std::norm(v);
    return sum * cell_area();
  }
  [[nodiscard]] double norm() const { return component_norm(true) + component_norm(false); }

  /// <z> of one component, normalised by that component's own mass.
  [[nodiscard]] double component_centroid_z(bool up) const {
    const auto& c = up ? plus : minus;
    double mass = 0.0, moment = 0.0;
    for (std::size_t i = 0; i < spec.nx; ++i)
      for (std::size_t j = 0; j < spec.nz; ++j) {
        const double w = std::norm(c[index(i, j)]);
        mass += w;
        moment += w * spec.z_at(j);
      }
    return moment / mass;
  }

  /// Standard deviation in z of one component's density.
  [[nodiscard]] double component_spread_z(bool up) const {
    const auto& c = up ? plus : minus;
    const double mean = component_centroid_z(up);
    double mass = 0.0, second = 0.0;
    for (std::size_t i = 0; i < spec.nx; ++i)
      for (std::size_t j = 0; j < spec.nz; ++j) {
        const double w = std::norm(c[index(i, j)]);
        const double d = spec.z_at(j) - mean;
        mass += w;
        second += w * d * d;
      }
    return std::sqrt(second / mass);
  }

  /// Total probability within `margin` of any edge of the box.
  [[nodiscard]] double boundary_mass(double margin) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < spec.nx; ++i)
      for (std::size_t j = 0; j < spec.nz; ++j) {
        const double x = spec.x_at(i), z = spec.z_at(j);
        const bool edge = x < -spec.extent_x / 2.0 + margin || x >= spec.extent_x / 2.0 - margin ||
                          z < -spec.extent_z / 2.0 + margin || z >= spec.extent_z / 2.0 - margin;
        if (edge) sum += std::norm(plus[index(i, j)]) + std::norm(minus[index(i, j)]);
      }
    return sum * cell_area();
  }

  /// z-marginal of the total density, per metre.
  [[nodiscard]] std::vector<double> z_marginal() const {
    std::vector<double> rho(spec.nz, 0.0);
    for (std::size_t i = 0; i < spec.nx; ++i)
      for (std::size_t j = 0; j < spec.nz; ++j)
        rho[j] += (std::norm(plus[index(i, j)]) + std::norm(minus[index(i, j)])) * spec.dx();
    return rho;
  }
};

struct FieldEvolution {
  GridState state;
  double initial_norm = 0.0;
  double max_step_norm_drift = 0.0;  // largest |norm change| over one step
  double total_norm_drift = 0.0;     // |final norm - initial norm|
  double boundary_mass = 0.0;        // final mass within sigma0 of the edge
  double centroid_plus = 0.0;        // m
  double centroid_minus = 0.0;       // m
  double velocity_plus = 0.0;        // m/s, d<z>/dt at the exit
  double velocity_minus = 0.0;       // m/s
  double spread_plus = 0.0;          // m
  double spread_minus = 0.0;         // m
};

namespace detail {

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
struct FftwPlanDestroy {
  void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};

/// Both spinor components in one FFTW buffer, transformed together.
class SpinorFft {
 public:
  SpinorFft(std::size_t nx, std::size_t nz) : nx_(nx), nz_(nz), cells_(nx * nz) {
    data_.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * 2 * cells_)));
    if (!data_) throw std::bad_alloc();
    const int dims[2] = {static_cast<int>(nx), static_cast<int>(nz)};
    const int dist = static_cast<int>(cells_);
    forward_.reset(fftw_plan_many_dft(2, dims, 2, data_.get(), nullptr, 1, dist, data_.get(), nullptr, 1, dist,
                                      FFTW_FORWARD, FFTW_ESTIMATE));
    backward_.reset(fftw_plan_many_dft(2, dims, 2, data_.get(), nullptr, 1, dist, data_.get(), nullptr, 1, dist,
                                       FFTW_BACKWARD, FFTW_ESTIMATE));
    if (!forward_ || !backward_) throw std::runtime_error("FFTW planning failed");
  }

  void forward() { fftw_execute(forward_.get()); }
  /// Inverse transform including the 1/N normalisation.
  void backward() {
    fftw_execute(backward_.get());
    const double scale = 1.0 / static_cast<double>(cells_);
    for (std::size_t n = 0; n < 2 * cells_; ++n) {
      data_.get()[n][0] *= scale;
      data_.get()[n][1] *= scale;
    }
  }

  complex* plus() noexcept { return reinterpret_cast<complex*>(data_.get()); }
  complex* minus() noexcept { return reinterpret_cast<complex*>(data_.get()) + cells_; }
  [[nodiscard]] std::size_t cells() const noexcept { return cells_; }

 private:
  std::size_t nx_, nz_, cells_;
  std::unique_ptr<fftw_complex, FftwFree> data_;
  std::unique_ptr<fftw_plan_s, FftwPlanDestroy> forward_;
  std::unique_ptr<fftw_plan_s, FftwPlanDestroy> backward_;
};

/// Angular wave number of FFT bin `n` on a grid of `count` nodes spaced `h`.
inline double fft_wave_number(std::size_t n, std::size_t count, double h) {
  const auto signed_n = n < (count + 1) / 2 ? static_cast<double>(n) : static_cast<double>(n) - static_cast<double>(count);
  return 2.0 * std::numbers::pi * signed_n / (static_cast<double>(count) * h);
}

inline double total_norm(const complex* plus, const complex* minus, std::size_t cells, double cell_area) {
  double sum = 0.0;
  for (std::size_t n = 0; n < cells; ++n) sum += std::norm(plus[n]) + std::norm(minus[n]);
  return sum * cell_area;
}

}  // namespace detail

/// Throws GridTooCoarseError / UnstableStepError when `spec` cannot carry the
/// crossing described by `config`.
inline void check_grid(const GridSpec& spec, const PhysicalConfig& config) {
  validate(config);
  if (spec.nx < 2 || spec.nz < 2 || !(spec.extent_x > 0.0) || !(spec.extent_z > 0.0))
    throw GridTooCoarseError("grid needs at least 2 nodes and a positive extent per axis");
  if (spec.steps < 3) throw UnstableStepError("need at least three time steps");
  const double per_sigma = std::min(config.sigma0 / spec.dx(), config.sigma0 / spec.dz());
  if (per_sigma < kMinNodesPerSigma)
    throw GridTooCoarseError("grid resolves sigma0 with " + std::to_string(per_sigma) + " nodes, need at least " +
                             std::to_string(kMinNodesPerSigma));

  // CFL-like bound: the packets may not move more than one cell per step.
  const auto params = derive_beam_params(config);
  const double dt = params.dt_field / static_cast<double>(spec.steps);
  const double cells_per_step = params.u * dt / spec.dz();
  if (cells_per_step > 1.0)
    throw UnstableStepError("packets move " + std::to_string(cells_per_step) + " cells per step; use more than " +
                            std::to_string(spec.steps) + " steps");
}

/// Propagates `initial` (an Initial-regime field) through the magnet to t = dt_field.
inline FieldEvolution evolve_in_field(const SpinorField& initial, const GridSpec& spec) {
  if (initial.regime() != FieldRegime::Initial)
    throw std::invalid_argument("evolve_in_field needs the spinor at the magnet entrance");
  const PhysicalConfig& config = initial.config();
  check_grid(spec, config);
  const auto params = derive_beam_params(config);

  const std::size_t nx = spec.nx, nz = spec.nz, cells = nx * nz;
  const double dt = params.dt_field / static_cast<double>(spec.steps);
  const double cell_area = spec.dx() * spec.dz();
  const double hbar_2m = config.hbar / (2.0 * config.mass);
  const double kick_rate = config.mu_bohr * config.b0_grad / config.hbar;  // d kappa / dt

  detail::SpinorFft fft(nx, nz);
  complex* up = fft.plus();
  complex* down = fft.minus();
  // At t = 0 the Zeeman propagator is the identity, so phi = psi.
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nz; ++j) {
      const Spinor s = initial.evaluate(spec.x_at(i), spec.z_at(j), 0.0);
      up[i * nz + j] = s.plus;
      down[i * nz + j] = s.minus;
    }

  std::vector<double> kx(nx), kz(nz);
  for (std::size_t i = 0; i < nx; ++i) kx[i] = detail::fft_wave_number(i, nx, spec.dx());
  for (std::size_t j = 0; j < nz; ++j) kz[j] = detail::fft_wave_number(j, nz, spec.dz());
  std::vector<complex> fx(nx), fz_up(nz), fz_down(nz);
  for (std::size_t i = 0; i < nx; ++i) fx[i] = std::polar(1.0, -hbar_2m * kx[i] * kx[i] * dt);

  // Exact propagator of (hbar^2/2m)(k_z +- g t)^2 over [t1, t2].
  auto step_factors = [&](double t1, double t2) {
    const double tau = t2 - t1;
    const double linear = kick_rate * (t2 * t2 - t1 * t1);
    const double constant = kick_rate * kick_rate * (t2 * t2 * t2 - t1 * t1 * t1) / 3.0;
    for (std::size_t j = 0; j < nz; ++j) {
      const double quad = kz[j] * kz[j] * tau + constant;
      fz_up[j] = std::polar(1.0, -hbar_2m * (quad + kz[j] * linear));
      fz_down[j] = std::polar(1.0, -hbar_2m * (quad - kz[j] * linear));
    }
  };

  auto centroids = [&] {
    double mu = 0.0, md = 0.0, zu = 0.0, zd = 0.0;
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < nz; ++j) {
        const double wu = std::norm(up[i * nz + j]), wd = std::norm(down[i * nz + j]);
        const double z = spec.z_at(j);
        mu += wu;
        md += wd;
        zu += wu * z;
        zd += wd * z;
      }
    return std::array<double, 2>{mu > 0.0 ? zu / mu : 0.0, md > 0.0 ? zd / md : 0.0};
  };

  FieldEvolution result;
  result.initial_norm = detail::total_norm(up, down, cells, cell_area);
  double previous = result.initial_norm;
  std::array<std::array<double, 2>, 3> history{};  // centroids at the last three steps

  for (std::size_t step = 0; step < spec.steps; ++step) {
    const double t1 = dt * static_cast<double>(step);
    const double t2 = step + 1 == spec.steps ? params.dt_field : dt * static_cast<double>(step + 1);
    step_factors(t1, t2);
    fft.forward();
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < nz; ++j) {
        up[i * nz + j] *= fx[i] * fz_up[j];
        down[i * nz + j] *= fx[i] * fz_down[j];
      }
    fft.backward();
    const double current = detail::total_norm(up, down, cells, cell_area);
    result.max_step_norm_drift = std::max(result.max_step_norm_drift, std::abs(current - previous));
    previous = current;
    if (step + 3 >= spec.steps) history[step + 3 - spec.steps] = centroids();
  }

  GridState& state = result.state;
  state.spec = spec;
  state.config = config;
  state.time = params.dt_field;
  state.plus.assign(up, up + cells);
  state.minus.assign(down, down + cells);

  result.total_norm_drift = std::abs(previous - result.initial_norm);
  result.boundary_mass = state.boundary_mass(config.sigma0);
  const bool has_up = state.component_norm(true) > 0.0;
  const bool has_down = state.component_norm(false) > 0.0;
  // one-sided three-point derivative, exact for uniformly accelerated centroids
  auto derivative = [&](int c) { return (3.0 * history[2][c] - 4.0 * history[1][c] + history[0][c]) / (2.0 * dt); };
  if (has_up) {
    result.centroid_plus = history[2][0];
    result.velocity_plus = derivative(0);
    result.spread_plus = state.component_spread_z(true);
  }
  if (has_down) {
    result.centroid_minus = history[2][1];
    result.velocity_minus = derivative(1);
    result.spread_minus = state.component_spread_z(false);
  }
  return result;
}

/// Free-particle Gaussian spreading: sigma(t) = sigma0 sqrt(1 + (hbar t / 2 m sigma0^2)^2).
inline double free_spread(const PhysicalConfig& config, double t) {
  const double r = config.hbar * t / (2.0 * config.mass * config.sigma0 * config.sigma0);
  return config.sigma0 * std::sqrt(1.0 + r * r);
}

}  // namespace pilotwave
