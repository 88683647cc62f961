#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <pilotwave/pauli_grid.hpp>

#include "oracles.hpp"

using namespace pilotwave;
using std::numbers::pi;

namespace {

// Few steps are enough: the k-space propagator is exact per step.
GridSpec quick_grid(const PhysicalConfig& config, std::size_t steps = 40) {
  auto spec = GridSpec::defaults_for(config);
  spec.steps = steps;
  return spec;
}

}  // namespace

TEST(Su2, ExponentialIsUnitaryAndMatchesSeries) {
  const Vec3 b{0.3, -1.2, 0.7};
  const double s = 0.9;
  const Mat2 m = su2_exponential(b, s);
  // m m^dagger = I
  const complex a00 = m[0] * std::conj(m[0]) + m[1] * std::conj(m[1]);
  const complex a01 = m[0] * std::conj(m[2]) + m[1] * std::conj(m[3]);
  EXPECT_NEAR(std::abs(a00 - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(a01), 0.0, 1e-14);
  // Taylor series of exp(-i s b.sigma)
  const complex i(0.0, 1.0);
  const std::array<complex, 4> h{complex(b.z), complex(b.x, -b.y), complex(b.x, b.y), complex(-b.z)};
  std::array<complex, 4> term{1.0, 0.0, 0.0, 1.0}, sum = term;
  for (int n = 1; n < 40; ++n) {
    std::array<complex, 4> next{};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        for (int k = 0; k < 2; ++k) next[2 * r + c] += term[2 * r + k] * h[2 * k + c];
    for (auto& v : next) v *= -i * s / static_cast<double>(n);
    term = next;
    for (int k = 0; k < 4; ++k) sum[k] += term[k];
  }
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(sum[k] - m[k]), 0.0, 1e-13);
  const Mat2 id = su2_exponential({0.0, 0.0, 0.0}, 3.0);
  EXPECT_EQ(id[0], complex(1.0));
  EXPECT_EQ(id[1], complex(0.0));
}

TEST(PauliGrid, DefaultConfigReproducesOffsetsAndVelocities) {
  const PhysicalConfig config;
  const auto params = derive_beam_params(config);
  const auto ev = evolve_in_field(initial_spinor({pi / 2.0, 0.0}, config), quick_grid(config));
  EXPECT_NEAR((ev.centroid_plus - ev.centroid_minus) / (2 * params.z_delta), 1.0, 1e-6);
  EXPECT_NEAR((ev.velocity_plus - ev.velocity_minus) / (2 * params.u), 1.0, 1e-6);
  EXPECT_NEAR(ev.centroid_plus, -ev.centroid_minus, 1e-12);
  EXPECT_LT(ev.total_norm_drift, 1e-6);
  EXPECT_LT(ev.boundary_mass, kBoundaryMassLimit);
  EXPECT_NEAR(ev.state.component_norm(true), 0.5, 1e-6);
  EXPECT_NEAR(ev.spread_plus / free_spread(config, params.dt_field), 1.0, 1e-6);
}

TEST(PauliGrid, LabFrameMatchesClosedFormAtExit) {
  const PhysicalConfig config;
  const auto params = derive_beam_params(config);
  const BlochAngles angles(pi / 3.0, 0.0);
  const auto ev = evolve_in_field(initial_spinor(angles, config), quick_grid(config));
  const auto exit = post_field_spinor(angles, config, params);
  // constant phases are a convention; densities and the ratio to the closed
  // form (hence the 1.8e9 rad/m phase gradient) are not
  const Spinor ref0 = exit.evaluate(ev.state.spec.x_at(128), ev.state.spec.z_at(128), 0.0);
  const Spinor grid0 = ev.state.lab_spinor(128, 128);
  const complex ratio_plus = grid0.plus / ref0.plus, ratio_minus = grid0.minus / ref0.minus;
  double worst_density = 0.0, worst_phase = 0.0;
  for (std::size_t i = 96; i <= 160; i += 8)
    for (std::size_t j = 96; j <= 160; j += 8) {
      const Spinor grid = ev.state.lab_spinor(i, j);
      const Spinor ref = exit.evaluate(ev.state.spec.x_at(i), ev.state.spec.z_at(j), 0.0);
      worst_density = std::max(worst_density, std::abs(std::norm(grid.plus) - std::norm(ref.plus)) / exit.peak_density());
      worst_density = std::max(worst_density, std::abs(std::norm(grid.minus) - std::norm(ref.minus)) / exit.peak_density());
      worst_phase = std::max(worst_phase, std::abs(std::arg(grid.plus / ref.plus / ratio_plus)));
      worst_phase = std::max(worst_phase, std::abs(std::arg(grid.minus / ref.minus / ratio_minus)));
    }
  EXPECT_LT(worst_density, 1e-6);
  EXPECT_LT(worst_phase, 1e-5);
}

TEST(PauliGrid, NoFieldMeansFreeSpreading) {
  // slow beam: the packet spreads to roughly sqrt(2) sigma0 inside the magnet
  PhysicalConfig config;
  config.b0 = 0.0;
  config.b0_grad = 0.0;
  config.v_beam = config.magnet_length * config.hbar / (2.0 * config.mass * config.sigma0 * config.sigma0);
  const auto params = derive_beam_params(config);
  GridSpec spec;
  spec.nx = spec.nz = 384;
  spec.extent_x = spec.extent_z = 20.0 * config.sigma0;
  spec.steps = 10;
  const auto ev = evolve_in_field(initial_spinor({pi / 2.0, 0.0}, config), spec);
  EXPECT_NEAR(ev.centroid_plus, 0.0, 1e-12);
  EXPECT_NEAR(ev.centroid_minus, 0.0, 1e-12);
  EXPECT_NEAR(ev.velocity_plus, 0.0, 1e-9);
  const double expected = oracle::beam(config.mass, config.mu_bohr, 0.0, config.magnet_length, config.free_path,
                                       config.v_beam).dt;
  EXPECT_DOUBLE_EQ(params.dt_field, expected);
  const double sigma_t =
      config.sigma0 * std::sqrt(1.0 + std::pow(config.hbar * expected / (2 * config.mass * 1e-8), 2));
  EXPECT_NEAR(sigma_t / config.sigma0, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ev.spread_plus / sigma_t, 1.0, 1e-6);
  EXPECT_LT(ev.total_norm_drift, 1e-6);
}

TEST(PauliGrid, NorthPoleStaysUp) {
  const PhysicalConfig config;
  const auto ev = evolve_in_field(initial_spinor({0.0, 0.0}, config), quick_grid(config));
  EXPECT_LT(ev.state.component_norm(false), 1e-8);
  EXPECT_EQ(ev.velocity_minus, 0.0);
  EXPECT_NEAR(ev.velocity_plus / derive_beam_params(config).u, 1.0, 1e-6);
}

TEST(PauliGrid, ZeroGradientGivesNoOffset) {
  PhysicalConfig config;
  config.b0_grad = 0.0;
  const auto ev = evolve_in_field(initial_spinor({pi / 2.0, 0.0}, config), quick_grid(config));
  EXPECT_NEAR(ev.centroid_plus, 0.0, 1e-12);
  EXPECT_NEAR(ev.velocity_plus - ev.velocity_minus, 0.0, 1e-9);
}

TEST(PauliGrid, RejectsBadGrids) {
  const PhysicalConfig config;
  const auto initial = initial_spinor({1.0, 0.0}, config);
  auto coarse = GridSpec::defaults_for(config);
  coarse.nx = coarse.nz = 32;
  EXPECT_THROW((void)evolve_in_field(initial, coarse), GridTooCoarseError);
  auto few = GridSpec::defaults_for(config);
  few.steps = 2;
  EXPECT_THROW((void)evolve_in_field(initial, few), UnstableStepError);
  auto fast = GridSpec::defaults_for(config);
  fast.steps = 3;
  PhysicalConfig strong = config;
  strong.b0_grad = 1e6;
  EXPECT_THROW((void)evolve_in_field(initial_spinor({1.0, 0.0}, strong), fast), UnstableStepError);
  auto empty = GridSpec::defaults_for(config);
  empty.extent_z = 0.0;
  EXPECT_THROW((void)evolve_in_field(initial, empty), GridTooCoarseError);
  const auto exit = post_field_spinor({1.0, 0.0}, config, derive_beam_params(config));
  EXPECT_THROW((void)evolve_in_field(exit, GridSpec::defaults_for(config)), std::invalid_argument);
}

TEST(PauliGrid, MarginalIntegratesToNorm) {
  const PhysicalConfig config;
  const auto ev = evolve_in_field(initial_spinor({2.0, 1.0}, config), quick_grid(config, 10));
  const auto rho = ev.state.z_marginal();
  double total = 0.0;
  for (double r : rho) total += r * ev.state.spec.dz();
  EXPECT_NEAR(total, ev.state.norm(), 1e-12);
  EXPECT_NEAR(total, 1.0, 1e-6);
}
