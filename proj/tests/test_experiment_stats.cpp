#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <pilotwave/bohmian.hpp>
#include <pilotwave/experiment_stats.hpp>

#include "oracles.hpp"

using namespace pilotwave;
using std::numbers::pi;

namespace {

const PhysicalConfig kConfig;
const DerivedBeamParams kParams = derive_beam_params(kConfig);

Trajectory synthetic(const std::vector<double>& z, BlochAngles source = {1.0, 0.0}) {
  Trajectory tr;
  tr.source = source;
  for (std::size_t k = 0; k < z.size(); ++k) tr.samples.push_back({static_cast<double>(k), 0.0, z[k], 0.0, 0.0});
  return tr;
}

}  // namespace

TEST(Classify, DefaultSeparationIsValid) {
  const double sep = screen_separation(kParams, kConfig);
  EXPECT_NEAR(sep, (1.03e-5 + 1.03 * 4e-4) / 1e-4, 0.01);
  EXPECT_GT(sep, kMinPacketSeparation);
  EXPECT_EQ(classify_impact(2e-4, kParams, kConfig).label, SpinOutcome::Up);
  EXPECT_EQ(classify_impact(-1e-9, kParams, kConfig).label, SpinOutcome::Down);
}

TEST(Classify, ZeroIsFlaggedTie) {
  const auto c = classify_impact(0.0, kParams, kConfig);
  EXPECT_EQ(c.label, SpinOutcome::Up);
  EXPECT_TRUE(c.tie);
  EXPECT_FALSE(classify_impact(1e-12, kParams, kConfig).tie);
}

TEST(Classify, WeakGradientCannotSeparate) {
  PhysicalConfig weak;
  weak.b0_grad = 10.0;
  const auto p = derive_beam_params(weak);
  EXPECT_NEAR(screen_separation(p, weak), 0.042, 0.001);
  EXPECT_THROW((void)classify_impact(2e-4, p, weak), PacketsNotSeparatedError);
}

TEST(Spots, ExactMatchHasZeroScore) {
  const auto s = spot_statistics(7500, 2500, 0.75);
  EXPECT_NEAR(*s.z_score, 0.0, 1e-12);
  EXPECT_TRUE(*s.pass);
  EXPECT_NEAR(s.stderr_up, std::sqrt(0.75 * 0.25 / 1e4), 1e-15);
}

TEST(Spots, FarOffIsFlagged) {
  const auto s = spot_statistics(5000, 5000, 0.75);
  EXPECT_NEAR(std::abs(*s.z_score), (0.75 - 0.5) / std::sqrt(0.75 * 0.25 / 1e4), 1e-9);
  EXPECT_NEAR(std::abs(*s.z_score), 57.7, 0.05);
  EXPECT_FALSE(*s.pass);
  EXPECT_EQ(to_json(s)["verdict"], "FAIL");
}

TEST(Spots, SingleImpactIsDegenerate) {
  const auto s = spot_statistics(1, 0, std::nullopt);
  EXPECT_TRUE(s.stderr_degenerate);
  EXPECT_FALSE(s.z_score.has_value());
  EXPECT_TRUE(to_json(s)["verdict"].is_null());
  EXPECT_THROW((void)spot_statistics(0, 0, 0.5), std::invalid_argument);
}

TEST(Spots, CertainOutcomes) {
  EXPECT_EQ(*spot_statistics(10, 0, 1.0).z_score, 0.0);
  EXPECT_FALSE(*spot_statistics(9, 1, 1.0).pass);
}

TEST(Crossings, IdenticalPairDoesNotCross) {
  const std::vector<Trajectory> t{synthetic({0, 1, 2, 3}), synthetic({0, 1, 2, 3})};
  EXPECT_EQ(crossing_check(t).crossings, 0u);
  EXPECT_EQ(crossing_check(t).pairs_checked, 1u);
}

TEST(Crossings, TouchingIsNotCrossing) {
  const std::vector<Trajectory> t{synthetic({0, 1, 1, 0}), synthetic({1, 1, 0, 1})};
  // differences: -1, 0, 1, -1 -> only the 1 -> -1 step is strict
  EXPECT_EQ(crossing_check(t).crossings, 1u);
}

TEST(Crossings, MatchesPairwiseOracle) {
  auto rng = RandomStream::substream(5, 0);
  std::vector<std::vector<double>> z(60, std::vector<double>(30));
  for (auto& row : z)
    for (auto& v : row) v = std::floor(rng.normal() * 3.0);  // many ties
  std::vector<Trajectory> t;
  for (const auto& row : z) t.push_back(synthetic(row));
  EXPECT_EQ(crossing_check(t).crossings, oracle::crossings(z));
}

TEST(Crossings, ViolationOnlyWithinOneSource) {
  std::vector<Trajectory> mixed{synthetic({0, 2}, {0.5, 0.0}), synthetic({1, 1}, {2.0, 0.0})};
  auto r = crossing_check(mixed);
  EXPECT_EQ(r.crossings, 1u);
  EXPECT_FALSE(r.pure_state_violation);
  std::vector<Trajectory> same{synthetic({0, 2}), synthetic({1, 1}), synthetic({5, 5}, {2.0, 0.0})};
  r = crossing_check(same);
  EXPECT_TRUE(r.pure_state_violation);
}

TEST(Crossings, RejectsMismatchedGrids) {
  std::vector<Trajectory> t{synthetic({0, 1, 2}), synthetic({0, 1})};
  EXPECT_THROW((void)crossing_check(t), std::invalid_argument);
  auto shifted = synthetic({0, 1});
  shifted.samples[1].t = 0.5;
  std::vector<Trajectory> u{synthetic({0, 1}), shifted};
  EXPECT_THROW((void)crossing_check(u), std::invalid_argument);
  EXPECT_EQ(crossing_check({}).crossings, 0u);
}

TEST(Crossings, PureEnsembleNeverCrosses) {
  const auto r = run_ensemble(PureState{{pi / 2.0, 0.0}}, 100, kConfig, 21, {4000, 40, false});
  const auto report = crossing_check(r.trajectories);
  EXPECT_EQ(report.crossings, 0u);
  EXPECT_FALSE(report.pure_state_violation);
}

TEST(Crossings, MixtureEnsembleCrosses) {
  const auto r = run_ensemble(Mixture{}, 100, kConfig, 21, {4000, 40, false});
  const auto report = crossing_check(r.trajectories);
  EXPECT_GE(report.crossings, 1u);
  EXPECT_FALSE(report.pure_state_violation);
}
