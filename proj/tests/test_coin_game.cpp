#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <pilotwave/coin_game.hpp>

using namespace pilotwave;

namespace {

Vec3 tilted(double beta) { return {0.0, std::sin(beta), std::cos(beta)}; }

}  // namespace

TEST(Coin, SpinningCoinIsFair) {
  const ClapAxis axis(Vec3{1.0, 2.0, -2.0}.normalized());
  auto rng = RandomStream::substream(42, 0);
  int heads = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    const auto out = clap(CoinState::spinning(), axis, rng);
    heads += out.label == CoinFace::Heads;
    ASSERT_EQ(out.new_state.mode(), CoinMode::Oriented);
    const Vec3 o = *out.new_state.orientation();
    ASSERT_EQ(o, out.label == CoinFace::Heads ? axis.heads_direction() : -axis.heads_direction());
  }
  EXPECT_NEAR(static_cast<double>(heads) / trials, 0.5, 0.005);
}

TEST(Coin, AlignedClapRepeats) {
  auto rng = RandomStream::substream(1, 0);
  const auto out = clap(CoinState::oriented(unit_z), ClapAxis(unit_z), rng);
  EXPECT_EQ(out.label, CoinFace::Heads);
  EXPECT_EQ(*out.new_state.orientation(), unit_z);
}

TEST(Coin, PerpendicularClapIsFairAndStraightens) {
  auto rng = RandomStream::substream(2, 0);
  int heads = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    const auto out = clap(CoinState::oriented(unit_z), ClapAxis(unit_y), rng);
    heads += out.label == CoinFace::Heads;
    const Vec3 o = *out.new_state.orientation();
    ASSERT_TRUE(o == unit_y || o == -unit_y);
  }
  EXPECT_NEAR(static_cast<double>(heads) / trials, 0.5, 0.005);
}

TEST(Coin, FortyFiveDegreesIsDeterministic) {
  auto rng = RandomStream::substream(3, 0);
  const ClapAxis axis(tilted(std::numbers::pi / 4.0));
  for (int i = 0; i < 1000; ++i) {
    const auto out = clap(CoinState::oriented(unit_z), axis, rng);
    ASSERT_EQ(out.label, CoinFace::Heads);
    ASSERT_EQ(*out.new_state.orientation(), axis.heads_direction());
  }
  const auto down = clap(CoinState::oriented(-unit_z), axis, rng);
  EXPECT_EQ(down.label, CoinFace::Tails);
  EXPECT_EQ(*down.new_state.orientation(), -axis.heads_direction());
}

TEST(Coin, RejectsNonUnitVectors) {
  EXPECT_THROW(ClapAxis(Vec3{0.0, 0.0, 2.0}), std::invalid_argument);
  EXPECT_THROW((void)CoinState::oriented(Vec3{1.0, 1.0, 0.0}), std::invalid_argument);
  EXPECT_EQ(CoinState::spinning().mode(), CoinMode::Spinning);
  EXPECT_FALSE(CoinState::spinning().orientation().has_value());
}

TEST(CoinProtocol, SameAxisTwiceAgreesExactly) {
  const auto r = run_protocol(coin_preset("fig3"), 10000, 5);
  EXPECT_EQ(*r.steps[1].p_agree_prev, 1.0);
  EXPECT_EQ(r.joint_counts.count("HT"), 0u);
  EXPECT_EQ(r.joint_counts.count("TH"), 0u);
}

TEST(CoinProtocol, ReturningToFirstAxisIsFiftyFifty) {
  const auto r = run_protocol(coin_preset("fig5"), 10000, 7);
  ASSERT_EQ(r.steps.size(), 3u);
  EXPECT_NEAR(r.steps[2].p_agree_first, 0.5, 0.015);
  EXPECT_NEAR(*r.steps[1].angle_to_prev_deg, 90.0, 1e-12);
}

TEST(CoinProtocol, SingleTrialIsReproducible) {
  const auto a = run_protocol({ClapAxis(unit_z)}, 1, 99);
  const auto b = run_protocol({ClapAxis(unit_z)}, 1, 99);
  EXPECT_EQ(a.joint_counts, b.joint_counts);
  EXPECT_EQ(a.steps[0].p_heads, b.steps[0].p_heads);
}

TEST(CoinProtocol, DifferentSeedsDiffer) {
  const auto a = run_protocol(coin_preset("fig4"), 1000, 1);
  const auto b = run_protocol(coin_preset("fig4"), 1000, 2);
  EXPECT_NE(a.joint_counts, b.joint_counts);
}

TEST(CoinProtocol, JointCountsSumToTrials) {
  const auto r = run_protocol(coin_preset("fig5"), 2345, 3);
  std::uint64_t total = 0;
  for (const auto& [seq, count] : r.joint_counts) {
    EXPECT_EQ(seq.size(), 3u);
    total += count;
  }
  EXPECT_EQ(total, 2345u);
}

TEST(CoinProtocol, RejectsEmptyProtocol) {
  EXPECT_THROW((void)run_protocol({}, 10, 0), ProtocolError);
  EXPECT_THROW((void)run_protocol(coin_preset("fig2"), 0, 0), ProtocolError);
  EXPECT_THROW((void)coin_preset("fig6"), ProtocolError);
}

TEST(CoinProtocol, ParsesJsonSpecs) {
  const auto spec = protocol_from_json(nlohmann::json::parse(R"({"axes": ["z", "-y", [0, 1, 1]], "trials": 50, "seed": 4})"));
  ASSERT_EQ(spec.axes.size(), 3u);
  EXPECT_EQ(spec.axes[1].heads_direction(), -unit_y);
  EXPECT_NEAR(spec.axes[2].heads_direction().y, std::sqrt(0.5), 1e-15);
  EXPECT_EQ(spec.trials, 50u);
  EXPECT_EQ(spec.seed, 4u);
  EXPECT_THROW((void)protocol_from_json(nlohmann::json::parse(R"({"axes": []})")), ProtocolError);
  EXPECT_THROW((void)protocol_from_json(nlohmann::json::parse(R"({"axes": ["w"]})")), ProtocolError);
  EXPECT_THROW((void)protocol_from_json(nlohmann::json::parse(R"({"axes": [[0, 0, 0]]})")), ProtocolError);
  EXPECT_THROW((void)protocol_from_json(nlohmann::json::parse(R"({"steps": ["z"]})")), ProtocolError);
  EXPECT_THROW((void)protocol_from_json(nlohmann::json::parse(R"({"axes": ["z"], "trials": -3})")), ProtocolError);
}

TEST(ClassicalCurve, ThresholdRule) {
  EXPECT_EQ(classical_agreement(0.0), 1.0);
  EXPECT_EQ(classical_agreement(std::numbers::pi / 2.0), 0.5);
  EXPECT_EQ(classical_agreement(2.0 * std::numbers::pi / 3.0), 0.0);
  EXPECT_EQ(classical_agreement(std::numbers::pi / 4.0), 1.0);
  EXPECT_THROW((void)classical_agreement(-0.1), std::invalid_argument);
  EXPECT_THROW((void)classical_agreement(3.5), std::invalid_argument);
  const auto curve = classical_agreement_curve({0.0, 1.0, 2.0});
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_EQ(curve[2].second, 0.0);
}

TEST(ClassicalCurve, MatchesMonteCarlo) {
  for (double deg : {0.0, 30.0, 60.0, 90.0, 120.0, 150.0, 180.0}) {
    const double beta = deg * std::numbers::pi / 180.0;
    const auto r = run_protocol({ClapAxis(unit_z), ClapAxis(tilted(beta).normalized())}, 20000, 17);
    const double tol = deg == 90.0 ? 4.0 * std::sqrt(0.25 / 20000) : 0.0;
    EXPECT_NEAR(*r.steps[1].p_agree_prev, classical_agreement(beta), tol) << deg;
  }
}
