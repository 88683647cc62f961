#pragma once

// Heads or tails in zero gravity. A clap catches the coin between the palms:
// it straightens the coin along the clap axis but never flips it over.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "random.hpp"
#include "vec3.hpp"

namespace pilotwave {

/// Below this |c.a| the coin lies on its side relative to the clap axis.
inline constexpr double kCoinTieEpsilon = 1e-9;
inline constexpr double kUnitNormTolerance = 1e-12;

enum class CoinMode { Spinning, Oriented };
enum class CoinFace { Heads, Tails };

class CoinState {
 public:
  static CoinState spinning() noexcept { return CoinState(); }

  /// `heads_normal` must be a unit vector.
  static CoinState oriented(const Vec3& heads_normal) {
    if (std::abs(heads_normal.norm() - 1.0) > kUnitNormTolerance)
      throw std::invalid_argument("coin orientation must be a unit vector");
    return CoinState(heads_normal);
  }

  [[nodiscard]] CoinMode mode() const noexcept { return orientation_ ? CoinMode::Oriented : CoinMode::Spinning; }
  [[nodiscard]] const std::optional<Vec3>& orientation() const noexcept { return orientation_; }

 private:
  CoinState() = default;
  explicit CoinState(const Vec3& o) : orientation_(o) {}
  std::optional<Vec3> orientation_;
};

/// Outward normal of the right palm; the face resting on it wins as heads.
class ClapAxis {
 public:
  explicit ClapAxis(const Vec3& heads_direction) : heads_direction_(heads_direction) {
    if (std::abs(heads_direction.norm() - 1.0) > kUnitNormTolerance)
      throw std::invalid_argument("clap axis must be a unit vector");
  }
  [[nodiscard]] const Vec3& heads_direction() const noexcept { return heads_direction_; }

 private:
  Vec3 heads_direction_;
};

struct ClapOutcome {
  CoinFace label;
  CoinState new_state;
};

namespace detail {

inline Vec3 random_unit_vector(RandomStream& rng) {
  for (;;) {
    const Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    const double n = v.norm();
    if (n > 1e-12) return (1.0 / n) * v;
  }
}

}  // namespace detail

inline ClapOutcome clap(const CoinState& state, const ClapAxis& axis, RandomStream& rng) {
  const Vec3& a = axis.heads_direction();
  // A spinning coin has no predetermined orientation; it is caught at a random one.
  const Vec3 c = state.orientation() ? *state.orientation() : detail::random_unit_vector(rng);
  const double overlap = c.dot(a);
  bool heads;
  if (std::abs(overlap) <= kCoinTieEpsilon) {
    heads = rng.coin_flip();
  } else {
    heads = overlap > 0.0;
  }
  return {heads ? CoinFace::Heads : CoinFace::Tails, CoinState::oriented(heads ? a : -a)};
}

struct ProtocolStep {
  std::size_t step = 0;  // 1-based
  std::optional<double> angle_to_prev_deg;
  double p_heads = 0.0;
  std::optional<double> p_agree_prev;
  double p_agree_first = 1.0;
};

struct ProtocolResult {
  std::vector<ProtocolStep> steps;
  /// Outcome sequences such as "HTH" and how often each occurred.
  std::map<std::string, std::uint64_t> joint_counts;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Every trial starts from a spinning coin and claps along `axes` in order.
inline ProtocolResult run_protocol(const std::vector<ClapAxis>& axes, std::uint64_t trials, std::uint64_t seed) {
  if (axes.empty()) throw ProtocolError("protocol needs at least one clap axis");
  if (trials < 1) throw ProtocolError("protocol needs at least one trial");

  const std::size_t n_steps = axes.size();
  std::vector<std::uint64_t> heads(n_steps, 0), agree_prev(n_steps, 0), agree_first(n_steps, 0);
  ProtocolResult result;
  result.trials = trials;
  result.seed = seed;

  std::string sequence(n_steps, ' ');
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    auto rng = RandomStream::substream(seed, trial);
    CoinState state = CoinState::spinning();
    for (std::size_t s = 0; s < n_steps; ++s) {
      auto outcome = clap(state, axes[s], rng);
      const bool is_heads = outcome.label == CoinFace::Heads;
      sequence[s] = is_heads ? 'H' : 'T';
      heads[s] += is_heads;
      if (s > 0) agree_prev[s] += sequence[s] == sequence[s - 1];
      agree_first[s] += sequence[s] == sequence[0];
      state = std::move(outcome.new_state);
    }
    ++result.joint_counts[sequence];
  }

  const auto n = static_cast<double>(trials);
  for (std::size_t s = 0; s < n_steps; ++s) {
    ProtocolStep step;
    step.step = s + 1;
    step.p_heads = static_cast<double>(heads[s]) / n;
    step.p_agree_first = static_cast<double>(agree_first[s]) / n;
    if (s > 0) {
      step.angle_to_prev_deg =
          angle_between(axes[s].heads_direction(), axes[s - 1].heads_direction()) * 180.0 / std::numbers::pi;
      step.p_agree_prev = static_cast<double>(agree_prev[s]) / n;
    }
    result.steps.push_back(step);
  }
  return result;
}

/// Probability that a clap at angle `beta` from the previous clap repeats its label.
inline double classical_agreement(double beta) {
  if (!(beta >= 0.0 && beta <= std::numbers::pi)) throw std::invalid_argument("angle must lie in [0, pi]");
  const double c = std::cos(beta);
  if (std::abs(c) <= kCoinTieEpsilon) return 0.5;
  return c > 0.0 ? 1.0 : 0.0;
}

inline std::vector<std::pair<double, double>> classical_agreement_curve(const std::vector<double>& angles) {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(angles.size());
  for (double beta : angles) curve.emplace_back(beta, classical_agreement(beta));
  return curve;
}

/// Figure presets: fig2 single z clap, fig3 (z, z), fig4 (z, y), fig5 (z, y, z).
inline std::vector<ClapAxis> coin_preset(const std::string& name) {
  const ClapAxis z(unit_z), y(unit_y);
  if (name == "fig2") return {z};
  if (name == "fig3") return {z, z};
  if (name == "fig4") return {z, y};
  if (name == "fig5") return {z, y, z};
  throw ProtocolError("unknown coin preset '" + name + "' (expected fig2, fig3, fig4 or fig5)");
}

struct ProtocolSpec {
  std::vector<ClapAxis> axes;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
};

/// Axis from a name ("x", "y", "z", optionally prefixed by '-') or a JSON
/// 3-array. Arrays are normalised, so [0, 1, 1] means 45 degrees between y and z.
inline ClapAxis parse_clap_axis(const nlohmann::json& j) {
  if (j.is_string()) {
    std::string name = j.get<std::string>();
    double sign = 1.0;
    if (!name.empty() && (name[0] == '-' || name[0] == '+')) {
      sign = name[0] == '-' ? -1.0 : 1.0;
      name.erase(0, 1);
    }
    if (name == "x") return ClapAxis(sign * unit_x);
    if (name == "y") return ClapAxis(sign * unit_y);
    if (name == "z") return ClapAxis(sign * unit_z);
    throw ProtocolError("unknown axis name '" + j.get<std::string>() + "'");
  }
  if (j.is_array() && j.size() == 3 && j[0].is_number() && j[1].is_number() && j[2].is_number()) {
    const Vec3 v{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw ProtocolError("axis vector must be finite and non-zero");
    return ClapAxis(v.normalized());
  }
  throw ProtocolError("axis must be a name or a 3-element array, got " + j.dump());
}

/// {"axes": [...], "trials": N, "seed": S}; trials and seed are optional.
inline ProtocolSpec protocol_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("axes") || !j["axes"].is_array())
    throw ProtocolError("protocol must be an object with an 'axes' array");
  ProtocolSpec spec;
  for (const auto& a : j["axes"]) spec.axes.push_back(parse_clap_axis(a));
  if (spec.axes.empty()) throw ProtocolError("protocol needs at least one clap axis");
  if (j.contains("trials")) {
    if (!j["trials"].is_number_integer() || j["trials"].get<std::int64_t>() < 1)
      throw ProtocolError("trials must be a positive integer");
    spec.trials = j["trials"].get<std::uint64_t>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw ProtocolError("seed must be an integer");
    spec.seed = j["seed"].get<std::uint64_t>();
  }
  return spec;
}

inline nlohmann::json joint_counts_json(const ProtocolResult& r) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [seq, count] : r.joint_counts) counts[seq] = count;
  return {{"trials", r.trials}, {"seed", r.seed}, {"steps", r.steps.size()}, {"joint_counts", counts}};
}

}  // namespace pilotwave
