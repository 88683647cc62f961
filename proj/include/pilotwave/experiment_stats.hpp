#pragma once

// Impact classification on the screen, spot statistics against the Born
// prediction, and trajectory crossing checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "physical_config.hpp"
#include "trajectory.hpp"

namespace pilotwave {

/// Classification needs the packet centres this many sigma0 from the axis.
inline constexpr double kMinPacketSeparation = 3.0;
/// Spot fractions more than this many standard errors from Born fail.
inline constexpr double kBornZScoreLimit = 4.0;

struct PureState {
  BlochAngles angles;
};
struct Mixture {};
using BeamSource = std::variant<PureState, Mixture>;

inline nlohmann::json to_json(const BeamSource& source) {
  if (const auto* pure = std::get_if<PureState>(&source))
    return {{"kind", "pure"}, {"theta0", pure->angles.theta0()}, {"phi0", pure->angles.phi0()}};
  return {{"kind", "mixture"}};
}

struct EnsembleResult {
  std::vector<Trajectory> trajectories;
  std::uint64_t n_up = 0;
  std::uint64_t n_down = 0;
  double fraction_up = 0.0;
  std::optional<double> born_expected;  // absent for a mixture
  BeamSource source = Mixture{};
  std::uint64_t seed = 0;
};

struct ImpactClass {
  SpinOutcome label;
  bool tie;
};

/// Packet-centre distance from the axis at the screen, in units of sigma0.
inline double screen_separation(const DerivedBeamParams& params, const PhysicalConfig& config) {
  return (params.z_delta + params.u * params.t_screen) / config.sigma0;
}

/// Sign of z decides the spot; z = 0 goes Up and is flagged.
inline ImpactClass classify_impact(double z_screen, const DerivedBeamParams& params, const PhysicalConfig& config) {
  const double separation = screen_separation(params, config);
  if (separation < kMinPacketSeparation)
    throw PacketsNotSeparatedError("packets are " + std::to_string(separation) + " sigma0 from the axis at the screen, need " +
                                   std::to_string(kMinPacketSeparation));
  if (z_screen == 0.0) return {SpinOutcome::Up, true};
  return {z_screen > 0.0 ? SpinOutcome::Up : SpinOutcome::Down, false};
}

struct SpotSummary {
  std::uint64_t n = 0;
  std::uint64_t n_up = 0;
  std::uint64_t n_down = 0;
  double fraction_up = 0.0;
  double fraction_down = 0.0;
  double stderr_up = 0.0;  // sqrt(f (1 - f) / n)
  bool stderr_degenerate = false;
  std::optional<double> expected;
  std::optional<double> z_score;  // (f - p) / sqrt(p (1 - p) / n)
  std::optional<bool> pass;
};

inline SpotSummary spot_statistics(std::uint64_t n_up, std::uint64_t n_down, std::optional<double> expected) {
  SpotSummary s;
  s.n = n_up + n_down;
  if (s.n < 1) throw std::invalid_argument("spot statistics need at least one impact");
  s.n_up = n_up;
  s.n_down = n_down;
  const auto n = static_cast<double>(s.n);
  s.fraction_up = static_cast<double>(n_up) / n;
  s.fraction_down = static_cast<double>(n_down) / n;
  s.stderr_up = std::sqrt(s.fraction_up * s.fraction_down / n);
  s.stderr_degenerate = s.n < 2;
  if (expected) {
    s.expected = expected;
    const double p = *expected;
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    const double diff = s.fraction_up - p;
    if (sigma > 0.0) {
      s.z_score = diff / sigma;
    } else {
      s.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    s.pass = std::abs(*s.z_score) <= kBornZScoreLimit;
  }
  return s;
}

inline SpotSummary spot_statistics(const EnsembleResult& result) {
  return spot_statistics(result.n_up, result.n_down, result.born_expected);
}

inline nlohmann::json to_json(const SpotSummary& s) {
  nlohmann::json j{{"n", s.n},
                   {"n_up", s.n_up},
                   {"n_down", s.n_down},
                   {"fraction_up", s.fraction_up},
                   {"fraction_down", s.fraction_down},
                   {"binomial_stderr", s.stderr_up},
                   {"stderr_degenerate", s.stderr_degenerate}};
  j["born_expected"] = s.expected ? nlohmann::json(*s.expected) : nlohmann::json(nullptr);
  j["z_score"] = s.z_score && std::isfinite(*s.z_score) ? nlohmann::json(*s.z_score) : nlohmann::json(nullptr);
  j["verdict"] = s.pass ? nlohmann::json(*s.pass ? "PASS" : "FAIL") : nlohmann::json(nullptr);
  return j;
}

struct CrossingReport {
  std::uint64_t pairs_checked = 0;
  std::uint64_t crossings = 0;
  bool pure_state_violation = false;
};

namespace detail {

/// Pairs (i < j) with z_k[i] < z_k[j] and z_next[i] > z_next[j] plus those
/// with the inequalities the other way round, i.e. strict order flips.
inline std::uint64_t count_order_flips(std::vector<std::pair<double, double>> zz) {
  // sort by position before; for equal positions, by position after, so that
  // tied pairs never register as flips
  std::sort(zz.begin(), zz.end());
  std::vector<double> after(zz.size()), buffer(zz.size());
  for (std::size_t i = 0; i < zz.size(); ++i) after[i] = zz[i].second;
  // tied "before" values were already excluded above; count strict inversions of "after"
  std::uint64_t flips = 0;
  for (std::size_t width = 1; width < after.size(); width *= 2) {
    for (std::size_t lo = 0; lo + width < after.size(); lo += 2 * width) {
      const std::size_t mid = lo + width, hi = std::min(lo + 2 * width, after.size());
      std::size_t a = lo, b = mid, out = lo;
      while (a < mid && b < hi) {
        if (after[b] < after[a]) {
          flips += mid - a;
          buffer[out++] = after[b++];
        } else {
          buffer[out++] = after[a++];
        }
      }
      while (a < mid) buffer[out++] = after[a++];
      while (b < hi) buffer[out++] = after[b++];
      std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(lo), buffer.begin() + static_cast<std::ptrdiff_t>(hi),
                after.begin() + static_cast<std::ptrdiff_t>(lo));
    }
  }
  return flips;
}

inline std::uint64_t count_crossings(std::span<const Trajectory> trajectories, std::span<const std::size_t> members) {
  std::uint64_t total = 0;
  if (members.size() < 2) return 0;
  const std::size_t samples = trajectories[members[0]].samples.size();
  std::vector<std::pair<double, double>> zz(members.size());
  for (std::size_t k = 0; k + 1 < samples; ++k) {
    for (std::size_t m = 0; m < members.size(); ++m) {
      const auto& s = trajectories[members[m]].samples;
      zz[m] = {s[k].z, s[k + 1].z};
    }
    total += count_order_flips(zz);
  }
  return total;
}

}  // namespace detail

/// Counts strict sign changes of z_a - z_b between consecutive shared samples
/// over all pairs. A crossing between two trajectories of the same pure state
/// is a violation.
inline CrossingReport crossing_check(std::span<const Trajectory> trajectories) {
  CrossingReport report;
  if (trajectories.empty()) return report;
  const auto& reference = trajectories.front().samples;
  for (const auto& tr : trajectories) {
    if (tr.samples.size() != reference.size())
      throw std::invalid_argument("crossing check needs trajectories on a shared time grid");
    for (std::size_t k = 0; k < reference.size(); ++k)
      if (tr.samples[k].t != reference[k].t)
        throw std::invalid_argument("crossing check needs trajectories on a shared time grid");
  }
  const std::uint64_t n = trajectories.size();
  report.pairs_checked = n * (n - 1) / 2;

  std::vector<std::size_t> all(trajectories.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  report.crossings = detail::count_crossings(trajectories, all);
  if (report.crossings == 0) return report;

  std::map<std::pair<double, double>, std::vector<std::size_t>> by_source;
  for (std::size_t i = 0; i < trajectories.size(); ++i)
    by_source[{trajectories[i].source.theta0(), trajectories[i].source.phi0()}].push_back(i);
  for (const auto& [source, members] : by_source)
    if (detail::count_crossings(trajectories, members) > 0) report.pure_state_violation = true;
  return report;
}

inline nlohmann::json to_json(const CrossingReport& r) {
  return {{"pairs_checked", r.pairs_checked}, {"crossings", r.crossings}, {"pure_state_violation", r.pure_state_violation}};
}

}  // namespace pilotwave
