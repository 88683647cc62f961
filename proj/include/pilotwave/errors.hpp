#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pilotwave {

struct ConfigError : std::invalid_argument {
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Particle sits where the spinor density is numerically zero.
struct NodeRegionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Wave packets overlap at the screen, so sign-of-z classification is meaningless.
struct PacketsNotSeparatedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridTooCoarseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnstableStepError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ProtocolError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Wraps an integrator failure with the index of the offending trajectory.
struct TrajectoryError : std::runtime_error {
  TrajectoryError(std::size_t index, const std::string& what)
      : std::runtime_error("trajectory " + std::to_string(index) + ": " + what), index_(index) {}
  [[nodiscard]] std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace pilotwave
