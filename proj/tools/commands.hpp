#pragma once

// Subcommands of the pilotwave tool. Each writes manifest.json into its output
// directory before any data file and returns a process exit code.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pilotwave::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitUsage = 2,
  kExitValidationFailed = 3,
};

struct CoinArgs {
  std::optional<std::string> preset;
  std::optional<std::filesystem::path> protocol;
  std::optional<std::string> axes;  // inline, e.g. "z;y;z" or "z;0,1,1"
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "out";
};

struct CurvesArgs {
  std::size_t angle_count = 181;
  std::filesystem::path out = "out";
};

struct SternGerlachArgs {
  std::optional<std::string> preset;        // fig7, fig8, fig9
  std::optional<std::vector<double>> pure;  // theta0, phi0 in degrees
  bool mixture = false;
  std::optional<std::size_t> n;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out = "out";
  std::optional<std::vector<double>> snapshots;  // s after the magnet exit
  std::size_t traj_limit = 100;
  std::size_t record_every = 40;
  std::size_t steps = 4000;
  bool verify_step_halving = true;
};

struct ValidateFieldArgs {
  std::optional<std::filesystem::path> config;
  std::size_t nx = 256;
  std::size_t nz = 256;
  std::size_t steps = 2000;
  double box_sigma = 14.0;
  double theta_deg = 90.0;
  double phi_deg = 0.0;
  bool snapshot = false;
  std::filesystem::path out = "out";
};

int cmd_coin(const CoinArgs& args);
int cmd_curves(const CurvesArgs& args);
int cmd_stern_gerlach(const SternGerlachArgs& args);
int cmd_validate_field(const ValidateFieldArgs& args);

/// Parses "z;y;0,1,1" into a JSON axis list.
nlohmann::json parse_inline_axes(const std::string& text);

}  // namespace pilotwave::cli
