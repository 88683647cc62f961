#pragma once

// Experimental constants of the Stern-Gerlach setup (SI units) and the beam
// parameters derived from them.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "errors.hpp"

namespace pilotwave {

/// Bohr magneton, J/T. Stored as a literal.
inline constexpr double kBohrMagneton = 9.274e-24;
/// Reduced Planck constant, J s.
inline constexpr double kHbar = 1.054571817e-34;

struct PhysicalConfig {
  double mass = 1.8e-25;       // kg, silver atom
  double hbar = kHbar;         // J s
  double mu_bohr = kBohrMagneton;  // J/T
  double b0 = 5.0;             // T, uniform field component
  double b0_grad = 1e3;        // T/m, field gradient
  double sigma0 = 1e-4;        // m, initial packet standard deviation
  double magnet_length = 1e-2; // m
  double free_path = 0.2;      // m, magnet exit to screen
  double v_beam = 500.0;       // m/s, classical speed along the beam axis
  double phi_plus = 0.0;       // rad, constant phase of the up packet after the field
  double phi_minus = 0.0;      // rad, constant phase of the down packet after the field

  friend bool operator==(const PhysicalConfig&, const PhysicalConfig&) = default;
};

struct DerivedBeamParams {
  double dt_field = 0.0;  // s, time to cross the magnet
  double z_delta = 0.0;   // m, packet-centre offset at the magnet exit
  double u = 0.0;         // m/s, packet separation speed
  double t_screen = 0.0;  // s, free flight from magnet exit to screen
};

namespace detail {

struct ConfigField {
  std::string_view name;
  double PhysicalConfig::*member;
  enum class Sign { Positive, NonNegative, Any } sign;
};

inline constexpr std::array<ConfigField, 11> kConfigFields{{
    {"mass", &PhysicalConfig::mass, ConfigField::Sign::Positive},
    {"hbar", &PhysicalConfig::hbar, ConfigField::Sign::Positive},
    {"mu_bohr", &PhysicalConfig::mu_bohr, ConfigField::Sign::Positive},
    {"b0", &PhysicalConfig::b0, ConfigField::Sign::NonNegative},
    {"b0_grad", &PhysicalConfig::b0_grad, ConfigField::Sign::NonNegative},
    {"sigma0", &PhysicalConfig::sigma0, ConfigField::Sign::Positive},
    {"magnet_length", &PhysicalConfig::magnet_length, ConfigField::Sign::Positive},
    {"free_path", &PhysicalConfig::free_path, ConfigField::Sign::Positive},
    {"v_beam", &PhysicalConfig::v_beam, ConfigField::Sign::Positive},
    {"phi_plus", &PhysicalConfig::phi_plus, ConfigField::Sign::Any},
    {"phi_minus", &PhysicalConfig::phi_minus, ConfigField::Sign::Any},
}};

}  // namespace detail

/// Throws ConfigError naming the first offending field. Field strengths may be
/// zero (no splitting); every other dimensional quantity must be positive.
inline void validate(const PhysicalConfig& config) {
  for (const auto& f : detail::kConfigFields) {
    const double v = config.*(f.member);
    const std::string name(f.name);
    if (!std::isfinite(v)) throw ConfigError(name, "must be finite");
    using Sign = detail::ConfigField::Sign;
    if (f.sign == Sign::Positive && !(v > 0.0)) throw ConfigError(name, "must be strictly positive");
    if (f.sign == Sign::NonNegative && v < 0.0) throw ConfigError(name, "must be non-negative");
  }
}

inline DerivedBeamParams derive_beam_params(const PhysicalConfig& config) {
  validate(config);
  DerivedBeamParams p;
  p.dt_field = config.magnet_length / config.v_beam;
  const double accel = config.mu_bohr * config.b0_grad / config.mass;
  p.u = accel * p.dt_field;
  p.z_delta = accel * p.dt_field * p.dt_field / 2.0;
  p.t_screen = config.free_path / config.v_beam;
  return p;
}

/// Missing keys keep their default value; unknown keys are rejected.
inline PhysicalConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  PhysicalConfig config;
  for (const auto& [key, value] : j.items()) {
    const auto* it = std::find_if(detail::kConfigFields.begin(), detail::kConfigFields.end(),
                                  [&](const auto& f) { return f.name == key; });
    if (it == detail::kConfigFields.end()) throw ConfigError(key, "unknown config field");
    if (!value.is_number()) throw ConfigError(key, "must be a number");
    config.*(it->member) = value.get<double>();
  }
  validate(config);
  return config;
}

inline nlohmann::json to_json(const PhysicalConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& f : detail::kConfigFields) j[std::string(f.name)] = config.*(f.member);
  return j;
}

inline nlohmann::json to_json(const DerivedBeamParams& p) {
  return {{"dt_field", p.dt_field}, {"z_delta", p.z_delta}, {"u", p.u}, {"t_screen", p.t_screen}};
}

inline PhysicalConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<file>", std::string("parse error in ") + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace pilotwave
