#pragma once

// CSV and JSON writers for experiment outputs. Reals are written with 17
// significant digits so reruns can be compared byte for byte.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "coin_game.hpp"
#include "pauli_grid.hpp"
#include "spinor_field.hpp"
#include "trajectory.hpp"
#include "two_state.hpp"

namespace pilotwave {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }
inline double radians_to_degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

/// step,angle_to_prev_deg,p_heads,p_agree_prev; the first step leaves the
/// comparison columns empty.
inline void write_coin_csv(std::ostream& out, const ProtocolResult& r) {
  out << "step,angle_to_prev_deg,p_heads,p_agree_prev\n";
  for (const auto& s : r.steps) {
    out << s.step << ',' << (s.angle_to_prev_deg ? format_real(*s.angle_to_prev_deg) : "") << ','
        << format_real(s.p_heads) << ',' << (s.p_agree_prev ? format_real(*s.p_agree_prev) : "") << '\n';
  }
}

/// `count` evenly spaced angles from 0 to 180 degrees inclusive.
inline std::vector<double> curve_angles_deg(std::size_t count) {
  if (count < 2) throw std::invalid_argument("need at least two curve angles");
  std::vector<double> deg(count);
  for (std::size_t i = 0; i < count; ++i) deg[i] = 180.0 * static_cast<double>(i) / static_cast<double>(count - 1);
  return deg;
}

inline void write_curves_csv(std::ostream& out, std::span<const double> angles_deg) {
  out << "beta_deg,p_same_classical,p_same_quantum\n";
  for (double deg : angles_deg) {
    const double beta = std::min(degrees_to_radians(deg), std::numbers::pi);
    out << format_real(deg) << ',' << format_real(classical_agreement(beta)) << ','
        << format_real(quantum_agreement(beta)) << '\n';
  }
}

/// traj_id,t,y,x,z,vz,theta_spin with y = v_beam t.
inline void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> trajectories, double v_beam) {
  out << "traj_id,t,y,x,z,vz,theta_spin\n";
  for (std::size_t id = 0; id < trajectories.size(); ++id)
    for (const auto& s : trajectories[id].samples)
      out << id << ',' << format_real(s.t) << ',' << format_real(v_beam * s.t) << ',' << format_real(s.x) << ','
          << format_real(s.z) << ',' << format_real(s.vz) << ',' << format_real(s.theta_spin) << '\n';
}

struct DensityRow {
  double t, z, rho;
};

inline void write_density_csv(std::ostream& out, std::span<const DensityRow> rows) {
  out << "t,z,rho\n";
  for (const auto& r : rows) out << format_real(r.t) << ',' << format_real(r.z) << ',' << format_real(r.rho) << '\n';
}

/// x,z,re_plus,im_plus,re_minus,im_minus in the laboratory frame.
inline void write_grid_snapshot_csv(std::ostream& out, const GridState& state) {
  out << "x,z,re_plus,im_plus,re_minus,im_minus\n";
  for (std::size_t i = 0; i < state.spec.nx; ++i)
    for (std::size_t j = 0; j < state.spec.nz; ++j) {
      const Spinor s = state.lab_spinor(i, j);
      out << format_real(state.spec.x_at(i)) << ',' << format_real(state.spec.z_at(j)) << ','
          << format_real(s.plus.real()) << ',' << format_real(s.plus.imag()) << ',' << format_real(s.minus.real())
          << ',' << format_real(s.minus.imag()) << '\n';
    }
}

}  // namespace pilotwave
