#pragma once

#include <cmath>

namespace pilotwave {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  [[nodiscard]] constexpr double dot(const Vec3& o) const noexcept { return x * o.x + y * o.y + z * o.z; }
  [[nodiscard]] double norm() const noexcept { return std::sqrt(dot(*this)); }
  [[nodiscard]] Vec3 normalized() const noexcept {
    const double n = norm();
    return {x / n, y / n, z / n};
  }
  constexpr Vec3 operator-() const noexcept { return {-x, -y, -z}; }
  friend constexpr Vec3 operator*(double s, const Vec3& v) noexcept { return {s * v.x, s * v.y, s * v.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

inline constexpr Vec3 unit_x{1.0, 0.0, 0.0};
inline constexpr Vec3 unit_y{0.0, 1.0, 0.0};
inline constexpr Vec3 unit_z{0.0, 0.0, 1.0};

/// Angle between two vectors in radians, in [0, pi].
inline double angle_between(const Vec3& a, const Vec3& b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  return std::acos(c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c));
}

}  // namespace pilotwave
