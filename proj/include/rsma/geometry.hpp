#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace rsma {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3& a, const Vec3& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
  }

  [[nodiscard]] double norm() const { return std::sqrt(x * x + y * y + z * z); }
  [[nodiscard]] bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

inline double horizontal_distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Elevation angle from a ground point up to the transmitter. A user directly
// below gets pi/2 (atan2 handles the zero horizontal distance).
inline double elevation_angle(const Vec3& transmitter, const Vec3& ground) {
  const double dz = transmitter.z - ground.z;
  if (dz <= 0.0) throw std::domain_error("elevation_angle: transmitter must be above the ground point");
  return std::atan2(dz, horizontal_distance(transmitter, ground));
}

// Transmitter position plus the two served ground users.
struct Geometry {
  Vec3 abs_position;
  std::array<Vec3, 2> user_positions;

  void validate() const {
    if (!abs_position.finite() || !user_positions[0].finite() || !user_positions[1].finite())
      throw std::invalid_argument("Geometry: positions must be finite");
    if (abs_position.z <= 0.0)
      throw std::invalid_argument("Geometry: transmitter altitude must be positive");
    for (const auto& u : user_positions)
      if (u.z != 0.0) throw std::invalid_argument("Geometry: users must be at ground level");
  }
};

}  // namespace rsma
