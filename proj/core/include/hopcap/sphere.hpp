#pragma once

#include <cmath>
#include <numbers>

#include "hopcap/random.hpp"

namespace hopcap {

// The network lives on the sphere of unit surface area. Points are stored as
// unit direction vectors; every public distance is a great-circle surface
// length on the embedded sphere of radius 1/(2*sqrt(pi)).
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrtPi = 1.0 / std::numbers::inv_sqrtpi;
inline constexpr double kSphereRadius = 0.5 * std::numbers::inv_sqrtpi;
// Half a great circle: the largest possible surface distance.
inline constexpr double kMaxSurfaceDistance = 0.5 * kSqrtPi;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend constexpr Vec3 operator*(double s, Vec3 a) {
    return {s * a.x, s * a.y, s * a.z};
  }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

class SpherePoint {
 public:
  SpherePoint() = default;

  // Normalizes `direction`; throws GeometryError for a (near) zero vector.
  static SpherePoint from_direction(Vec3 direction);
  static SpherePoint from_lat_lon(double lat_rad, double lon_rad);
  // Takes an already unit vector verbatim (exact round trips through text);
  // throws GeometryError if its length is off by more than 1e-12.
  static SpherePoint from_unit(Vec3 unit);

  const Vec3& direction() const noexcept { return dir_; }
  SpherePoint antipode() const noexcept { return SpherePoint({-dir_.x, -dir_.y, -dir_.z}); }

  friend bool operator==(const SpherePoint&, const SpherePoint&) = default;

 private:
  explicit SpherePoint(Vec3 unit) : dir_(unit) {}
  Vec3 dir_{0.0, 0.0, 1.0};
};

// Central angle in radians, numerically stable near 0 and pi.
double central_angle(const SpherePoint& a, const SpherePoint& b);

// Great-circle length between two points, in [0, sqrt(pi)/2].
double surface_distance(const SpherePoint& a, const SpherePoint& b);

struct Cap {
  double radius = 0.0;
  double area = 0.0;

  static Cap from_radius(double rho);
  static Cap from_area(double area);
};

// Area fraction of a spherical cap of surface radius rho: sin^2(sqrt(pi) rho).
double cap_area(double rho);

// Inverse of cap_area: arcsin(sqrt(area)) / sqrt(pi).
double rho_for_area(double area);

// Distribution of the surface distance between two independent uniform
// points: F(l) = (1 - cos(2 sqrt(pi) l)) / 2 on [0, sqrt(pi)/2].
double distance_cdf(double l);
double distance_pdf(double l);

// Closed form of E[delta^L] for L the distance between two uniform points:
//   2 pi (1 + delta^(sqrt(pi)/2)) / (4 pi + (ln delta)^2).
// delta == 1 returns the limit value 1 (the ratio is 0/0-free there, but the
// branch keeps the contract explicit). Throws DomainError outside (0, 1].
double expected_delta_pow_L(double delta);

// Uniform point on the sphere (normalized standard Gaussian triple).
SpherePoint random_point(Rng& rng);

// Point on the minor arc from a to b at surface arclength s from a.
// Throws GeometryError for antipodal endpoints and DomainError if s is
// outside [0, surface_distance(a, b)].
SpherePoint geodesic_point(const SpherePoint& a, const SpherePoint& b, double s);

}  // namespace hopcap
