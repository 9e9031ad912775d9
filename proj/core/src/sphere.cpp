#include "hopcap/sphere.hpp"

#include <algorithm>
#include <string>

#include "hopcap/error.hpp"

namespace hopcap {

namespace {

// Slack for inputs that reach a domain boundary through rounding.
constexpr double kBoundarySlack = 1e-12;

void require_distance_range(double l, const char* what) {
  if (!(l >= 0.0 && l <= kMaxSurfaceDistance + kBoundarySlack)) {
    throw DomainError(std::string(what) + ": surface length " + std::to_string(l) +
                      " outside [0, sqrt(pi)/2]");
  }
}

}  // namespace

SpherePoint SpherePoint::from_direction(Vec3 direction) {
  const double len = norm(direction);
  if (!(len > 1e-300) || !std::isfinite(len)) {
    throw GeometryError("SpherePoint: direction has zero or non-finite length");
  }
  return SpherePoint((1.0 / len) * direction);
}

SpherePoint SpherePoint::from_unit(Vec3 unit) {
  if (!(std::abs(norm(unit) - 1.0) <= 1e-12)) {
    throw GeometryError("SpherePoint: vector is not of unit length");
  }
  return SpherePoint(unit);
}

SpherePoint SpherePoint::from_lat_lon(double lat_rad, double lon_rad) {
  const double c = std::cos(lat_rad);
  return from_direction({c * std::cos(lon_rad), c * std::sin(lon_rad), std::sin(lat_rad)});
}

double central_angle(const SpherePoint& a, const SpherePoint& b) {
  const Vec3& u = a.direction();
  const Vec3& v = b.direction();
  return std::atan2(norm(cross(u, v)), dot(u, v));
}

double surface_distance(const SpherePoint& a, const SpherePoint& b) {
  return kSphereRadius * central_angle(a, b);
}

Cap Cap::from_radius(double rho) { return {rho, cap_area(rho)}; }

Cap Cap::from_area(double area) { return {rho_for_area(area), area}; }

double cap_area(double rho) {
  require_distance_range(rho, "cap_area");
  const double s = std::sin(kSqrtPi * std::min(rho, kMaxSurfaceDistance));
  return s * s;
}

double rho_for_area(double area) {
  if (!(area >= 0.0 && area <= 1.0)) {
    throw DomainError("rho_for_area: area " + std::to_string(area) + " outside [0, 1]");
  }
  return std::asin(std::sqrt(area)) / kSqrtPi;
}

double distance_cdf(double l) {
  require_distance_range(l, "distance_cdf");
  return 0.5 * (1.0 - std::cos(2.0 * kSqrtPi * std::min(l, kMaxSurfaceDistance)));
}

double distance_pdf(double l) {
  require_distance_range(l, "distance_pdf");
  return kSqrtPi * std::sin(2.0 * kSqrtPi * std::min(l, kMaxSurfaceDistance));
}

double expected_delta_pow_L(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw DomainError("expected_delta_pow_L: delta " + std::to_string(delta) +
                      " outside (0, 1)");
  }
  if (delta == 1.0) {
    return 1.0;
  }
  const double log_delta = std::log(delta);
  return 2.0 * kPi * (1.0 + std::pow(delta, 0.5 * kSqrtPi)) /
         (4.0 * kPi + log_delta * log_delta);
}

SpherePoint random_point(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    const Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
    if (dot(v, v) > 1e-24) {
      return SpherePoint::from_direction(v);
    }
  }
}

SpherePoint geodesic_point(const SpherePoint& a, const SpherePoint& b, double s) {
  const double theta = central_angle(a, b);
  if (kPi - theta < 1e-12) {
    throw GeometryError("geodesic_point: antipodal endpoints have no unique geodesic");
  }
  const double d = kSphereRadius * theta;
  if (!(s >= 0.0 && s <= d + kBoundarySlack)) {
    throw DomainError("geodesic_point: arclength " + std::to_string(s) + " outside [0, " +
                      std::to_string(d) + "]");
  }
  if (s <= 0.0) {
    return a;
  }
  if (s >= d) {
    return b;
  }
  const double t = s / kSphereRadius;
  const double sin_theta = std::sin(theta);
  const double wa = std::sin(theta - t) / sin_theta;
  const double wb = std::sin(t) / sin_theta;
  return SpherePoint::from_direction(wa * a.direction() + wb * b.direction());
}

}  // namespace hopcap
