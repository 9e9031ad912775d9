#pragma once

// Reference computations for the tests. Nothing here calls into hopcap's
// geometry or bound code: sampling, distances, integrals and closed forms are
// redone from scratch so a shared bug cannot hide.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

struct P3 {
  double x, y, z;
};

// Area-uniform point on the unit sphere by Archimedes: z ~ U[-1, 1], phi ~ U[0, 2 pi).
inline P3 zphi_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double z = 2.0 * u(rng) - 1.0;
  const double phi = 2.0 * kPi * u(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

// Surface distance on the unit-area sphere from the chord length.
inline double chord_distance(P3 a, P3 b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  const double chord = std::sqrt(dx * dx + dy * dy + dz * dz);
  const double angle = 2.0 * std::asin(std::min(1.0, chord / 2.0));
  return angle / (2.0 * std::sqrt(kPi));
}

// E[delta^L] by composite Simpson over the density sqrt(pi) sin(2 sqrt(pi) l).
inline double expected_delta_pow_L_simpson(double delta, int panels = 20000) {
  const double sp = std::sqrt(kPi);
  const double hi = sp / 2.0;
  const int m = panels % 2 == 0 ? panels : panels + 1;
  const double h = hi / m;
  auto f = [&](double l) { return std::pow(delta, l) * sp * std::sin(2.0 * sp * l); };
  double s = f(0.0) + f(hi);
  for (int k = 1; k < m; ++k) {
    s += (k % 2 ? 4.0 : 2.0) * f(k * h);
  }
  return s * h / 3.0;
}

inline double distance_cdf(double l) {
  if (l <= 0.0) {
    return 0.0;
  }
  const double sp = std::sqrt(kPi);
  if (l >= sp / 2.0) {
    return 1.0;
  }
  return 0.5 * (1.0 - std::cos(2.0 * sp * l));
}

// (1 - 16t/pi) / (8 - t) = 1/8 - eps is linear in t.
inline double t0_closed_form(double eps1) {
  return 8.0 * eps1 / (16.0 / kPi - 0.125 + eps1);
}

// 2 (W t + 4)^2 with t = num / den, reduced.
inline std::pair<std::int64_t, std::int64_t> consecutive_bound_rational(std::int64_t W,
                                                                        std::int64_t num,
                                                                        std::int64_t den) {
  const std::int64_t inner = W * num + 4 * den;
  std::int64_t p = 2 * inner * inner;
  std::int64_t q = den * den;
  const std::int64_t g = std::gcd(p, q);
  return {p / g, q / g};
}

// Kolmogorov-Smirnov distance of a sample against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

// Index of the nearest point by linear scan over unit vectors.
inline std::size_t nearest_index(const std::vector<P3>& points, P3 p) {
  std::size_t best = 0;
  double best_dot = -2.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = points[i].x * p.x + points[i].y * p.y + points[i].z * p.z;
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  return best;
}

// Least-squares line y = a + b x with its R^2.
struct Fit {
  double intercept, slope, r2;
};

inline Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double b = sxy / sxx;
  return {my - b * mx, b, syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy)};
}

}  // namespace oracle
