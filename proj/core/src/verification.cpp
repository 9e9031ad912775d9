#include "hopcap/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "hopcap/error.hpp"
#include "hopcap/sphere.hpp"

namespace hopcap {

double short_hop_coefficient(double t) { return (1.0 - 16.0 * t / kPi) / (8.0 - t); }

BoundSet compute_bounds(double eps1, double eps2, double alpha, std::size_t K) {
  if (!(eps1 > 0.0 && eps2 > 0.0 && eps1 + eps2 < 0.125)) {
    throw ArgumentError("compute_bounds: need eps1, eps2 > 0 and eps1 + eps2 < 1/8");
  }
  if (!(alpha > 2.0)) {
    throw ArgumentError("compute_bounds: alpha must exceed 2");
  }
  if (K < 1) {
    throw ArgumentError("compute_bounds: schedule length must be >= 1");
  }
  BoundSet b;
  b.eps1 = eps1;
  b.eps2 = eps2;
  b.alpha = alpha;
  b.K = K;
  b.c1 = static_cast<double>(K) - 1.0;

  const double target = 0.125 - eps1;
  const auto g = [&](double t) { return short_hop_coefficient(t) - target; };
  double lo = 0.0;
  double hi = kPi / 16.0;
  if (!(g(lo) > 0.0 && g(hi) < 0.0)) {
    throw DomainError("compute_bounds: no root of the short-hop equation in (0, pi/16)");
  }
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  b.t0 = 0.5 * (lo + hi);

  const double k = static_cast<double>(K);
  b.M0 = 2.0 * k / eps2;
  if (!(b.M0 > 9.0)) {
    throw DomainError("compute_bounds: M0 = 2K/eps2 must exceed 9");
  }
  b.beta0 = std::pow((b.M0 + 8.0) / b.t0, alpha);
  b.M0_arbitrary = 2.0 * k / b.eps_arbitrary;
  b.beta1 = std::pow(100.0, alpha) * std::pow(b.M0_arbitrary + 8.0, alpha);
  return b;
}

double c0_constant(double phi_beta0) {
  if (!(phi_beta0 > 0.0 && phi_beta0 < 1.0)) {
    throw DomainError("c0: phi(beta0) must lie in (0, 1)");
  }
  const double l = std::log(phi_beta0);
  return 4096.0 / (l * l);
}

HopCountResult check_hop_count(const Route& r, double rho) {
  HopCountResult res;
  res.H = r.hop_count();
  const double L = r.geodesic_length;
  res.lower = std::max(L / (8.0 * rho), 1.0);
  res.upper = 16.0 * L / (kPi * rho);
  res.upper_with_ends = 16.0 * (L + 8.0 * rho) / (kPi * rho);
  return res;
}

ShortHopResult check_short_hops(const Route& r, double rho, double t) {
  if (!(t > 0.0 && t < kPi / 16.0)) {
    throw ArgumentError("check_short_hops: t must lie in (0, pi/16)");
  }
  ShortHopResult res;
  res.H = r.hop_count();
  res.t = t;
  for (const Hop& h : r.hops) {
    if (h.length < t * rho) {
      ++res.h;
    }
  }
  res.required = r.geodesic_length / rho * short_hop_coefficient(t);
  return res;
}

namespace {

void require_saturated(const RunMetrics& run) {
  if (!run.saturated) {
    throw InvariantError("interferer counting needs a saturated run: every scheduled cell must transmit");
  }
}

// Hops 1..H-2: neither the source's nor the destination's hop.
std::size_t interior_begin() { return 1; }
std::size_t interior_end(const Route& r) { return r.hops.size() >= 2 ? r.hops.size() - 1 : 1; }

}  // namespace

InterfererResult check_interferer_proximity(const Route& r, const ConnectionMetrics& cm,
                                            const RunMetrics& run, double M, RoutingCase rc) {
  require_saturated(run);
  const double min_M = rc == RoutingCase::straight_line ? 9.0 : 16.0;
  if (!(M > min_M)) {
    throw ArgumentError("check_interferer_proximity: M must exceed " +
                        std::to_string(static_cast<int>(min_M)));
  }
  if (cm.hops.size() != r.hops.size()) {
    throw ArgumentError("check_interferer_proximity: metrics do not match the route");
  }
  InterfererResult res;
  res.M = M;
  const double radius = (M + 8.0) * run.rho;
  for (std::size_t k = interior_begin(); k < interior_end(r); ++k) {
    ++res.interior_hops;
    const HopStats& s = cm.hops[k];
    if (s.observations == 0) {
      ++res.unobserved;
      ++res.N;
    } else if (s.max_nearest_interferer > radius) {
      ++res.N;
    }
  }
  const double L = rc == RoutingCase::straight_line ? r.geodesic_length : r.path_length;
  res.bound = L / run.rho * 2.0 * static_cast<double>(run.schedule_length) / M;
  return res;
}

SinrFractionResult check_sinr_bounded_fraction(const Route& r, const ConnectionMetrics& cm,
                                               const RunMetrics& run, const BoundSet& b,
                                               RoutingCase rc) {
  require_saturated(run);
  if (cm.hops.size() != r.hops.size()) {
    throw ArgumentError("check_sinr_bounded_fraction: metrics do not match the route");
  }
  SinrFractionResult res;
  const bool straight = rc == RoutingCase::straight_line;
  res.beta = straight ? b.beta0 : b.beta1;
  res.required =
      straight ? r.geodesic_length / (16.0 * run.rho) : r.path_length / (640.0 * run.rho);
  for (std::size_t k = 0; k < r.hops.size(); ++k) {
    const HopStats& s = cm.hops[k];
    const bool bounded = s.observations > 0 && s.max_sinr <= res.beta;
    res.bounded += bounded;
    if (k >= interior_begin() && k < interior_end(r)) {
      ++res.interior_hops;
      res.bounded_interior += bounded;
    }
  }
  return res;
}

ConsecutiveResult check_consecutive_short_hops(const Route& r, double rho, std::size_t W,
                                               double t) {
  ConsecutiveResult res;
  res.W = W;
  res.t = t;
  std::size_t run = 0;
  for (const Hop& h : r.hops) {
    run = h.length <= t * rho ? run + 1 : 0;
    res.max_run = std::max(res.max_run, run);
  }
  return res;
}

Rational consecutive_cell_bound(std::int64_t W, std::int64_t t_num, std::int64_t t_den) {
  if (t_den <= 0 || W < 0 || t_num < 0) {
    throw ArgumentError("consecutive_cell_bound: need W, t_num >= 0 and t_den > 0");
  }
  const std::int64_t s = W * t_num + 4 * t_den;
  Rational q{2 * s * s, t_den * t_den};
  const std::int64_t g = std::gcd(q.num, q.den);
  q.num /= g;
  q.den /= g;
  return q;
}

ThroughputCeilings throughput_ceilings(double rho, std::size_t K, double lambda,
                                       double phi_beta0, std::size_t n, double c) {
  if (!(phi_beta0 > 0.0 && phi_beta0 < 1.0)) {
    throw DomainError("throughput_ceilings: phi(beta0) must lie in (0, 1)");
  }
  if (!(rho > 0.0) || K == 0 || n < 2 || !(lambda > 0.0 && lambda <= 1.0)) {
    throw ArgumentError("throughput_ceilings: need rho > 0, K >= 1, n >= 2, lambda in (0, 1]");
  }
  ThroughputCeilings out;
  out.lambda = lambda;
  out.rho = rho;
  out.phi_beta0 = phi_beta0;
  out.n = n;
  out.K = K;

  const double ln_phi = std::log(phi_beta0);
  const double ln2 = ln_phi * ln_phi;
  const double area = 1024.0 * kPi * rho * rho;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(K);

  out.delta = std::pow(phi_beta0, 1.0 / (16.0 * rho));
  out.expected_delta_L = expected_delta_pow_L(out.delta);
  out.Lambda_chain = lambda * out.expected_delta_L;
  out.Lambda_direct = lambda * 512.0 * kPi * rho * rho *
                      (1.0 + std::pow(phi_beta0, kSqrtPi / (32.0 * rho))) / (area + ln2);
  out.Lambda_relaxed = lambda * area / (area + ln2);
  out.Lambda_bound = lambda * area / ln2;
  out.c0 = c0_constant(phi_beta0);
  out.c0_over_n = out.c0 / nd;
  out.conservative = c / (nd * rho * kd);
  out.conservative_sqrt_log = c / (kd * std::sqrt(nd * std::log(nd)));
  out.occupancy = 4.0 / (kPi * nd * rho * rho);
  return out;
}

void VerificationReport::add(std::string check, ConnectionId c, double lhs, double rhs,
                             bool pass) {
  rows.push_back({std::move(check), c, lhs, rhs, pass});
}

std::vector<CheckSummary> VerificationReport::summary() const {
  std::vector<CheckSummary> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const CheckRow& r : rows) {
    auto [it, fresh] = index.try_emplace(r.check, out.size());
    if (fresh) {
      out.push_back({r.check, 0, 0});
    }
    auto& s = out[it->second];
    ++s.total;
    if (r.pass) {
      ++s.passed;
    }
  }
  return out;
}

std::vector<CheckRow> VerificationReport::failures() const {
  std::vector<CheckRow> out;
  std::copy_if(rows.begin(), rows.end(), std::back_inserter(out),
               [](const CheckRow& r) { return !r.pass; });
  return out;
}

VerificationReport verify_routes(const VerifyInput& in) {
  if (in.routes == nullptr) {
    throw ArgumentError("verify_routes: no routes");
  }
  const auto& routes = *in.routes;
  VerificationReport rep;
  const bool straight = in.routing == RoutingCase::straight_line;
  for (const Route& r : routes) {
    const double H = static_cast<double>(r.hop_count());
    if (straight) {
      const auto hc = check_hop_count(r, in.rho);
      rep.add("hop_count_lower", r.connection, hc.lower, H, hc.lower_ok());
      rep.add("hop_count_upper", r.connection, H, hc.upper, hc.upper_ok());
      rep.add("hop_count_upper_ends", r.connection, H, hc.upper_with_ends,
              hc.upper_with_ends_ok());
      const auto sh = check_short_hops(r, in.rho, in.short_hop_t);
      rep.add("short_hops", r.connection, static_cast<double>(sh.H - sh.h), sh.required, sh.ok());
    }
    const auto cs = check_consecutive_short_hops(r, in.rho);
    rep.add("consecutive_short_hops", r.connection, static_cast<double>(cs.max_run),
            static_cast<double>(cs.W), cs.ok());
  }

  if (in.run != nullptr && in.run->saturated) {
    const RunMetrics& run = *in.run;
    if (run.connections.size() != routes.size()) {
      throw ArgumentError("verify_routes: run does not match the routes");
    }
    const BoundSet b = compute_bounds(1.0 / 32.0, 1.0 / 32.0, in.alpha, in.K);
    const double M = straight ? b.M0 : b.M0_arbitrary;
    for (std::size_t i = 0; i < routes.size(); ++i) {
      const auto ip = check_interferer_proximity(routes[i], run.connections[i], run, M, in.routing);
      rep.add("interferer_proximity", routes[i].connection, static_cast<double>(ip.N), ip.bound,
              ip.ok());
      const auto sf = check_sinr_bounded_fraction(routes[i], run.connections[i], run, b, in.routing);
      rep.add("sinr_bounded_fraction", routes[i].connection, static_cast<double>(sf.bounded),
              sf.required, sf.ok());
      rep.add("sinr_bounded_interior", routes[i].connection,
              static_cast<double>(sf.bounded_interior), sf.required, sf.interior_ok());
    }
  }
  return rep;
}

}  // namespace hopcap
