#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hopcap/engine.hpp"
#include "hopcap/routing.hpp"

namespace hopcap {

// Constants of the SINR-ceiling argument. c1 is read off the built schedule
// (c1 = K - 1); every inequality uses only K = 1 + c1.
struct BoundSet {
  double eps1 = 1.0 / 32.0;
  double eps2 = 1.0 / 32.0;
  double alpha = 3.0;
  std::size_t K = 1;
  double c1 = 0.0;
  double t0 = 0.0;  // root of (1 - 16t/pi) / (8 - t) = 1/8 - eps1
  double M0 = 0.0;  // 2K / eps2
  double beta0 = 0.0;  // ((M0 + 8) / t0)^alpha
  // Arbitrary routing: eps = 1/640, M = 2K / eps, beta1 = 100^alpha (M + 8)^alpha.
  double eps_arbitrary = 1.0 / 640.0;
  double M0_arbitrary = 0.0;
  double beta1 = 0.0;
};

// Throws ArgumentError unless eps1, eps2 > 0, eps1 + eps2 < 1/8, alpha > 2 and
// K >= 1; DomainError if the bisection finds no root or M0 <= 9.
BoundSet compute_bounds(double eps1, double eps2, double alpha, std::size_t K);

// Short-hop coefficient (1 - 16t/pi) / (8 - t).
double short_hop_coefficient(double t);

// c0 = 2^12 / (ln phi)^2. Throws DomainError unless 0 < phi < 1.
double c0_constant(double phi_beta0);

struct HopCountResult {
  std::size_t H = 0;
  double lower = 0.0;            // max(L / 8 rho, 1)
  double upper = 0.0;            // 16 L / (pi rho)
  double upper_with_ends = 0.0;  // 16 (L + 8 rho) / (pi rho): strip grown by both end cells
  bool lower_ok() const { return lower <= static_cast<double>(H); }
  bool upper_ok() const { return static_cast<double>(H) <= upper; }
  bool upper_with_ends_ok() const { return static_cast<double>(H) <= upper_with_ends; }
  bool ok() const { return lower_ok() && upper_ok(); }
};

HopCountResult check_hop_count(const Route& r, double rho);

struct ShortHopResult {
  std::size_t H = 0;
  std::size_t h = 0;  // hops shorter than t rho
  double t = 0.0;
  double required = 0.0;  // (L / rho) (1 - 16t/pi) / (8 - t)
  bool ok() const { return static_cast<double>(H - h) >= required; }
};

// Throws ArgumentError unless 0 < t < pi/16.
ShortHopResult check_short_hops(const Route& r, double rho, double t);

enum class RoutingCase { straight_line, arbitrary };

struct InterfererResult {
  std::size_t interior_hops = 0;
  // Interior hops whose receiver, in some observed slot, had no concurrent
  // transmitter within (M + 8) rho. Unobserved hops count too.
  std::size_t N = 0;
  std::size_t unobserved = 0;
  double M = 0.0;
  double bound = 0.0;  // (L / rho) 2K / M, L = geodesic or path length
  bool ok() const { return static_cast<double>(N) <= bound; }
};

// Requires a saturated run (InvariantError otherwise) and M > 9 (straight
// line) or M > 16 (arbitrary), ArgumentError otherwise. Hops holding the
// source or the destination are excluded.
InterfererResult check_interferer_proximity(const Route& r, const ConnectionMetrics& cm,
                                            const RunMetrics& run, double M, RoutingCase rc);

struct SinrFractionResult {
  std::size_t bounded = 0;  // hops with SINR <= beta at every observation
  // The same restricted to interior hops (source and destination hops
  // excluded, as in the interferer count). One- and two-hop routes have none.
  std::size_t interior_hops = 0;
  std::size_t bounded_interior = 0;
  double beta = 0.0;
  double required = 0.0;  // L / (16 rho) or path length / (640 rho)
  bool ok() const { return static_cast<double>(bounded) >= required; }
  bool interior_ok() const { return static_cast<double>(bounded_interior) >= required; }
};

// Straight line: beta0 with L / (16 rho). Arbitrary: beta1 with the path
// length over 640 rho. Requires a saturated run.
SinrFractionResult check_sinr_bounded_fraction(const Route& r, const ConnectionMetrics& cm,
                                               const RunMetrics& run, const BoundSet& b,
                                               RoutingCase rc);

struct ConsecutiveResult {
  std::size_t max_run = 0;  // longest run of hops of length <= t rho
  std::size_t W = 40;
  double t = 0.01;
  bool ok() const { return max_run < W; }
};

ConsecutiveResult check_consecutive_short_hops(const Route& r, double rho, std::size_t W = 40,
                                               double t = 0.01);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

// Cell-count bound 2 (W t + 4)^2 for t = t_num / t_den, in lowest terms.
Rational consecutive_cell_bound(std::int64_t W, std::int64_t t_num, std::int64_t t_den);

struct ThroughputCeilings {
  double lambda = 0.0;
  double rho = 0.0;
  double phi_beta0 = 0.0;
  std::size_t n = 0;
  std::size_t K = 0;

  double delta = 0.0;           // phi^(1 / (16 rho))
  double expected_delta_L = 0.0;
  double Lambda_chain = 0.0;    // lambda E[delta^L]
  double Lambda_direct = 0.0;   // lambda 512 pi rho^2 (1 + phi^(sqrt(pi)/(32 rho))) / (1024 pi rho^2 + ln^2 phi)
  double Lambda_relaxed = 0.0;  // lambda 1024 pi rho^2 / (1024 pi rho^2 + ln^2 phi)
  double Lambda_bound = 0.0;    // lambda 1024 pi rho^2 / ln^2 phi
  double c0 = 0.0;
  double c0_over_n = 0.0;
  double conservative = 0.0;          // c / (n rho K)
  double conservative_sqrt_log = 0.0; // c / (K sqrt(n ln n))
  double occupancy = 0.0;             // 4 / (pi n rho^2)
};

// Throws DomainError unless 0 < phi_beta0 < 1; ArgumentError for rho <= 0,
// K == 0, n < 2 or lambda outside (0, 1].
ThroughputCeilings throughput_ceilings(double rho, std::size_t K, double lambda,
                                       double phi_beta0, std::size_t n, double c = 1.0);

// One compared pair per (check, connection).
struct CheckRow {
  std::string check;
  ConnectionId connection = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

struct CheckSummary {
  std::string check;
  std::size_t total = 0;
  std::size_t passed = 0;
  double pass_rate() const {
    return total == 0 ? 1.0 : static_cast<double>(passed) / static_cast<double>(total);
  }
};

struct VerificationReport {
  std::vector<CheckRow> rows;

  void add(std::string check, ConnectionId c, double lhs, double rhs, bool pass);
  // Per check id, in first-appearance order.
  std::vector<CheckSummary> summary() const;
  std::vector<CheckRow> failures() const;
};

struct VerifyInput {
  const std::vector<Route>* routes = nullptr;
  const RunMetrics* run = nullptr;  // saturated run over the same routes, optional
  double rho = 0.0;
  std::size_t K = 1;
  double alpha = 3.0;
  RoutingCase routing = RoutingCase::straight_line;
  double short_hop_t = 0.05;
};

// Runs every applicable checker and collects lhs/rhs rows:
//   hop_count_lower, hop_count_upper, hop_count_upper_ends, short_hops,
//   consecutive_short_hops and, with a saturated run, interferer_proximity and
//   sinr_bounded_fraction. Hop-count and short-hop checks are only applied to
//   straight-line routing.
VerificationReport verify_routes(const VerifyInput& in);

}  // namespace hopcap
