// Acceptance run: one PASS/FAIL line per criterion. Every tolerance is pinned
// here. Geometry is recomputed with the oracles in tests/support wherever the
// criterion allows it, so the library is not grading itself.
//
//   hopcap_acceptance            run all criteria
//   hopcap_acceptance 4 8 9      run a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hopcap/experiment.hpp"
#include "hopcap/verification.hpp"
#include "oracles.hpp"

using namespace hopcap;
namespace fs = std::filesystem;

namespace {

// Logistic link for the decay regression.
constexpr double kLogisticSlope = 1.0;
constexpr double kLogisticMidpointDb = 10.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

oracle::P3 p3(const SpherePoint& p) {
  const Vec3& d = p.direction();
  return {d.x, d.y, d.z};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Desk-scale defaults: area constant 1 keeps rho admissible down to n = 250.
ExperimentSpec desk_spec() { return ExperimentSpec{}; }

struct Instance {
  std::size_t n;
  std::uint64_t seed;
  Network net;
  std::vector<Route> routes;
};

std::vector<Instance> straight_line_instances() {
  static std::vector<Instance> cache;
  if (!cache.empty()) {
    return cache;
  }
  const auto spec = desk_spec();
  for (std::size_t n : {500, 2000}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Instance in{n, seed, build_network(n, seed, spec), {}};
      const auto relays = RelayTable::build(in.net.deployment, in.net.tessellation, spec.relay, seed);
      const auto conns = pick_connections(in.net.deployment, seed);
      in.routes = build_routes(conns, in.net.deployment, in.net.tessellation, relays, spec, seed);
      cache.push_back(std::move(in));
    }
  }
  return cache;
}

double endpoint_distance(const Instance& in, const Route& r) {
  return oracle::chord_distance(p3(in.net.deployment.nodes[r.relays.front()]),
                                p3(in.net.deployment.nodes[r.relays.back()]));
}

double hop_distance(const Deployment& dep, const Hop& h) {
  return oracle::chord_distance(p3(dep.nodes[h.tx]), p3(dep.nodes[h.rx]));
}

// 1 and 2 share one sample of 10^6 uniform pairs.
struct PairSample {
  std::vector<double> distances;
  double seconds = 0.0;
};

const PairSample& pair_sample() {
  static PairSample s;
  if (s.distances.empty()) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20'260'101);
    s.distances.resize(1'000'000);
    for (auto& d : s.distances) {
      const auto a = oracle::zphi_point(rng);
      const auto b = oracle::zphi_point(rng);
      d = oracle::chord_distance(a, b);
    }
    s.seconds = seconds_since(t0);
  }
  return s;
}

Outcome c01_appendix_closed_form() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& s = pair_sample();
  const double n = static_cast<double>(s.distances.size());
  double worst = 0.0;
  std::string parts;
  for (double delta : {0.1, 0.5, 0.9, std::exp(-2.0 * std::sqrt(kPi))}) {
    double sum = 0.0, sum2 = 0.0;
    for (double l : s.distances) {
      const double v = std::pow(delta, l);
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1.0));
    const double z = std::abs(mean - expected_delta_pow_L(delta)) / se;
    worst = std::max(worst, z);
    parts += fmt(" d=%.4g:z=%.2f", delta, z);
  }
  const double ref = expected_delta_pow_L(std::exp(-2.0 * std::sqrt(kPi)));
  // Quoted to six places: one unit in the last place.
  const bool ref_ok = std::abs(ref - 0.260804) <= 1e-6;
  const double secs = seconds_since(t0) + s.seconds;
  return {worst < 3.0 && ref_ok && secs < 30.0,
          fmt("max |z| %.2f < 3;%s; closed form at e^-2sqrt(pi) = %.7f (ref 0.260804); %.1fs",
              worst, parts.c_str(), ref, secs)};
}

Outcome c02_distance_law() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& s = pair_sample();
  const double ks = oracle::ks_statistic(s.distances, [](double l) { return distance_cdf(l); });
  const double secs = seconds_since(t0) + s.seconds;
  return {ks < 0.002 && secs < 30.0, fmt("KS %.5f < 0.002 over 10^6 pairs; %.1fs", ks, secs)};
}

Outcome c03_cap_sandwich() {
  const double top = std::sqrt(kPi) / 4.0;
  int violations = 0;
  for (int k = 1; k <= 1000; ++k) {
    const double rho = top * static_cast<double>(k) / 1000.0;
    const double a = cap_area(rho);
    violations += !(kPi * rho * rho / 2.0 <= a && a <= kPi * rho * rho);
  }
  return {violations == 0, fmt("%d violations over 1000 radii in (0, sqrt(pi)/4]", violations)};
}

Outcome c04_a1_certificate() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto spec = desk_spec();
  int bad = 0;
  std::size_t uncovered = 0;
  double worst_pack = 1e9, worst_cover = 0.0;
  std::mt19937_64 probe_rng(4);
  for (std::size_t n : {500, 2000}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto net = build_network(n, seed, spec);
      const auto& t = net.tessellation;
      const double rho = t.rho();
      std::vector<oracle::P3> centers;
      for (const auto& c : t.centers()) {
        centers.push_back(p3(c));
      }
      double min_center = 1e9;
      for (std::size_t i = 0; i < centers.size(); ++i) {
        for (std::size_t j = i + 1; j < centers.size(); ++j) {
          min_center = std::min(min_center, oracle::chord_distance(centers[i], centers[j]));
        }
      }
      double max_node = 0.0;
      for (const auto& v : net.deployment.nodes) {
        const auto q = p3(v);
        max_node = std::max(max_node,
                            oracle::chord_distance(centers[oracle::nearest_index(centers, q)], q));
      }
      std::size_t miss = 0;
      for (int k = 0; k < 10'000; ++k) {
        const auto q = oracle::zphi_point(probe_rng);
        miss += oracle::chord_distance(centers[oracle::nearest_index(centers, q)], q) > 2.0 * rho;
      }
      worst_pack = std::min(worst_pack, min_center / (2.0 * rho));
      worst_cover = std::max(worst_cover, max_node / (2.0 * rho));
      uncovered += miss;
      bad += !(min_center >= 2.0 * rho && max_node <= 2.0 * rho && miss == 0);
    }
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 120.0,
          fmt("%d/40 tessellations fail; min center gap / 2rho = %.6f, max node-to-center / 2rho "
              "= %.6f, %zu/400000 probes uncovered; %.1fs",
              bad, worst_pack, worst_cover, uncovered, secs)};
}

Outcome c05_hop_count() {
  std::size_t total = 0, fail = 0;
  std::string dump;
  for (const auto& in : straight_line_instances()) {
    const double rho = in.net.tessellation.rho();
    for (const auto& r : in.routes) {
      const double L = endpoint_distance(in, r);
      const double H = static_cast<double>(r.hop_count());
      const double lower = std::max(L / (8.0 * rho), 1.0);
      const double upper = 16.0 * L / (kPi * rho);
      ++total;
      if (!(lower <= H && H <= upper)) {
        ++fail;
        if (fail <= 12) {
          dump += fmt("\n      n=%zu seed=%llu conn=%u H=%zu L/rho=%.4f lower=%.4f upper=%.4f",
                      in.n, static_cast<unsigned long long>(in.seed), r.connection,
                      r.hop_count(), L / rho, lower, upper);
        }
      }
    }
  }
  return {fail == 0, fmt("%zu/%zu routes violate max(L/8rho,1) <= H <= 16L/(pi rho)", fail, total) +
                         dump};
}

Outcome c06_short_hops() {
  constexpr double t = 0.05;
  const double coef = (1.0 - 16.0 * t / kPi) / (8.0 - t);
  std::size_t total = 0, fail = 0;
  std::string dump;
  for (const auto& in : straight_line_instances()) {
    const double rho = in.net.tessellation.rho();
    for (const auto& r : in.routes) {
      const double L = endpoint_distance(in, r);
      std::size_t h = 0;
      for (const Hop& hop : r.hops) {
        h += hop_distance(in.net.deployment, hop) < t * rho;
      }
      const double lhs = static_cast<double>(r.hop_count() - h);
      const double rhs = L / rho * coef;
      ++total;
      if (!(lhs >= rhs)) {
        ++fail;
        if (fail <= 12) {
          dump += fmt("\n      n=%zu seed=%llu conn=%u H=%zu h=%zu L/rho=%.5f need %.5f", in.n,
                      static_cast<unsigned long long>(in.seed), r.connection, r.hop_count(), h,
                      L / rho, rhs);
        }
      }
    }
  }
  return {fail == 0,
          fmt("%zu/%zu routes violate H - h >= (L/rho)(1-16t/pi)/(8-t) at t=0.05", fail, total) +
              dump};
}

Outcome c07_consecutive_short_hops() {
  auto spec = desk_spec();
  std::size_t routes = 0, violations = 0, longest = 0;
  std::string per;
  for (const char* id :
       {"straight_line", "shortest_cell_path", "random_walk_loop_erased", "detour:2"}) {
    spec.routing = RouteStrategy::parse(id);
    std::size_t here = 0;
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      const auto net = build_network(2000, seed, spec);
      const auto relays = RelayTable::build(net.deployment, net.tessellation, spec.relay, seed);
      const auto conns = pick_connections(net.deployment, seed);
      const double rho = net.tessellation.rho();
      for (const auto& r :
           build_routes(conns, net.deployment, net.tessellation, relays, spec, seed)) {
        std::size_t run = 0, best = 0;
        for (const Hop& h : r.hops) {
          run = hop_distance(net.deployment, h) < 0.01 * rho ? run + 1 : 0;
          best = std::max(best, run);
        }
        longest = std::max(longest, best);
        violations += best >= 40;
        ++here;
      }
    }
    routes += here;
    per += fmt(" %s:%zu", id, here);
  }
  const auto q = consecutive_cell_bound(40, 1, 100);
  const auto [num, den] = oracle::consecutive_bound_rational(40, 1, 100);
  const bool exact = q.num == num && q.den == den && num == 968 && den == 25 && q.value() == 38.72;
  return {violations == 0 && routes >= 10'000 && exact,
          fmt("%zu violations over %zu routes (%s ), longest run %zu; n2 = %lld/%lld = %.2f", violations,
              routes, per.c_str(), longest, static_cast<long long>(q.num),
              static_cast<long long>(q.den), q.value())};
}

// 8 and 9 share the saturated run at n = 2000.
struct SaturatedPoint {
  PointResult point;
  double seconds = 0.0;
};

const SaturatedPoint& saturated_2000() {
  static SaturatedPoint s;
  static bool done = false;
  if (!done) {
    const auto t0 = std::chrono::steady_clock::now();
    s.point = run_point(desk_spec(), 2000, 1);
    s.seconds = seconds_since(t0);
    done = true;
  }
  return s;
}

Outcome c08_interferer_proximity() {
  const auto& sp = saturated_2000();
  const auto& p = sp.point;
  if (!p.error.empty() || !p.saturated) {
    return {false, "run failed: " + p.error};
  }
  const auto& run = *p.saturated;
  const double K = static_cast<double>(run.schedule_length);
  const double M = 64.0 * K;  // 64 (1 + c1), c1 = K - 1
  const double radius = (M + 8.0) * run.rho;
  // Past the sphere's diameter any concurrent transmitter is in range, so a hop
  // lacks one exactly when its cell is alone in its color.
  const bool wraps = radius >= kMaxSurfaceDistance;
  const auto schedule = build_schedule_for(
      build_network(2000, 1, desk_spec()).tessellation, 2000, desk_spec().schedule);
  std::size_t fail = 0, mismatch = 0, hops_counted = 0;
  std::string dump;
  for (std::size_t i = 0; i < p.routes.size(); ++i) {
    const auto& r = p.routes[i];
    const auto res = check_interferer_proximity(r, run.connections[i], run, M,
                                                RoutingCase::straight_line);
    const double bound = r.geodesic_length / run.rho * 2.0 * K / M;
    hops_counted += res.N;
    if (!(static_cast<double>(res.N) <= bound)) {
      ++fail;
      if (fail <= 12) {
        dump += fmt("\n      conn=%zu N=%zu bound=%.5f interior=%zu unobserved=%zu", i, res.N,
                    bound, res.interior_hops, res.unobserved);
      }
    }
    if (wraps) {
      std::size_t lonely = 0;
      for (std::size_t k = 1; k + 1 < r.hops.size(); ++k) {
        lonely += schedule.active_cells(schedule.color_of_cell(r.hops[k].tx_cell)).size() == 1;
      }
      mismatch += lonely != res.N;
    }
  }
  return {fail == 0 && mismatch == 0 && sp.seconds < 300.0,
          fmt("%zu/%zu connections exceed (L/rho) 2K/M with K=%zu, M=%.0f ((M+8)rho = %.3f); "
              "total N=%zu; schedule oracle disagreements %zu; %.1fs",
              fail, p.routes.size(), run.schedule_length, M, radius, hops_counted, mismatch,
              sp.seconds) +
              dump};
}

Outcome c09_sinr_bounded_fraction() {
  const auto& p = saturated_2000().point;
  if (!p.error.empty() || !p.saturated) {
    return {false, "run failed: " + p.error};
  }
  const auto& run = *p.saturated;
  const std::size_t K = run.schedule_length;
  const double alpha = desk_spec().radio.alpha;
  const auto b = compute_bounds(1.0 / 32.0, 1.0 / 32.0, alpha, K);
  const double M0 = 64.0 * static_cast<double>(K);
  const double beta0 = std::pow((M0 + 8.0) / b.t0, alpha);
  const bool t0_ok = std::abs(b.t0 - 0.0500) <= 1e-3 &&
                     std::abs(b.t0 - oracle::t0_closed_form(1.0 / 32.0)) <= 1e-9;
  const bool consts_ok = b.M0 == M0 && b.beta0 == beta0;
  std::size_t pass = 0, all_hops_pass = 0;
  std::string dump;
  for (std::size_t i = 0; i < p.routes.size(); ++i) {
    const auto& r = p.routes[i];
    const auto& cm = run.connections[i];
    std::size_t interior = 0, bounded = 0, bounded_any = 0;
    for (std::size_t k = 0; k < r.hops.size(); ++k) {
      const bool b0 = cm.hops[k].observations > 0 && cm.hops[k].max_sinr <= beta0;
      bounded_any += b0;
      if (k >= 1 && k + 1 < r.hops.size()) {
        ++interior;
        bounded += b0;
      }
    }
    const double need = r.geodesic_length / (16.0 * run.rho);
    const bool ok = static_cast<double>(bounded) >= need;
    pass += ok;
    all_hops_pass += static_cast<double>(bounded_any) >= need;
    if (!ok) {
      dump += fmt("\n      conn=%zu H=%zu interior=%zu bounded=%zu need=%.4f", i, r.hop_count(),
                  interior, bounded, need);
    }
  }
  const double total = static_cast<double>(p.routes.size());
  const double rate = static_cast<double>(pass) / total;
  return {rate >= 0.95 && t0_ok && consts_ok,
          fmt("%.2f%% of %zu connections have >= L/16rho interior hops with SINR <= beta0=%.4g "
              "(t0=%.7f, M0=%.0f); counting end hops too: %.2f%%",
              100.0 * rate, p.routes.size(), beta0, b.t0, M0,
              100.0 * static_cast<double>(all_hops_pass) / total) +
              dump};
}

Outcome c10_retransmissions() {
  const auto spec = desk_spec();
  const auto net = build_network(500, 1, spec);
  const auto relays = RelayTable::build(net.deployment, net.tessellation, spec.relay, 1);
  const auto schedule = build_schedule_for(net.tessellation, 500, spec.schedule);
  std::vector<Route> one;
  for (const auto& c : pick_connections(net.deployment, 1)) {
    auto r = straight_line_route(c, net.deployment, net.tessellation, relays);
    if (r.hop_count() == 1 && r.cells.size() == 2) {
      r.connection = 0;
      one.push_back(r);
      break;
    }
  }
  if (one.empty()) {
    return {false, "no single-hop route"};
  }
  const auto K = static_cast<double>(schedule.num_colors());
  bool ok = true;
  std::string parts;
  for (int R : {1, 2, 3}) {
    EngineConfig cfg;
    cfg.attempts = R;
    cfg.lambda = 1.0 / (R * K + 2.0);
    cfg.measure_slots = static_cast<std::uint64_t>(1.05e5 / cfg.lambda);
    cfg.seed = static_cast<std::uint64_t>(R);
    const auto m = run(net.deployment, net.tessellation, schedule, one, LinkModel::constant(0.5),
                       spec.radio, cfg);
    const auto& cm = m.connections[0];
    const std::uint64_t trials = cm.delivered + cm.dropped;
    const double got = static_cast<double>(cm.delivered) / static_cast<double>(trials);
    const double want = 1.0 - std::pow(0.5, R);
    ok = ok && trials >= 100'000 && std::abs(got - want) <= 0.01;
    parts += fmt(" R=%d: %.4f vs %.4f over %llu;", R, got, want,
                 static_cast<unsigned long long>(trials));
  }
  return {ok, "per-hop success within +-0.01 of 1-(1-p)^R:" + parts};
}

Outcome c11_geometric_decay() {
  // Part 1: constant_p(0.9), R = 1.
  auto spec = desk_spec();
  spec.link = LinkModel::constant(0.9);
  spec.engine.lambda = 1e-4;
  spec.engine.measure_slots = 2'000'000;
  spec.verify.enabled = false;
  const auto p = run_point(spec, 500, 1);
  if (!p.error.empty()) {
    return {false, "run failed: " + p.error};
  }
  std::size_t outside = 0;
  double worst = 0.0, sum_z2 = 0.0;
  std::string dump;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto& cm = p.run.connections[i];
    const double n = static_cast<double>(cm.delivered + cm.dropped);
    const double want = std::pow(0.9, static_cast<double>(p.routes[i].hop_count()));
    const double sigma = std::sqrt(want * (1.0 - want) / n);
    const double z = std::abs(static_cast<double>(cm.delivered) / n - want) / sigma;
    worst = std::max(worst, z);
    sum_z2 += z * z;
    if (z > 3.0) {
      ++outside;
      dump += fmt("\n      conn=%zu H=%zu delivered=%llu/%.0f want %.4f z=%.2f", i,
                  p.routes[i].hop_count(), static_cast<unsigned long long>(cm.delivered), n,
                  want, z);
    }
  }

  // Part 2: logistic link over saturated fixed-K background traffic.
  std::map<std::size_t, std::pair<double, double>> by_h;  // H -> (delivered, resolved)
  auto lspec = desk_spec();
  lspec.link = LinkModel::logistic(kLogisticSlope, kLogisticMidpointDb);
  for (std::size_t n : {500, 1000, 2000, 4000}) {
    const auto net = build_network(n, 1, lspec);
    const auto relays = RelayTable::build(net.deployment, net.tessellation, lspec.relay, 1);
    const auto conns = pick_connections(net.deployment, 1);
    const auto routes = build_routes(conns, net.deployment, net.tessellation, relays, lspec, 1);
    const auto schedule = build_schedule_for(net.tessellation, n, lspec.schedule);
    EngineConfig cfg = saturated_mode(lspec.engine);
    cfg.lambda = 2e-5 * 500.0 / static_cast<double>(n);
    cfg.measure_slots = 400'000;
    const auto m = run(net.deployment, net.tessellation, schedule, routes, lspec.link,
                       lspec.radio, cfg);
    for (std::size_t i = 0; i < routes.size(); ++i) {
      auto& acc = by_h[routes[i].hop_count()];
      acc.first += static_cast<double>(m.connections[i].delivered);
      acc.second += static_cast<double>(m.connections[i].delivered + m.connections[i].dropped);
    }
  }
  std::vector<double> hs, ys;
  for (const auto& [h, acc] : by_h) {
    if (acc.second >= 100.0 && acc.first > 0.0) {
      hs.push_back(static_cast<double>(h));
      ys.push_back(std::log(acc.first / acc.second));
    }
  }
  const auto fit = oracle::linear_fit(hs, ys);
  const bool part1 = outside == 0;
  const bool part2 = hs.size() >= 3 && fit.r2 >= 0.9 && fit.slope < 0.0;
  return {part1 && part2,
          fmt("constant_p: %zu/200 connections outside 3 sigma (max z %.2f, mean z^2 %.3f; "
              "0.54 expected outside by chance); logistic "
              "(slope %.2f, midpoint %.1f dB): ln(delivery) ~ H over %zu hop counts, slope %.4f, "
              "R^2 %.4f",
              outside, worst, sum_z2 / 200.0, kLogisticSlope, kLogisticMidpointDb, hs.size(), fit.slope, fit.r2) +
              dump};
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1)));
  return v[k];
}

Outcome c12_conservative_tradeoff() {
  auto spec = desk_spec();
  bool monotone = true, sinr_ok = true;
  std::string parts;
  std::map<std::size_t, std::vector<double>> fixed_sinr, cons_sinr;
  std::map<std::uint64_t, std::vector<std::size_t>> ks;
  for (std::size_t n : {500, 1000, 2000, 4000}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto net = build_network(n, seed, spec);
      const auto relays = RelayTable::build(net.deployment, net.tessellation, spec.relay, seed);
      const auto conns = pick_connections(net.deployment, seed);
      const auto routes = build_routes(conns, net.deployment, net.tessellation, relays, spec, seed);
      ScheduleSpec cons;
      cons.regime = Regime::conservative;
      cons.growth = "log";
      const auto s_fixed = build_schedule_for(net.tessellation, n, spec.schedule);
      const auto s_cons = build_schedule_for(net.tessellation, n, cons);
      ks[seed].push_back(s_cons.num_colors());
      for (const auto* s : {&s_fixed, &s_cons}) {
        EngineConfig cfg = saturated_mode(spec.engine);
        cfg.inject = false;
        cfg.warmup_slots = 0;
        cfg.drain_slots = 0;
        cfg.measure_slots = 20 * s->num_colors();
        cfg.trace = true;
        cfg.seed = seed;
        const auto m =
            run(net.deployment, net.tessellation, *s, routes, spec.link, spec.radio, cfg);
        auto& out = s == &s_fixed ? fixed_sinr[n] : cons_sinr[n];
        for (const auto& rec : m.trace) {
          if (rec.route != std::numeric_limits<std::uint32_t>::max()) {
            out.push_back(rec.sinr);
          }
        }
      }
    }
    const double pf = percentile(fixed_sinr[n], 0.05);
    const double pc = percentile(cons_sinr[n], 0.05);
    sinr_ok = sinr_ok && pc >= pf;
    parts += fmt(" n=%zu: p5 %.3g vs %.3g;", n, pc, pf);
  }
  std::string kline;
  for (const auto& [seed, v] : ks) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      monotone = monotone && v[i] >= v[i - 1];
    }
    kline += fmt(" s%llu:%zu-%zu", static_cast<unsigned long long>(seed), v.front(), v.back());
  }
  return {monotone && sinr_ok,
          fmt("K_n nondecreasing: %s (K at n=500..4000:%s); conservative vs fixed 5th-pct per-hop "
              "SINR:%s",
              monotone ? "yes" : "no", kline.c_str(), parts.c_str())};
}

Outcome c13_bound_calculator() {
  const double c0 = c0_constant(std::exp(-1.0));
  double worst = 0.0;
  for (double phi : {0.05, 0.3, 0.7, 0.95, 0.9999}) {
    for (double rho : {0.02, 0.0348, 0.063}) {
      for (std::size_t K : {12, 41}) {
        const double lambda = 0.003;
        const auto c = throughput_ceilings(rho, K, lambda, phi, 2000);
        // Stepwise: delta, then E[delta^L], then lambda E[delta^L].
        const double lp = std::log(phi);
        const double delta = std::pow(phi, 1.0 / (16.0 * rho));
        const double ld = std::log(delta);
        const double e = oracle::expected_delta_pow_L_simpson(delta, 200'000);
        const double e_closed =
            2.0 * kPi * (1.0 + std::pow(delta, std::sqrt(kPi) / 2.0)) / (4.0 * kPi + ld * ld);
        const double step = lambda * e_closed;
        const double direct = lambda * 512.0 * kPi * rho * rho *
                              (1.0 + std::pow(phi, std::sqrt(kPi) / (32.0 * rho))) /
                              (1024.0 * kPi * rho * rho + lp * lp);
        worst = std::max({worst, std::abs(c.Lambda_chain - step) / step,
                          std::abs(c.Lambda_direct - direct) / direct,
                          std::abs(c.Lambda_chain - c.Lambda_direct) / direct,
                          std::abs(e - e_closed) / e_closed > 1e-10 ? 1.0 : 0.0});
      }
    }
  }
  return {c0 == 4096.0 && worst <= 1e-12,
          fmt("c0(1/e) = %.17g; max relative gap chain vs stepwise %.3g <= 1e-12", c0, worst)};
}

Outcome c14_determinism() {
  auto spec = load_spec("sweep:\n  n: [250, 500]\n  seeds: 2\nengine:\n  measure_slots: 4000\n");
  const auto base = fs::temp_directory_path() / "hopcap_acceptance_determinism";
  fs::remove_all(base);
  spec.out_dir = base / "a";
  spec.workers = 1;
  run_sweep(spec);
  spec.out_dir = base / "b";
  spec.workers = 4;
  run_sweep(spec);
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(base / "a")) {
    if (e.path().extension() != ".csv") {
      continue;
    }
    std::ifstream fa(e.path(), std::ios::binary), fb(base / "b" / e.path().filename(),
                                                     std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    ++files;
    differ += sa.str() != sb.str() || sa.str().empty();
  }
  return {files >= 6 && differ == 0,
          fmt("%zu/%zu CSV files differ between two runs (1 vs 4 workers)", differ, files)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    only.insert(std::stoi(argv[i]));
  }
  const std::vector<Criterion> all{
      {1, "appendix closed form E[delta^L]", c01_appendix_closed_form},
      {2, "pair-distance law KS", c02_distance_law},
      {3, "cap-area sandwich", c03_cap_sandwich},
      {4, "A1 certificate", c04_a1_certificate},
      {5, "hop-count bounds (straight line)", c05_hop_count},
      {6, "short hops at t=0.05", c06_short_hops},
      {7, "no 40 consecutive short hops; n2", c07_consecutive_short_hops},
      {8, "interferer proximity (saturated)", c08_interferer_proximity},
      {9, "SINR-bounded hop fraction", c09_sinr_bounded_fraction},
      {10, "retransmission law", c10_retransmissions},
      {11, "geometric decay of delivery", c11_geometric_decay},
      {12, "conservative scheduling trade-off", c12_conservative_tradeoff},
      {13, "bound calculator exactness", c13_bound_calculator},
      {14, "determinism", c14_determinism},
  };
  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) {
      continue;
    }
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    ++ran;
    failed += !o.pass;
    std::printf("%s  %2d  %-36s %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
