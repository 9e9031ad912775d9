#include "hopcap/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hopcap/error.hpp"
#include "hopcap/random.hpp"

namespace hopcap {

Deployment deploy(std::size_t n, std::uint64_t seed) {
  if (n < 2) {
    throw ArgumentError("deploy: need at least 2 nodes, got " + std::to_string(n));
  }
  Deployment dep;
  dep.n = n;
  dep.seed = seed;
  dep.nodes.reserve(n);
  Rng rng = make_rng(seed, Stream::deployment);
  for (std::size_t i = 0; i < n; ++i) {
    dep.nodes.push_back(random_point(rng));
  }
  return dep;
}

std::size_t min_n_for_area_constant(double area_constant) {
  if (!(area_constant > 0.0)) {
    throw ConfigError("area_constant must be positive");
  }
  // c ln(n) / n is decreasing for n > e; bisect the crossing of 0.5.
  auto excess = [&](double n) { return area_constant * std::log(n) / n - kMaxScaleArea; };
  if (excess(3.0) <= 0.0) {
    return 3;
  }
  double lo = 3.0;
  double hi = 4.0;
  while (excess(hi) > 0.0) {
    hi *= 2.0;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  auto n = static_cast<std::size_t>(std::ceil(lo));
  while (excess(static_cast<double>(n)) > 0.0) {
    ++n;
  }
  return n;
}

double rho_for_n(double n, double area_constant) {
  if (!(area_constant > 0.0)) {
    throw ConfigError("rho_for_n: area_constant must be positive");
  }
  if (!(n > 1.0)) {
    throw ConfigError("rho_for_n: n must exceed 1");
  }
  const double area = area_constant * std::log(n) / n;
  if (area > kMaxScaleArea) {
    throw ConfigError("rho_for_n: area_constant " + std::to_string(area_constant) +
                      " gives cap area " + std::to_string(area) + " > 0.5 at n = " +
                      std::to_string(n) + "; minimum n is " +
                      std::to_string(min_n_for_area_constant(area_constant)));
  }
  return rho_for_area(area);
}

Tessellation::Tessellation(std::vector<SpherePoint> centers, double rho)
    : rho_(rho), centers_(std::move(centers)), index_(2.0 * rho) {
  for (const auto& c : centers_) {
    index_.insert(c);
  }
  adjacency_.resize(centers_.size());
  for (CellId a = 0; a < centers_.size(); ++a) {
    for (std::uint32_t b : index_.within(centers_[a], 4.0 * rho_)) {
      if (b != a) {
        adjacency_[a].push_back(b);
      }
    }
  }
}

Tessellation Tessellation::from_centers(std::vector<SpherePoint> centers, double rho,
                                        std::span<const SpherePoint> nodes) {
  if (centers.empty()) {
    throw ConfigError("tessellation needs at least one center");
  }
  if (!(rho > 0.0)) {
    throw ConfigError("tessellation rho must be positive");
  }
  Tessellation t(std::move(centers), rho);
  t.cell_of_node_.resize(nodes.size());
  t.nodes_in_cell_.assign(t.centers_.size(), {});
  for (NodeId v = 0; v < nodes.size(); ++v) {
    const CellId c = t.locate(nodes[v]);
    t.cell_of_node_[v] = c;
    t.nodes_in_cell_[c].push_back(v);
  }
  return t;
}

bool Tessellation::adjacent(CellId a, CellId b) const {
  const auto& nb = adjacency_.at(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

CellId Tessellation::locate(const SpherePoint& p) const { return index_.nearest(p)->id; }

double Tessellation::distance_to_nearest_center(const SpherePoint& p) const {
  return index_.nearest(p)->distance;
}

namespace {

std::vector<SpherePoint> greedy_packing(double rho, std::size_t candidates, Rng& rng) {
  std::vector<SpherePoint> pool;
  pool.reserve(candidates);
  for (std::size_t i = 0; i < candidates; ++i) {
    pool.push_back(random_point(rng));
  }
  std::shuffle(pool.begin(), pool.end(), rng);

  SphereIndex accepted(2.0 * rho);
  std::vector<SpherePoint> centers;
  for (const auto& p : pool) {
    if (!accepted.any_closer_than(p, 2.0 * rho)) {
      accepted.insert(p);
      centers.push_back(p);
    }
  }
  return centers;
}

// Fills every gap left by the greedy pass. The deepest point of an uncovered
// region is a spherical Voronoi vertex: the circumcenter of three centers at
// most 2R apart, R being its distance to them. Gaps deeper than 4 rho would
// need an empty disk of radius 2 rho among the candidates, so triples within
// 8 rho suffice. Each uncovered vertex becomes a center (it is farther than
// 2 rho from all of them) until none is left.
void fill_voronoi_gaps(std::vector<SpherePoint>& centers, double rho) {
  SphereIndex index(2.0 * rho);
  for (const auto& c : centers) {
    index.insert(c);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::uint32_t a = 0; a < index.size(); ++a) {
      const Vec3 pa = index.point(a).direction();
      std::vector<std::uint32_t> near;
      for (std::uint32_t b : index.within(index.point(a), 8.0 * rho)) {
        if (b > a) {
          near.push_back(b);
        }
      }
      for (std::size_t j = 0; j < near.size(); ++j) {
        const Vec3 pb = index.point(near[j]).direction();
        for (std::size_t k = j + 1; k < near.size(); ++k) {
          if (surface_distance(index.point(near[j]), index.point(near[k])) > 8.0 * rho) {
            continue;
          }
          const Vec3 pc = index.point(near[k]).direction();
          const Vec3 normal = cross(pb - pa, pc - pa);
          if (!(norm(normal) > 1e-300)) {
            continue;
          }
          for (double sign : {1.0, -1.0}) {
            const SpherePoint v = SpherePoint::from_direction(sign * normal);
            if (index.nearest(v)->distance > 2.0 * rho) {
              index.insert(v);
              centers.push_back(v);
              changed = true;
            }
          }
        }
      }
    }
  }
}

bool probes_covered(const std::vector<SpherePoint>& centers, double rho, std::size_t probes,
                    Rng& rng) {
  SphereIndex index(2.0 * rho);
  for (const auto& c : centers) {
    index.insert(c);
  }
  for (std::size_t i = 0; i < probes; ++i) {
    if (index.nearest(random_point(rng))->distance > 2.0 * rho) {
      return false;
    }
  }
  return true;
}

}  // namespace

Tessellation build_tessellation(const Deployment& dep, double rho, std::uint64_t seed,
                                const TessellationOptions& options) {
  if (!(rho > 0.0) || !(2.0 * rho < kMaxSurfaceDistance * (1.0 - 1e-12))) {
    throw ConfigError("build_tessellation: rho " + std::to_string(rho) +
                      " must satisfy 0 < 2 rho < sqrt(pi)/2");
  }
  const double base = options.candidate_factor / cap_area(rho);
  std::vector<SpherePoint> centers;
  int rebuild = 0;
  for (;; ++rebuild) {
    if (rebuild > options.max_rebuilds) {
      throw ConfigError("build_tessellation: packing still not maximal after " +
                        std::to_string(options.max_rebuilds) + " density doublings");
    }
    const auto count = static_cast<std::size_t>(std::ceil(base * std::ldexp(1.0, rebuild)));
    Rng candidates = make_rng(seed, Stream::tessellation_candidates, rebuild);
    centers = greedy_packing(rho, count, candidates);
    fill_voronoi_gaps(centers, rho);
    Rng probes = make_rng(seed, Stream::tessellation_probes, rebuild);
    if (probes_covered(centers, rho, options.maximality_probes, probes)) {
      break;
    }
  }

  // Belt and braces for nodes: any node still farther than 2 rho from every
  // center becomes one (packing is preserved).
  SphereIndex index(2.0 * rho);
  for (const auto& c : centers) {
    index.insert(c);
  }
  for (const auto& v : dep.nodes) {
    if (index.nearest(v)->distance > 2.0 * rho) {
      index.insert(v);
      centers.push_back(v);
    }
  }

  Tessellation t = Tessellation::from_centers(std::move(centers), rho, dep.nodes);
  t.rebuilds_ = rebuild;
  return t;
}

A1Certificate certify_a1(const Tessellation& t, const Deployment& dep, std::size_t probes,
                         std::uint64_t seed) {
  A1Certificate cert;
  cert.rho = t.rho();
  cert.min_center_distance = std::numeric_limits<double>::infinity();
  const auto& centers = t.centers();
  const auto& index = t.center_index();
  for (CellId a = 0; a < centers.size(); ++a) {
    // Anything closer than 4 rho is found by the radius query; beyond that the
    // packing inequality cannot be the binding one.
    index.for_each_within(centers[a], 4.0 * t.rho(), [&](std::uint32_t b, double d) {
      if (b != a) {
        cert.min_center_distance = std::min(cert.min_center_distance, d);
      }
    });
  }
  for (NodeId v = 0; v < dep.nodes.size(); ++v) {
    const double d = surface_distance(dep.nodes[v], t.center(t.cell_of_node(v)));
    cert.max_node_to_center = std::max(cert.max_node_to_center, d);
  }
  Rng rng = make_rng(seed, Stream::certificate);
  cert.probes = probes;
  for (std::size_t i = 0; i < probes; ++i) {
    const double d = t.distance_to_nearest_center(random_point(rng));
    cert.max_probe_distance = std::max(cert.max_probe_distance, d);
    if (d > 2.0 * t.rho()) {
      ++cert.uncovered_probes;
    }
  }
  return cert;
}

Occupancy min_cell_occupancy(const Tessellation& t, const Deployment& dep) {
  Occupancy occ;
  occ.min_count = std::numeric_limits<std::size_t>::max();
  for (CellId c = 0; c < t.num_cells(); ++c) {
    const std::size_t k = t.nodes_in_cell(c).size();
    if (k == 0) {
      ++occ.empty_cells;
    }
    if (k < occ.min_count) {
      occ.min_count = k;
      occ.min_cell = c;
    }
  }
  const double n = static_cast<double>(dep.n);
  occ.floor_pi_n_rho2 = kPi * n * t.rho() * t.rho() / 4.0;
  occ.floor_50_log_n = 50.0 * std::log(n);
  return occ;
}

EmptyCellPolicy parse_empty_cell_policy(const std::string& s) {
  if (s == "reject_deployment") {
    return EmptyCellPolicy::reject_deployment;
  }
  if (s == "error_on_route") {
    return EmptyCellPolicy::error_on_route;
  }
  throw ConfigError("unknown on_empty_cell policy '" + s + "'");
}

std::string to_string(EmptyCellPolicy p) {
  return p == EmptyCellPolicy::reject_deployment ? "reject_deployment" : "error_on_route";
}

}  // namespace hopcap
