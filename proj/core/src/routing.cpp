#include "hopcap/routing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "hopcap/error.hpp"
#include "hopcap/random.hpp"

namespace hopcap {

std::vector<Connection> pick_connections(const Deployment& dep, std::uint64_t seed) {
  const std::size_t n = dep.nodes.size();
  if (n < 2) {
    throw ArgumentError("pick_connections: need at least 2 nodes");
  }
  Rng rng = make_rng(seed, Stream::connections);
  std::uniform_int_distribution<std::size_t> pick(0, n - 2);
  std::vector<Connection> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = pick(rng);
    if (j >= i) {
      ++j;
    }
    const auto src = static_cast<NodeId>(i);
    const auto dst = static_cast<NodeId>(j);
    out.push_back({static_cast<ConnectionId>(i), src, dst,
                   surface_distance(dep.nodes[src], dep.nodes[dst])});
  }
  return out;
}

RelayTable RelayTable::build(const Deployment& dep, const Tessellation& t, RelayPolicy policy,
                             std::uint64_t seed) {
  RelayTable table;
  table.policy_ = policy;
  table.relay_.assign(t.num_cells(), kNone);
  Rng rng = make_rng(seed, Stream::relays);
  for (CellId c = 0; c < t.num_cells(); ++c) {
    const auto& members = t.nodes_in_cell(c);
    if (members.empty()) {
      continue;
    }
    if (policy == RelayPolicy::random_in_cell) {
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      table.relay_[c] = members[pick(rng)];
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (NodeId v : members) {
      const double d = surface_distance(dep.nodes[v], t.center(c));
      if (d < best) {
        best = d;
        table.relay_[c] = v;
      }
    }
  }
  return table;
}

NodeId RelayTable::relay(CellId c) const {
  const NodeId v = relay_.at(c);
  if (v == kNone) {
    throw RoutingError("cell " + std::to_string(c) + " has no node to relay", c);
  }
  return v;
}

namespace {

constexpr double kAntipodalSlack = 1e-12;

void require_not_antipodal(const SpherePoint& a, const SpherePoint& b) {
  if (kPi - central_angle(a, b) < kAntipodalSlack) {
    throw GeometryError("route endpoints are antipodal: the geodesic is not unique");
  }
}

bool well_formed(const std::vector<CellId>& cells, const Tessellation& t) {
  std::unordered_set<CellId> seen;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!seen.insert(cells[k]).second) {
      return false;
    }
    if (k > 0 && !t.adjacent(cells[k - 1], cells[k])) {
      return false;
    }
  }
  return true;
}

// Walk from bisector to bisector; returns false if the walk does not end in
// the cell that contains b.
bool exact_traversal(const SpherePoint& a, const SpherePoint& b, const Tessellation& t,
                     std::vector<CellId>& out) {
  const Vec3 u = a.direction();
  const double theta_total = central_angle(a, b);
  CellId current = t.locate(a);
  const CellId target = t.locate(b);
  out.assign(1, current);
  if (theta_total == 0.0) {
    return current == target;
  }
  const Vec3 v = SpherePoint::from_direction(b.direction() - dot(u, b.direction()) * u).direction();

  std::unordered_set<CellId> visited{current};
  double theta = 0.0;
  for (;;) {
    double exit_theta = theta_total;
    CellId next = current;
    const Vec3 ca = t.center(current).direction();
    for (CellId nb : t.neighbors(current)) {
      if (visited.count(nb) != 0) {
        continue;
      }
      // f(s) = w . x(s) = R cos(s - phase); the arc leaves `current` for `nb`
      // where f crosses zero going negative.
      const Vec3 w = ca - t.center(nb).direction();
      const double p = dot(w, u);
      const double q = dot(w, v);
      const double phase = std::atan2(q, p);
      double zero = phase + 0.5 * kPi;
      zero += 2.0 * kPi * std::ceil((theta - zero) / (2.0 * kPi));
      if (zero - 2.0 * kPi >= theta - 1e-12) {
        zero -= 2.0 * kPi;
      }
      zero = std::max(zero, theta);
      if (zero < exit_theta) {
        exit_theta = zero;
        next = nb;
      }
    }
    if (next == current) {
      break;
    }
    current = next;
    theta = exit_theta;
    visited.insert(current);
    out.push_back(current);
  }
  return current == target;
}

std::vector<CellId> sampled_with_refinement(const SpherePoint& a, const SpherePoint& b,
                                            const Tessellation& t) {
  double step = t.rho() / 10.0;
  for (int halving = 0; halving < 8; ++halving, step *= 0.5) {
    auto cells = sample_geodesic_cells(a, b, t, step);
    if (well_formed(cells, t)) {
      return cells;
    }
  }
  throw RoutingError("geodesic traversal did not produce an adjacent, loop-free cell sequence");
}

}  // namespace

std::vector<CellId> traverse_geodesic(const SpherePoint& a, const SpherePoint& b,
                                      const Tessellation& t) {
  require_not_antipodal(a, b);
  std::vector<CellId> cells;
  if (exact_traversal(a, b, t, cells) && well_formed(cells, t)) {
    return cells;
  }
  return sampled_with_refinement(a, b, t);
}

std::vector<CellId> sample_geodesic_cells(const SpherePoint& a, const SpherePoint& b,
                                          const Tessellation& t, double step) {
  require_not_antipodal(a, b);
  if (!(step > 0.0)) {
    throw ArgumentError("sample_geodesic_cells: step must be positive");
  }
  const double d = surface_distance(a, b);
  const auto steps = static_cast<std::size_t>(std::ceil(d / step));
  std::vector<CellId> cells{t.locate(a)};
  for (std::size_t k = 1; k <= steps; ++k) {
    const double s = std::min(static_cast<double>(k) * step, d);
    const CellId c = t.locate(geodesic_point(a, b, s));
    if (c != cells.back()) {
      cells.push_back(c);
    }
  }
  return cells;
}

Route route_from_cells(const Connection& c, std::vector<CellId> cells, const Deployment& dep,
                       const Tessellation& t, const RelayTable& relays) {
  if (cells.empty()) {
    throw RoutingError("empty cell sequence");
  }
  Route r;
  r.connection = c.id;
  r.geodesic_length = c.length;
  r.cells = std::move(cells);
  r.relays.reserve(std::max<std::size_t>(r.cells.size(), 2));
  r.relays.push_back(c.source);
  for (std::size_t k = 1; k + 1 < r.cells.size(); ++k) {
    r.relays.push_back(relays.relay(r.cells[k]));
  }
  r.relays.push_back(c.destination);

  const auto hop = [&](std::size_t from, std::size_t to, CellId tx_cell, CellId rx_cell) {
    const NodeId tx = r.relays[from];
    const NodeId rx = r.relays[to];
    const double len = surface_distance(dep.nodes[tx], dep.nodes[rx]);
    r.hops.push_back({tx, rx, tx_cell, rx_cell, len});
    r.path_length += len;
  };
  if (r.cells.size() == 1) {
    hop(0, 1, r.cells[0], r.cells[0]);
  } else {
    for (std::size_t k = 0; k + 1 < r.cells.size(); ++k) {
      hop(k, k + 1, r.cells[k], r.cells[k + 1]);
    }
  }
  (void)t;
  return r;
}

Route straight_line_route(const Connection& c, const Deployment& dep, const Tessellation& t,
                          const RelayTable& relays) {
  auto cells = traverse_geodesic(dep.nodes[c.source], dep.nodes[c.destination], t);
  return route_from_cells(c, std::move(cells), dep, t, relays);
}

RouteStrategy RouteStrategy::parse(const std::string& id) {
  RouteStrategy s;
  if (id == "straight_line") {
    s.kind = Kind::straight_line;
  } else if (id == "shortest_cell_path") {
    s.kind = Kind::shortest_cell_path;
  } else if (id == "random_walk_loop_erased") {
    s.kind = Kind::loop_erased_walk;
  } else if (id == "detour" || id.rfind("detour:", 0) == 0) {
    s.kind = Kind::detour;
    if (id.size() > 7) {
      try {
        s.kappa = std::stod(id.substr(7));
      } catch (const std::exception&) {
        throw ConfigError("route strategy '" + id + "': kappa is not a number");
      }
    }
    if (!(s.kappa >= 1.0)) {
      throw ConfigError("route strategy '" + id + "': kappa must be >= 1");
    }
  } else {
    throw ConfigError("unknown route strategy '" + id + "'");
  }
  return s;
}

std::string RouteStrategy::id() const {
  switch (kind) {
    case Kind::straight_line:
      return "straight_line";
    case Kind::shortest_cell_path:
      return "shortest_cell_path";
    case Kind::loop_erased_walk:
      return "random_walk_loop_erased";
    case Kind::detour: {
      std::string k = std::to_string(kappa);
      k.erase(k.find_last_not_of('0') + 1);
      if (!k.empty() && k.back() == '.') {
        k.pop_back();
      }
      return "detour:" + k;
    }
  }
  return {};
}

std::vector<CellId> shortest_cell_path(CellId from, CellId to, const Tessellation& t,
                                       const RelayTable& relays) {
  constexpr CellId kUnseen = static_cast<CellId>(-1);
  std::vector<CellId> parent(t.num_cells(), kUnseen);
  std::deque<CellId> queue{from};
  parent[from] = from;
  while (!queue.empty() && parent[to] == kUnseen) {
    const CellId c = queue.front();
    queue.pop_front();
    for (CellId nb : t.neighbors(c)) {
      if (parent[nb] != kUnseen || (nb != to && !relays.has_relay(nb))) {
        continue;
      }
      parent[nb] = c;
      queue.push_back(nb);
    }
  }
  if (parent[to] == kUnseen) {
    throw RoutingError("no relay-capable cell path from cell " + std::to_string(from) +
                       " to cell " + std::to_string(to));
  }
  std::vector<CellId> path{to};
  while (path.back() != from) {
    path.push_back(parent[path.back()]);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

// Removes cycles in visiting order, keeping the first arrival at each cell
// and the path after the last departure.
std::vector<CellId> loop_erase(const std::vector<CellId>& walk) {
  std::vector<CellId> path;
  std::unordered_map<CellId, std::size_t> position;
  for (CellId c : walk) {
    auto it = position.find(c);
    if (it != position.end()) {
      for (std::size_t k = it->second + 1; k < path.size(); ++k) {
        position.erase(path[k]);
      }
      path.resize(it->second + 1);
      continue;
    }
    position[c] = path.size();
    path.push_back(c);
  }
  return path;
}

std::vector<CellId> loop_erased_walk(CellId from, CellId to, const Tessellation& t,
                                     const RelayTable& relays, Rng& rng) {
  // Generous cap: cover time of the adjacency graph is O(C^2) at worst here.
  const std::size_t cap = 1000 * t.num_cells() * t.num_cells() + 1000;
  std::vector<CellId> walk{from};
  std::vector<CellId> options;
  CellId c = from;
  for (std::size_t step = 0; c != to; ++step) {
    if (step > cap) {
      throw RoutingError("random walk did not reach the destination cell", to);
    }
    options.clear();
    for (CellId nb : t.neighbors(c)) {
      if (nb == to || relays.has_relay(nb)) {
        options.push_back(nb);
      }
    }
    if (options.empty()) {
      throw RoutingError("random walk stuck at cell " + std::to_string(c), c);
    }
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    c = options[pick(rng)];
    walk.push_back(c);
  }
  return loop_erase(walk);
}

}  // namespace

Route arbitrary_route(const Connection& c, const Deployment& dep, const Tessellation& t,
                      const RelayTable& relays, const RouteStrategy& strategy,
                      std::uint64_t seed) {
  const CellId from = t.cell_of_node(c.source);
  const CellId to = t.cell_of_node(c.destination);
  Rng rng = make_rng(seed, Stream::routing, c.id);
  switch (strategy.kind) {
    case RouteStrategy::Kind::straight_line:
      return straight_line_route(c, dep, t, relays);
    case RouteStrategy::Kind::shortest_cell_path:
      return route_from_cells(c, shortest_cell_path(from, to, t, relays), dep, t, relays);
    case RouteStrategy::Kind::loop_erased_walk:
      return route_from_cells(c, loop_erased_walk(from, to, t, relays, rng), dep, t, relays);
    case RouteStrategy::Kind::detour:
      break;
  }

  // Detour: splice a BFS path through a cell next to the shortest path and
  // keep it if its length stays within kappa times the shortest path's.
  const auto base_cells = shortest_cell_path(from, to, t, relays);
  Route base = route_from_cells(c, base_cells, dep, t, relays);
  constexpr int kAttempts = 16;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::uniform_int_distribution<std::size_t> pick_on_path(0, base_cells.size() - 1);
    const CellId anchor = base_cells[pick_on_path(rng)];
    std::vector<CellId> off_path;
    for (CellId nb : t.neighbors(anchor)) {
      if (relays.has_relay(nb) &&
          std::find(base_cells.begin(), base_cells.end(), nb) == base_cells.end()) {
        off_path.push_back(nb);
      }
    }
    if (off_path.empty()) {
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick_mid(0, off_path.size() - 1);
    const CellId mid = off_path[pick_mid(rng)];
    auto walk = shortest_cell_path(from, mid, t, relays);
    const auto tail = shortest_cell_path(mid, to, t, relays);
    walk.insert(walk.end(), tail.begin() + 1, tail.end());
    Route candidate = route_from_cells(c, loop_erase(walk), dep, t, relays);
    if (candidate.cells != base.cells &&
        candidate.path_length <= strategy.kappa * base.path_length) {
      return candidate;
    }
  }
  return base;
}

RouteCheck check_route(const Route& r, const Tessellation& t) {
  RouteCheck check;
  std::unordered_set<CellId> seen;
  for (std::size_t k = 0; k < r.cells.size(); ++k) {
    if (!seen.insert(r.cells[k]).second) {
      check.loop_free = false;
    }
    if (k > 0 && !t.adjacent(r.cells[k - 1], r.cells[k])) {
      check.adjacent_hops = false;
    }
  }
  for (const Hop& h : r.hops) {
    if (h.length > 8.0 * t.rho()) {
      check.hop_lengths_ok = false;
    }
  }
  check.length_ok = r.path_length >= r.geodesic_length * (1.0 - 1e-12);
  return check;
}

std::string to_string(RelayPolicy p) {
  return p == RelayPolicy::nearest_center ? "nearest_center" : "random_in_cell";
}

RelayPolicy parse_relay_policy(const std::string& s) {
  if (s == "nearest_center") {
    return RelayPolicy::nearest_center;
  }
  if (s == "random_in_cell") {
    return RelayPolicy::random_in_cell;
  }
  throw ConfigError("unknown relay policy '" + s + "'");
}

}  // namespace hopcap
