#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hopcap/tessellation.hpp"

namespace hopcap {

using ConnectionId = std::uint32_t;

struct Connection {
  ConnectionId id = 0;
  NodeId source = 0;
  NodeId destination = 0;
  // Surface length of the source-destination geodesic.
  double length = 0.0;
};

// One connection per node; destination uniform over the other nodes.
std::vector<Connection> pick_connections(const Deployment& dep, std::uint64_t seed);

struct Hop {
  NodeId tx = 0;
  NodeId rx = 0;
  CellId tx_cell = 0;
  CellId rx_cell = 0;
  double length = 0.0;
};

// A relay path. cells[k] hosts relays[k]; relays.front() is the source and
// relays.back() the destination. A connection inside a single cell is one
// direct hop (cells = {c}, relays = {src, dst}).
struct Route {
  ConnectionId connection = 0;
  std::vector<CellId> cells;
  std::vector<NodeId> relays;
  std::vector<Hop> hops;
  double geodesic_length = 0.0;  // L_i
  double path_length = 0.0;      // sum of hop lengths

  std::size_t hop_count() const noexcept { return hops.size(); }
};

enum class RelayPolicy { nearest_center, random_in_cell };

// The node that relays for each cell. Empty cells have no relay.
class RelayTable {
 public:
  static RelayTable build(const Deployment& dep, const Tessellation& t, RelayPolicy policy,
                          std::uint64_t seed = 0);
  bool has_relay(CellId c) const { return relay_.at(c) != kNone; }
  NodeId relay(CellId c) const;
  RelayPolicy policy() const noexcept { return policy_; }

 private:
  static constexpr NodeId kNone = static_cast<NodeId>(-1);
  std::vector<NodeId> relay_;
  RelayPolicy policy_ = RelayPolicy::nearest_center;
};

// Cells whose Voronoi region the minor arc a->b crosses, in order. Walks the
// arc from bisector to bisector: inside cell A the exit is the first zero of
// (c_A - c_B) . x(theta) over the neighbors B. Throws GeometryError for
// antipodal endpoints.
std::vector<CellId> traverse_geodesic(const SpherePoint& a, const SpherePoint& b,
                                      const Tessellation& t);

// Same sequence found by sampling the arc every `step` (surface length) and
// recording nearest-center changes. Can miss cells clipped for less than a step.
std::vector<CellId> sample_geodesic_cells(const SpherePoint& a, const SpherePoint& b,
                                          const Tessellation& t, double step);

// Assembles relays and hops for a cell sequence. Throws RoutingError when an
// intermediate cell has no relay.
Route route_from_cells(const Connection& c, std::vector<CellId> cells, const Deployment& dep,
                       const Tessellation& t, const RelayTable& relays);

// Every cell crossed by the source-destination geodesic relays the packet.
Route straight_line_route(const Connection& c, const Deployment& dep, const Tessellation& t,
                          const RelayTable& relays);

struct RouteStrategy {
  enum class Kind { straight_line, shortest_cell_path, loop_erased_walk, detour };
  Kind kind = Kind::straight_line;
  double kappa = 2.0;  // detour length budget relative to the shortest cell path

  // "straight_line" | "shortest_cell_path" | "random_walk_loop_erased" | "detour:<kappa>"
  static RouteStrategy parse(const std::string& id);
  std::string id() const;
};

// Routes obeying "hops only between adjacent cells" and "no cell revisited".
// Throws RoutingError when no such path exists among relay-capable cells.
Route arbitrary_route(const Connection& c, const Deployment& dep, const Tessellation& t,
                      const RelayTable& relays, const RouteStrategy& strategy,
                      std::uint64_t seed);

// Hop-count-minimal cell path (BFS, neighbors in ascending id order).
std::vector<CellId> shortest_cell_path(CellId from, CellId to, const Tessellation& t,
                                       const RelayTable& relays);

struct RouteCheck {
  bool adjacent_hops = true;   // consecutive cells adjacent
  bool loop_free = true;       // no repeated cell
  bool hop_lengths_ok = true;  // every hop <= 8 rho
  bool length_ok = true;       // path length >= geodesic length
  bool ok() const { return adjacent_hops && loop_free && hop_lengths_ok && length_ok; }
};

RouteCheck check_route(const Route& r, const Tessellation& t);

std::string to_string(RelayPolicy p);
RelayPolicy parse_relay_policy(const std::string& s);

}  // namespace hopcap
