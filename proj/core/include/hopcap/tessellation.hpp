#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hopcap/sphere.hpp"
#include "hopcap/sphere_index.hpp"

namespace hopcap {

using NodeId = std::uint32_t;
using CellId = std::uint32_t;

struct Deployment {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<SpherePoint> nodes;
};

// n i.i.d. uniform nodes, reproducible per seed. Throws ArgumentError for n < 2.
Deployment deploy(std::size_t n, std::uint64_t seed);

// Largest admissible cap area for the tessellation scale: keeps rho below
// sqrt(pi)/4 where the cap-area sandwich pi rho^2/2 <= area <= pi rho^2 holds.
inline constexpr double kMaxScaleArea = 0.5;
inline constexpr double kReferenceAreaConstant = 100.0;

// Smallest integer n >= 3 with area_constant * ln(n) / n <= 0.5.
std::size_t min_n_for_area_constant(double area_constant);

// Radius of the cap of area area_constant * ln(n) / n. Throws ConfigError
// (naming the minimum admissible n) when that area exceeds 0.5.
double rho_for_n(double n, double area_constant = kReferenceAreaConstant);

struct TessellationOptions {
  // Uniform candidate centers per unit of 1/cap_area(rho).
  double candidate_factor = 50.0;
  // Random points checked for coverage after the greedy pass.
  std::size_t maximality_probes = 10'000;
  // Density doublings attempted before giving up on maximality.
  int max_rebuilds = 6;
};

// Voronoi tessellation of the sphere generated by a 2*rho packing of centers.
// Immutable once built.
class Tessellation {
 public:
  // Assembles the tessellation from explicit centers: nodes go to their
  // nearest center, adjacency links centers within 4*rho.
  static Tessellation from_centers(std::vector<SpherePoint> centers, double rho,
                                   std::span<const SpherePoint> nodes);

  double rho() const noexcept { return rho_; }
  std::size_t num_cells() const noexcept { return centers_.size(); }
  std::size_t num_nodes() const noexcept { return cell_of_node_.size(); }

  const std::vector<SpherePoint>& centers() const noexcept { return centers_; }
  const SpherePoint& center(CellId c) const { return centers_.at(c); }
  CellId cell_of_node(NodeId v) const { return cell_of_node_.at(v); }
  const std::vector<CellId>& cell_of_node() const noexcept { return cell_of_node_; }
  const std::vector<NodeId>& nodes_in_cell(CellId c) const { return nodes_in_cell_.at(c); }
  // Sorted ascending, irreflexive, symmetric.
  const std::vector<CellId>& neighbors(CellId c) const { return adjacency_.at(c); }
  bool adjacent(CellId a, CellId b) const;

  // Cell whose center is nearest to p (Voronoi membership).
  CellId locate(const SpherePoint& p) const;
  double distance_to_nearest_center(const SpherePoint& p) const;
  const SphereIndex& center_index() const noexcept { return index_; }

  // Number of rebuilds needed before the maximality probes passed.
  int rebuilds() const noexcept { return rebuilds_; }

 private:
  friend Tessellation build_tessellation(const Deployment&, double, std::uint64_t,
                                         const TessellationOptions&);
  Tessellation(std::vector<SpherePoint> centers, double rho);

  double rho_ = 0.0;
  std::vector<SpherePoint> centers_;
  SphereIndex index_;
  std::vector<CellId> cell_of_node_;
  std::vector<std::vector<NodeId>> nodes_in_cell_;
  std::vector<std::vector<CellId>> adjacency_;
  int rebuilds_ = 0;
};

// Greedy maximal 2*rho-packing over a shuffled uniform candidate set, checked
// with random coverage probes (rebuilding denser on failure), followed by a
// pass that promotes any node farther than 2*rho from every center.
// Throws ConfigError when rho is too large for two centers to fit.
Tessellation build_tessellation(const Deployment& dep, double rho, std::uint64_t seed,
                                const TessellationOptions& options = {});

// Certificate for "every cell contains a disk of radius rho and lies in a
// disk of radius 2 rho". Packing and node covering are exact checks; sphere
// covering is probed with random points.
struct A1Certificate {
  double rho = 0.0;
  double min_center_distance = 0.0;
  double max_node_to_center = 0.0;
  std::size_t probes = 0;
  std::size_t uncovered_probes = 0;
  double max_probe_distance = 0.0;

  bool packing_ok() const { return min_center_distance >= 2.0 * rho; }
  bool covering_ok() const { return max_node_to_center <= 2.0 * rho; }
  bool maximal() const { return uncovered_probes == 0; }
  bool ok() const { return packing_ok() && covering_ok() && maximal(); }
};

A1Certificate certify_a1(const Tessellation& t, const Deployment& dep, std::size_t probes,
                         std::uint64_t seed);

struct Occupancy {
  std::size_t min_count = 0;
  std::size_t empty_cells = 0;
  CellId min_cell = 0;
  // High-probability floors: pi n rho^2 / 4 for any A1 tessellation, and
  // 50 ln n for the rho with cap area 100 ln n / n.
  double floor_pi_n_rho2 = 0.0;
  double floor_50_log_n = 0.0;
};

Occupancy min_cell_occupancy(const Tessellation& t, const Deployment& dep);

enum class EmptyCellPolicy { reject_deployment, error_on_route };

EmptyCellPolicy parse_empty_cell_policy(const std::string& s);
std::string to_string(EmptyCellPolicy p);

}  // namespace hopcap
