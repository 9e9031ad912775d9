#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hopcap/tessellation.hpp"

namespace hopcap {

// Schedule-length growth used by the conservative regime; must diverge.
class Growth {
 public:
  enum class Kind { sqrt_log, log, power };

  // "sqrt_log" | "log" | "pow:<eps>" (eps > 0). Anything else, including
  // "constant", is a ConfigError.
  static Growth parse(const std::string& id);
  static Growth sqrt_log() { return Growth(Kind::sqrt_log, 0.0); }
  static Growth log() { return Growth(Kind::log, 0.0); }
  static Growth power(double eps);

  double operator()(double n) const;
  Kind kind() const noexcept { return kind_; }
  std::string id() const;

 private:
  Growth(Kind k, double eps) : kind_(k), eps_(eps) {}
  Kind kind_;
  double eps_;
};

enum class Regime { fixed, conservative };

inline constexpr double kDefaultConflictMultiplier = 12.0;
inline constexpr double kMinConflictMultiplier = 4.0;

// Cyclic TDMA schedule from a proper coloring of the cell conflict graph
// {(A, B) : dist(center_A, center_B) <= delta * rho}. Cell c transmits in
// slots s with s mod K == color(c).
class Schedule {
 public:
  std::size_t num_colors() const noexcept { return num_colors_; }
  // Colors actually assigned; equals num_colors() unless padded.
  std::size_t colors_used() const noexcept { return colors_used_; }
  double delta() const noexcept { return delta_; }
  Regime regime() const noexcept { return regime_; }
  // Growth id for the conservative regime, empty for fixed.
  const std::string& growth() const noexcept { return growth_; }

  std::size_t color_of_cell(CellId c) const { return color_.at(c); }
  const std::vector<std::size_t>& colors() const noexcept { return color_; }

  // Cells scheduled in `slot` (ascending ids).
  std::span<const CellId> active_cells(std::uint64_t slot) const;

  // Re-checks that no two conflicting cells share a color.
  bool proper(const Tessellation& t) const;

  // Builds a schedule from explicit colors (used by import and tests).
  static Schedule from_colors(std::vector<std::size_t> colors, std::size_t num_colors,
                              double delta, Regime regime, std::string growth = {});

 private:
  std::vector<std::size_t> color_;
  std::vector<std::vector<CellId>> classes_;
  std::size_t num_colors_ = 0;
  std::size_t colors_used_ = 0;
  double delta_ = kDefaultConflictMultiplier;
  Regime regime_ = Regime::fixed;
  std::string growth_;
};

// Conflict graph adjacency lists for multiplier delta (sorted ids).
std::vector<std::vector<CellId>> conflict_graph(const Tessellation& t, double delta);

// Greedy coloring, cells in descending conflict degree (ties by id), each
// taking the smallest color unused by already-colored conflicting cells.
// With `balance`, no color class is left with a single cell when a
// conflict-free move can fix it (a lone cell has no concurrent transmitter).
// Throws ConfigError for delta < 4.
Schedule build_schedule(const Tessellation& t, double delta = kDefaultConflictMultiplier,
                        bool balance = true);

// Conservative regime: conflict multiplier 12 * growth(n), so spatial reuse
// shrinks as n grows. With `pad_to_k`, the fixed-delta coloring is used and
// idle colors are appended up to that length instead (ablation mode).
Schedule build_conservative_schedule(const Tessellation& t, double n, const Growth& growth,
                                     std::optional<std::size_t> pad_to_k = std::nullopt,
                                     bool balance = true);

// Disjoint in-disk packing bound on the greedy color count:
// ceil(cap_area((delta + 4) rho) / cap_area(rho)), radius clamped to the sphere.
std::size_t packing_color_bound(double rho, double delta);

std::string to_string(Regime r);

}  // namespace hopcap
