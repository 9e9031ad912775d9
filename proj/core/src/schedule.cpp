#include "hopcap/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hopcap/error.hpp"

namespace hopcap {

Growth Growth::power(double eps) {
  if (!(eps > 0.0)) {
    throw ConfigError("growth pow(eps) needs eps > 0");
  }
  return Growth(Kind::power, eps);
}

Growth Growth::parse(const std::string& id) {
  if (id == "sqrt_log") {
    return sqrt_log();
  }
  if (id == "log") {
    return log();
  }
  if (id.rfind("pow:", 0) == 0) {
    try {
      return power(std::stod(id.substr(4)));
    } catch (const std::invalid_argument&) {
      throw ConfigError("growth '" + id + "': exponent is not a number");
    }
  }
  throw ConfigError("growth '" + id +
                    "' is not a diverging growth function (sqrt_log | log | pow:<eps>)");
}

double Growth::operator()(double n) const {
  switch (kind_) {
    case Kind::sqrt_log:
      return std::sqrt(std::log(n));
    case Kind::log:
      return std::log(n);
    case Kind::power:
      return std::pow(n, eps_);
  }
  return 0.0;
}

std::string Growth::id() const {
  switch (kind_) {
    case Kind::sqrt_log:
      return "sqrt_log";
    case Kind::log:
      return "log";
    case Kind::power: {
      std::string s = std::to_string(eps_);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') {
        s.pop_back();
      }
      return "pow:" + s;
    }
  }
  return {};
}

std::span<const CellId> Schedule::active_cells(std::uint64_t slot) const {
  if (num_colors_ == 0) {
    return {};
  }
  return classes_[slot % num_colors_];
}

Schedule Schedule::from_colors(std::vector<std::size_t> colors, std::size_t num_colors,
                               double delta, Regime regime, std::string growth) {
  Schedule s;
  s.color_ = std::move(colors);
  s.colors_used_ = s.color_.empty() ? 0 : *std::max_element(s.color_.begin(), s.color_.end()) + 1;
  s.num_colors_ = std::max(num_colors, s.colors_used_);
  s.delta_ = delta;
  s.regime_ = regime;
  s.growth_ = std::move(growth);
  s.classes_.assign(s.num_colors_, {});
  for (CellId c = 0; c < s.color_.size(); ++c) {
    s.classes_[s.color_[c]].push_back(c);
  }
  return s;
}

bool Schedule::proper(const Tessellation& t) const {
  if (color_.size() != t.num_cells()) {
    return false;
  }
  const auto graph = conflict_graph(t, delta_);
  for (CellId a = 0; a < graph.size(); ++a) {
    if (color_[a] >= num_colors_) {
      return false;
    }
    for (CellId b : graph[a]) {
      if (color_[a] == color_[b]) {
        return false;
      }
    }
  }
  return true;
}

std::vector<std::vector<CellId>> conflict_graph(const Tessellation& t, double delta) {
  const double radius = delta * t.rho();
  std::vector<std::vector<CellId>> graph(t.num_cells());
  for (CellId a = 0; a < t.num_cells(); ++a) {
    for (std::uint32_t b : t.center_index().within(t.center(a), radius)) {
      if (b != a) {
        graph[a].push_back(b);
      }
    }
  }
  return graph;
}

namespace {

std::vector<std::size_t> greedy_coloring(const std::vector<std::vector<CellId>>& graph) {
  std::vector<CellId> order(graph.size());
  std::iota(order.begin(), order.end(), CellId{0});
  std::stable_sort(order.begin(), order.end(), [&](CellId a, CellId b) {
    return graph[a].size() > graph[b].size();
  });
  constexpr std::size_t kUncolored = static_cast<std::size_t>(-1);
  std::vector<std::size_t> color(graph.size(), kUncolored);
  std::vector<char> taken;
  for (CellId c : order) {
    taken.assign(graph[c].size() + 1, 0);
    for (CellId nb : graph[c]) {
      if (color[nb] != kUncolored && color[nb] < taken.size()) {
        taken[color[nb]] = 1;
      }
    }
    color[c] = static_cast<std::size_t>(std::find(taken.begin(), taken.end(), 0) - taken.begin());
  }
  return color;
}

bool compatible(const std::vector<std::vector<CellId>>& graph, CellId c,
                const std::vector<CellId>& members) {
  for (CellId m : members) {
    if (std::binary_search(graph[c].begin(), graph[c].end(), m)) {
      return false;
    }
  }
  return true;
}

// A cell alone in its color never has a concurrent transmitter. Each such
// cell either joins another class it does not conflict with, or takes a
// compatible member from a class of three or more. Colors are then renumbered
// in order of first use, so K can only shrink.
void balance_singletons(const std::vector<std::vector<CellId>>& graph,
                        std::vector<std::size_t>& color) {
  if (color.empty()) {
    return;
  }
  const std::size_t k = *std::max_element(color.begin(), color.end()) + 1;
  std::vector<std::vector<CellId>> classes(k);
  for (CellId c = 0; c < color.size(); ++c) {
    classes[color[c]].push_back(c);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < k; ++s) {
      if (classes[s].size() != 1) {
        continue;
      }
      const CellId a = classes[s][0];
      for (std::size_t j = 0; j < k && classes[s].size() == 1; ++j) {
        if (j != s && !classes[j].empty() && compatible(graph, a, classes[j])) {
          classes[j].push_back(a);
          classes[s].clear();
          changed = true;
        }
      }
      for (std::size_t j = 0; j < k && classes[s].size() == 1; ++j) {
        if (classes[j].size() < 3) {
          continue;
        }
        for (auto it = classes[j].begin(); it != classes[j].end(); ++it) {
          if (!std::binary_search(graph[a].begin(), graph[a].end(), *it)) {
            classes[s].push_back(*it);
            classes[j].erase(it);
            changed = true;
            break;
          }
        }
      }
    }
  }
  std::size_t next = 0;
  for (auto& members : classes) {
    if (members.empty()) {
      continue;
    }
    for (CellId c : members) {
      color[c] = next;
    }
    ++next;
  }
}

}  // namespace

Schedule build_schedule(const Tessellation& t, double delta, bool balance) {
  if (!(delta >= kMinConflictMultiplier)) {
    throw ConfigError("schedule delta " + std::to_string(delta) +
                      " < 4 lets a receiver's own cell transmit");
  }
  const auto graph = conflict_graph(t, delta);
  auto colors = greedy_coloring(graph);
  if (balance) {
    balance_singletons(graph, colors);
  }
  return Schedule::from_colors(std::move(colors), 0, delta, Regime::fixed);
}

Schedule build_conservative_schedule(const Tessellation& t, double n, const Growth& growth,
                                     std::optional<std::size_t> pad_to_k, bool balance) {
  if (pad_to_k) {
    const auto graph = conflict_graph(t, kDefaultConflictMultiplier);
    auto colors = greedy_coloring(graph);
    if (balance) {
      balance_singletons(graph, colors);
    }
    return Schedule::from_colors(std::move(colors), *pad_to_k, kDefaultConflictMultiplier,
                                 Regime::conservative, growth.id());
  }
  const double delta = kDefaultConflictMultiplier * growth(n);
  if (!(delta >= kMinConflictMultiplier)) {
    throw ConfigError("conservative schedule: growth(" + std::to_string(n) +
                      ") gives delta < 4");
  }
  const auto graph = conflict_graph(t, delta);
  auto colors = greedy_coloring(graph);
  if (balance) {
    balance_singletons(graph, colors);
  }
  return Schedule::from_colors(std::move(colors), 0, delta, Regime::conservative, growth.id());
}

std::size_t packing_color_bound(double rho, double delta) {
  const double outer = std::min((delta + 4.0) * rho, kMaxSurfaceDistance);
  return static_cast<std::size_t>(std::ceil(cap_area(outer) / cap_area(rho)));
}

std::string to_string(Regime r) { return r == Regime::fixed ? "fixed" : "conservative"; }

}  // namespace hopcap
