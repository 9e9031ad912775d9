#include "hopcap/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <unordered_map>

#include "hopcap/error.hpp"
#include "hopcap/random.hpp"

namespace hopcap {

void EngineConfig::validate() const {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ConfigError("engine.lambda must lie in (0, 1]");
  }
  if (attempts < 1) {
    throw ConfigError("engine.attempts must be >= 1");
  }
  if (measure_slots < 1) {
    throw ConfigError("engine.measure_slots must be >= 1");
  }
}

EngineConfig saturated_mode(EngineConfig cfg) {
  cfg.traffic = Traffic::saturated;
  return cfg;
}

void HopStats::observe(double sinr, double nearest_interferer, double phi, bool success) {
  if (observations == 0) {
    min_sinr = max_sinr = sinr;
    min_nearest_interferer = max_nearest_interferer = nearest_interferer;
  } else {
    min_sinr = std::min(min_sinr, sinr);
    max_sinr = std::max(max_sinr, sinr);
    min_nearest_interferer = std::min(min_nearest_interferer, nearest_interferer);
    max_nearest_interferer = std::max(max_nearest_interferer, nearest_interferer);
  }
  ++observations;
  sum_phi += phi;
  if (success) {
    ++successes;
  }
}

std::optional<double> ConnectionMetrics::delivery_probability() const {
  const std::uint64_t resolved = delivered + dropped;
  if (resolved == 0) {
    return std::nullopt;
  }
  return static_cast<double>(delivered) / static_cast<double>(resolved);
}

namespace {

template <class F>
std::uint64_t sum_over(const RunMetrics& m, F f) {
  std::uint64_t total = 0;
  for (const auto& c : m.connections) {
    total += f(c);
  }
  return total;
}

}  // namespace

std::uint64_t RunMetrics::injected() const {
  return sum_over(*this, [](const ConnectionMetrics& c) { return c.injected; });
}
std::uint64_t RunMetrics::delivered() const {
  return sum_over(*this, [](const ConnectionMetrics& c) { return c.delivered; });
}
std::uint64_t RunMetrics::dropped() const {
  return sum_over(*this, [](const ConnectionMetrics& c) { return c.dropped; });
}
std::uint64_t RunMetrics::in_flight() const {
  return sum_over(*this, [](const ConnectionMetrics& c) { return c.in_flight; });
}

namespace {

constexpr std::uint32_t kNoRoute = std::numeric_limits<std::uint32_t>::max();

struct Packet {
  std::uint32_t route = 0;
  std::uint32_t hop = 0;
  int attempts = 0;
  std::uint64_t injected_at = 0;
  bool measured = false;
};

// One cell's backlog: a single FIFO, or per-route FIFOs served round-robin.
class CellQueue {
 public:
  explicit CellQueue(QueueDiscipline d = QueueDiscipline::shared_fifo) : discipline_(d) {}

  bool empty() const { return size_ == 0; }
  std::size_t size() const { return size_; }

  void push(const Packet& p) {
    ++size_;
    if (discipline_ == QueueDiscipline::shared_fifo) {
      fifo_.push_back(p);
    } else {
      flows_[p.route].push_back(p);
    }
  }

  // Head-of-line packet; stays the head until pop() so retransmissions keep
  // their place.
  Packet& front() {
    if (discipline_ == QueueDiscipline::shared_fifo) {
      return fifo_.front();
    }
    if (!serving_) {
      auto it = flows_.upper_bound(last_);
      if (it == flows_.end()) {
        it = flows_.begin();
      }
      serving_ = it->first;
    }
    return flows_.at(*serving_).front();
  }

  void pop() {
    --size_;
    if (discipline_ == QueueDiscipline::shared_fifo) {
      fifo_.pop_front();
      return;
    }
    auto it = flows_.find(*serving_);
    it->second.pop_front();
    if (it->second.empty()) {
      flows_.erase(it);
    }
    last_ = *serving_;
    serving_.reset();
  }

  template <class F>
  void for_each(F f) const {
    for (const auto& p : fifo_) {
      f(p);
    }
    for (const auto& [route, q] : flows_) {
      for (const auto& p : q) {
        f(p);
      }
    }
  }

 private:
  QueueDiscipline discipline_;
  std::size_t size_ = 0;
  std::deque<Packet> fifo_;
  std::map<std::uint32_t, std::deque<Packet>> flows_;
  std::uint32_t last_ = kNoRoute;
  std::optional<std::uint32_t> serving_;
};

struct Transmission {
  CellId cell = 0;
  NodeId tx = 0;
  NodeId rx = 0;
  std::uint32_t route = kNoRoute;  // kNoRoute: filler with no routed hop
  std::uint32_t hop = 0;
  bool dummy = false;
  double signal = 0.0;
  double sinr = 0.0;
  double nearest = 0.0;
  double phi = 0.0;
  bool success = false;
};

struct Filler {
  NodeId tx = 0;
  NodeId rx = 0;
};

NodeId nearest_to_center(const Deployment& dep, const Tessellation& t, CellId c) {
  NodeId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (NodeId v : t.nodes_in_cell(c)) {
    const double d = surface_distance(dep.nodes[v], t.center(c));
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  return best;
}

class InjectionClock {
 public:
  InjectionClock(const EngineConfig& cfg, std::size_t routes) : cfg_(cfg) {
    rngs_.reserve(routes);
    for (std::size_t r = 0; r < routes; ++r) {
      rngs_.push_back(make_rng(cfg.seed, Stream::injection, r));
      std::uint64_t first = 0;
      if (cfg.injection == Injection::periodic) {
        const auto period = period_length();
        first = std::uniform_int_distribution<std::uint64_t>(0, period - 1)(rngs_[r]);
      } else {
        first = gap(r);
      }
      heap_.push({first, static_cast<std::uint32_t>(r)});
    }
  }

  // Routes injecting in `slot`, ascending.
  void due(std::uint64_t slot, std::vector<std::uint32_t>& out) {
    out.clear();
    while (!heap_.empty() && heap_.top().first == slot) {
      const auto [s, r] = heap_.top();
      heap_.pop();
      out.push_back(r);
      const std::uint64_t step =
          cfg_.injection == Injection::periodic ? period_length() : 1 + gap(r);
      heap_.push({s + step, r});
    }
    std::sort(out.begin(), out.end());
  }

 private:
  std::uint64_t period_length() const {
    return static_cast<std::uint64_t>(std::ceil(1.0 / cfg_.lambda));
  }
  std::uint64_t gap(std::size_t r) {
    if (cfg_.lambda >= 1.0) {
      return 0;
    }
    return std::geometric_distribution<std::uint64_t>(cfg_.lambda)(rngs_[r]);
  }

  using Entry = std::pair<std::uint64_t, std::uint32_t>;
  const EngineConfig& cfg_;
  std::vector<Rng> rngs_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
};

}  // namespace

RunMetrics run(const Deployment& dep, const Tessellation& t, const Schedule& schedule,
               const std::vector<Route>& routes, const LinkModel& link, const RadioParams& radio,
               const EngineConfig& cfg) {
  cfg.validate();
  radio.validate();
  if (schedule.colors().size() != t.num_cells()) {
    throw ArgumentError("run: schedule does not cover every cell");
  }
  const std::size_t K = schedule.num_colors();
  std::size_t max_hops = 0;
  for (const Route& r : routes) {
    if (r.hops.empty()) {
      throw ArgumentError("run: route without hops");
    }
    for (const Hop& h : r.hops) {
      if (t.nodes_in_cell(h.tx_cell).empty()) {
        throw RoutingError("route crosses empty cell " + std::to_string(h.tx_cell), h.tx_cell);
      }
    }
    max_hops = std::max(max_hops, r.hops.size());
  }

  RunMetrics m;
  m.n = dep.nodes.size();
  m.rho = t.rho();
  m.schedule_length = K;
  m.saturated = cfg.traffic == Traffic::saturated;
  m.warmup_slots = cfg.warmup_slots.value_or(10 * static_cast<std::uint64_t>(K));
  m.measure_slots = cfg.measure_slots;
  m.connections.resize(routes.size());
  for (std::size_t r = 0; r < routes.size(); ++r) {
    m.connections[r].connection = routes[r].connection;
    m.connections[r].hops.resize(routes[r].hops.size());
  }

  const std::uint64_t measure_end = m.warmup_slots + m.measure_slots;
  const std::uint64_t drain_cap =
      cfg.drain_slots ? measure_end + *cfg.drain_slots
                      : 4 * measure_end + 10 * static_cast<std::uint64_t>(K) * (max_hops + 1);

  std::vector<CellQueue> queues(t.num_cells(), CellQueue(cfg.queue));

  // Saturated mode: hops each cell can replay, plus a filler link for cells
  // that no route passes through.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> replay(t.num_cells());
  std::vector<std::size_t> replay_cursor(t.num_cells(), 0);
  std::vector<std::optional<Filler>> filler(t.num_cells());
  if (m.saturated) {
    for (std::uint32_t r = 0; r < routes.size(); ++r) {
      for (std::uint32_t h = 0; h < routes[r].hops.size(); ++h) {
        replay[routes[r].hops[h].tx_cell].emplace_back(r, h);
      }
    }
    for (CellId c = 0; c < t.num_cells(); ++c) {
      if (!replay[c].empty() || t.nodes_in_cell(c).empty()) {
        continue;
      }
      for (CellId nb : t.neighbors(c)) {
        if (!t.nodes_in_cell(nb).empty()) {
          filler[c] = Filler{nearest_to_center(dep, t, c), nearest_to_center(dep, t, nb)};
          break;
        }
      }
    }
  }

  InjectionClock clock(cfg, routes.size());
  Rng reception = make_rng(cfg.seed, Stream::reception);
  Rng reservoir_rng = make_rng(cfg.seed, Stream::reservoir);
  m.sinr_reservoir.reserve(cfg.reservoir_size);

  std::vector<std::uint32_t> due;
  std::vector<Transmission> txs;
  std::unordered_map<NodeId, std::size_t> strongest;
  std::uint64_t measured_in_flight = 0;

  std::uint64_t slot = 0;
  for (;; ++slot) {
    if (slot >= measure_end) {
      if (cfg.drain_slots ? slot >= drain_cap : (measured_in_flight == 0 || slot >= drain_cap)) {
        break;
      }
    }
    const bool measuring = slot >= m.warmup_slots;
    const bool counted = measuring && slot < measure_end;

    due.clear();
    if (cfg.inject) {
      clock.due(slot, due);
    }
    for (std::uint32_t r : due) {
      Packet p{r, 0, 0, slot, counted};
      auto& q = queues[routes[r].hops[0].tx_cell];
      if (cfg.queue_cap != 0 && q.size() >= cfg.queue_cap) {
        throw QueueOverflowError("queue of cell " + std::to_string(routes[r].hops[0].tx_cell) +
                                 " exceeded its capacity");
      }
      q.push(p);
      if (counted) {
        ++m.connections[r].injected;
        ++m.connections[r].hops[0].entered;
        ++measured_in_flight;
      }
    }

    txs.clear();
    for (CellId c : schedule.active_cells(slot)) {
      Transmission x;
      x.cell = c;
      if (!queues[c].empty()) {
        const Packet& p = queues[c].front();
        x.route = p.route;
        x.hop = p.hop;
      } else if (m.saturated && !replay[c].empty()) {
        const auto [r, h] = replay[c][replay_cursor[c]];
        replay_cursor[c] = (replay_cursor[c] + 1) % replay[c].size();
        x.route = r;
        x.hop = h;
        x.dummy = true;
      } else if (m.saturated && filler[c]) {
        x.tx = filler[c]->tx;
        x.rx = filler[c]->rx;
        x.dummy = true;
      } else {
        continue;
      }
      if (x.route != kNoRoute) {
        const Hop& hop = routes[x.route].hops[x.hop];
        x.tx = hop.tx;
        x.rx = hop.rx;
      }
      txs.push_back(x);
    }

    // Slot barrier: every SINR sees the full transmitter set.
    strongest.clear();
    for (std::size_t i = 0; i < txs.size(); ++i) {
      Transmission& x = txs[i];
      const SpherePoint& rx = dep.nodes[x.rx];
      x.signal = radio.received_power(surface_distance(dep.nodes[x.tx], rx));
      double interference = radio.noise;
      double nearest = std::numeric_limits<double>::infinity();
      bool jammed = false;
      for (std::size_t k = 0; k < txs.size(); ++k) {
        if (k == i) {
          continue;
        }
        const double d = surface_distance(dep.nodes[txs[k].tx], rx);
        nearest = std::min(nearest, d);
        if (!(d > 0.0)) {
          jammed = true;
          continue;
        }
        interference += radio.received_power(d);
      }
      x.nearest = nearest;
      if (jammed) {
        x.sinr = 0.0;
      } else if (interference == 0.0) {
        x.sinr = std::numeric_limits<double>::infinity();
      } else {
        x.sinr = x.signal / interference;
      }
      auto [it, fresh] = strongest.try_emplace(x.rx, i);
      if (!fresh && txs[it->second].signal < x.signal) {
        it->second = i;
      }
    }

    for (std::size_t i = 0; i < txs.size(); ++i) {
      Transmission& x = txs[i];
      const double u = uniform01(reception);
      x.phi = strongest.at(x.rx) == i ? link.success_probability(x.sinr) : 0.0;
      x.success = u < x.phi;
    }

    if (measuring) {
      for (const Transmission& x : txs) {
        ++m.transmissions;
        if (x.dummy) {
          ++m.dummy_transmissions;
        }
        if (x.route != kNoRoute) {
          m.connections[x.route].hops[x.hop].observe(x.sinr, x.nearest, x.phi, x.success);
        }
        ++m.sinr_seen;
        if (m.sinr_reservoir.size() < cfg.reservoir_size) {
          m.sinr_reservoir.push_back(x.sinr);
        } else if (cfg.reservoir_size > 0) {
          const auto j =
              std::uniform_int_distribution<std::uint64_t>(0, m.sinr_seen - 1)(reservoir_rng);
          if (j < cfg.reservoir_size) {
            m.sinr_reservoir[j] = x.sinr;
          }
        }
        if (cfg.trace) {
          m.trace.push_back({slot, x.cell, x.tx, x.rx, x.route, x.hop, x.sinr, x.nearest, x.dummy,
                             x.success});
        }
      }
    }

    for (const Transmission& x : txs) {
      if (x.dummy) {
        continue;
      }
      CellQueue& q = queues[x.cell];
      Packet p = q.front();
      const Route& route = routes[p.route];
      ConnectionMetrics& cm = m.connections[p.route];
      if (x.success) {
        q.pop();
        if (p.measured) {
          ++cm.hops[p.hop].passed;
        }
        ++p.hop;
        p.attempts = 0;
        if (p.hop == route.hops.size()) {
          if (p.measured) {
            ++cm.delivered;
            cm.delay_sum += slot + 1 - p.injected_at;
            --measured_in_flight;
          }
          continue;
        }
        auto& next = queues[route.hops[p.hop].tx_cell];
        if (cfg.queue_cap != 0 && next.size() >= cfg.queue_cap) {
          throw QueueOverflowError("queue of cell " + std::to_string(route.hops[p.hop].tx_cell) +
                                   " exceeded its capacity");
        }
        next.push(p);
        if (p.measured) {
          ++cm.hops[p.hop].entered;
        }
      } else if (++q.front().attempts >= cfg.attempts) {
        q.pop();
        if (p.measured) {
          ++cm.dropped;
          --measured_in_flight;
        }
      }
    }
  }
  m.total_slots = slot;

  std::vector<std::uint64_t> stranded(routes.size(), 0);
  for (const auto& q : queues) {
    q.for_each([&](const Packet& p) {
      if (p.measured) {
        ++stranded[p.route];
      }
    });
  }
  for (std::size_t r = 0; r < routes.size(); ++r) {
    ConnectionMetrics& cm = m.connections[r];
    cm.in_flight = stranded[r];
    if (cm.injected != cm.delivered + cm.dropped + cm.in_flight) {
      throw InvariantError("packet conservation violated for connection " +
                           std::to_string(cm.connection));
    }
  }
  return m;
}

ThroughputSummary throughput_summary(const RunMetrics& m, std::size_t min_occupancy) {
  ThroughputSummary s;
  s.delivery_histogram.assign(11, 0);
  const double sources = static_cast<double>(m.connections.size());
  if (sources > 0 && m.measure_slots > 0) {
    const double window = static_cast<double>(m.measure_slots);
    s.lambda_realized = static_cast<double>(m.injected()) / (sources * window);
    s.Lambda = static_cast<double>(m.delivered()) / (sources * window);
  }
  if (min_occupancy > 0 && m.schedule_length > 0) {
    s.occupancy_ceiling =
        1.0 / (static_cast<double>(min_occupancy) * static_cast<double>(m.schedule_length));
  } else {
    s.occupancy_ceiling = std::numeric_limits<double>::infinity();
  }
  for (const auto& c : m.connections) {
    const auto p = c.delivery_probability();
    if (!p) {
      ++s.censored_connections;
      continue;
    }
    ++s.delivery_histogram[static_cast<std::size_t>(std::floor(*p * 10.0))];
  }
  return s;
}

std::string to_string(Traffic t) {
  return t == Traffic::bernoulli ? "poisson_bernoulli" : "saturated";
}
std::string to_string(Injection i) { return i == Injection::bernoulli ? "bernoulli" : "periodic"; }
std::string to_string(QueueDiscipline q) {
  return q == QueueDiscipline::shared_fifo ? "shared_fifo" : "fair";
}

Traffic parse_traffic(const std::string& s) {
  if (s == "poisson_bernoulli" || s == "bernoulli") {
    return Traffic::bernoulli;
  }
  if (s == "saturated") {
    return Traffic::saturated;
  }
  throw ConfigError("unknown traffic model '" + s + "'");
}

Injection parse_injection(const std::string& s) {
  if (s == "bernoulli") {
    return Injection::bernoulli;
  }
  if (s == "periodic") {
    return Injection::periodic;
  }
  throw ConfigError("unknown injection model '" + s + "'");
}

QueueDiscipline parse_queue_discipline(const std::string& s) {
  if (s == "shared_fifo") {
    return QueueDiscipline::shared_fifo;
  }
  if (s == "fair") {
    return QueueDiscipline::fair;
  }
  throw ConfigError("unknown queue discipline '" + s + "'");
}

}  // namespace hopcap
