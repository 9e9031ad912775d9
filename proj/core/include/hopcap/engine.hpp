#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hopcap/link_model.hpp"
#include "hopcap/routing.hpp"
#include "hopcap/schedule.hpp"
#include "hopcap/tessellation.hpp"

namespace hopcap {

enum class Traffic { bernoulli, saturated };
enum class Injection { bernoulli, periodic };
enum class QueueDiscipline { shared_fifo, fair };

struct EngineConfig {
  double lambda = 0.001;  // injection probability per source per slot
  int attempts = 1;       // R: transmissions per hop before the packet is dropped
  // Defaults to 10 * K.
  std::optional<std::uint64_t> warmup_slots;
  std::uint64_t measure_slots = 10'000;
  // Slots after the measurement window for measured packets to finish.
  // Defaults to running until none is in flight, capped at
  // 4 * (warmup + measure) + 10 * K * (max hops + 1).
  std::optional<std::uint64_t> drain_slots;
  Traffic traffic = Traffic::bernoulli;
  Injection injection = Injection::bernoulli;
  QueueDiscipline queue = QueueDiscipline::shared_fifo;
  std::size_t queue_cap = 0;  // 0 = unbounded
  bool trace = false;
  std::size_t reservoir_size = 10'000;
  std::uint64_t seed = 1;
  // false: no packet is ever injected. With saturated traffic every scheduled
  // cell then replays its hops, so each hop is observed under full load.
  bool inject = true;

  // Throws ConfigError for lambda outside (0, 1], attempts < 1 or an empty
  // measurement window.
  void validate() const;
};

// Every cell queue stays backlogged: cells with no packet to send transmit
// dummy copies of the hops that pass through them, round-robin.
EngineConfig saturated_mode(EngineConfig cfg);

// Observations of one hop of one route, collected after warmup. Both real
// and dummy transmissions count.
struct HopStats {
  std::uint64_t observations = 0;
  std::uint64_t successes = 0;
  double min_sinr = 0.0;
  double max_sinr = 0.0;
  // Nearest concurrent transmitter to the receiver, extremes over the
  // observations (infinity when the hop had no concurrent transmitter).
  double min_nearest_interferer = 0.0;
  double max_nearest_interferer = 0.0;
  double sum_phi = 0.0;

  // Real packets that reached this hop / passed it.
  std::uint64_t entered = 0;
  std::uint64_t passed = 0;

  void observe(double sinr, double nearest_interferer, double phi, bool success);
};

struct ConnectionMetrics {
  ConnectionId connection = 0;
  // Packets injected during the measurement window and what became of them.
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t delay_sum = 0;  // slots from injection to delivery
  std::vector<HopStats> hops;

  // delivered / (delivered + dropped); in-flight packets are censored.
  std::optional<double> delivery_probability() const;
};

struct TraceRecord {
  std::uint64_t slot = 0;
  CellId cell = 0;
  NodeId tx = 0;
  NodeId rx = 0;
  std::uint32_t route = 0;  // index into the routes passed to run()
  std::uint32_t hop = 0;
  double sinr = 0.0;
  double nearest_interferer = 0.0;
  bool dummy = false;
  bool success = false;
};

struct RunMetrics {
  std::size_t n = 0;
  double rho = 0.0;
  std::size_t schedule_length = 0;
  std::uint64_t warmup_slots = 0;
  std::uint64_t measure_slots = 0;
  std::uint64_t total_slots = 0;
  bool saturated = false;
  std::vector<ConnectionMetrics> connections;
  // Uniform sample of per-transmission SINRs after warmup.
  std::vector<double> sinr_reservoir;
  std::uint64_t sinr_seen = 0;
  std::uint64_t transmissions = 0;
  std::uint64_t dummy_transmissions = 0;
  std::vector<TraceRecord> trace;

  std::uint64_t injected() const;
  std::uint64_t delivered() const;
  std::uint64_t dropped() const;
  std::uint64_t in_flight() const;
};

// Runs the slot loop. Each slot: sources inject; every scheduled cell with a
// packet (or, saturated, a dummy) transmits its head packet to the next relay;
// SINRs are computed against the full transmitter set of the slot; each
// receiver decodes only its strongest incoming signal, with probability
// phi(SINR); outcomes are applied after all SINRs are known. Deterministic
// per cfg.seed. Throws RoutingError if a route crosses an empty cell.
RunMetrics run(const Deployment& dep, const Tessellation& t, const Schedule& schedule,
               const std::vector<Route>& routes, const LinkModel& link, const RadioParams& radio,
               const EngineConfig& cfg);

struct ThroughputSummary {
  double lambda_realized = 0.0;  // measured injections per source per slot
  double Lambda = 0.0;           // measured deliveries per source per slot
  // Feasibility ceiling 1 / (Q * K) with Q the smallest cell occupancy.
  double occupancy_ceiling = 0.0;
  // Connections per delivery-probability decile (index 10 = exactly 1).
  std::vector<std::size_t> delivery_histogram;
  std::size_t censored_connections = 0;  // no resolved packet
};

ThroughputSummary throughput_summary(const RunMetrics& m, std::size_t min_occupancy);

std::string to_string(Traffic t);
std::string to_string(Injection i);
std::string to_string(QueueDiscipline q);
Traffic parse_traffic(const std::string& s);
Injection parse_injection(const std::string& s);
QueueDiscipline parse_queue_discipline(const std::string& s);

}  // namespace hopcap
