#include <gtest/gtest.h>

#include <cmath>

#include "hopcap/engine.hpp"
#include "hopcap/error.hpp"

using namespace hopcap;

namespace {

struct Net {
  Deployment dep;
  Tessellation t;
  RelayTable relays;
  Schedule schedule;
  std::vector<Connection> conns;
};

Net make_net(std::size_t n, std::uint64_t seed) {
  auto dep = deploy(n, seed);
  auto t = build_tessellation(dep, rho_for_n(static_cast<double>(n), 1.0), seed);
  auto relays = RelayTable::build(dep, t, RelayPolicy::nearest_center, seed);
  auto schedule = build_schedule(t);
  auto conns = pick_connections(dep, seed);
  return {std::move(dep), std::move(t), std::move(relays), std::move(schedule), std::move(conns)};
}

Route route_with_hops(const Net& net, std::size_t H) {
  for (const auto& c : net.conns) {
    auto r = straight_line_route(c, net.dep, net.t, net.relays);
    if (r.hop_count() == H) {
      r.connection = 0;
      return r;
    }
  }
  throw std::runtime_error("no route with the requested hop count");
}

double resolved_delivery(const ConnectionMetrics& cm, std::uint64_t* resolved) {
  *resolved = cm.delivered + cm.dropped;
  return static_cast<double>(cm.delivered) / static_cast<double>(*resolved);
}

}  // namespace

TEST(Engine, ConstantLossMultipliesAlongTheRoute) {
  const auto net = make_net(2000, 1);
  const std::vector<Route> routes{route_with_hops(net, 10)};
  EngineConfig cfg;
  cfg.lambda = 1.0 / (2.0 * net.schedule.num_colors());
  cfg.measure_slots = 40'000 * net.schedule.num_colors();
  const auto m =
      run(net.dep, net.t, net.schedule, routes, LinkModel::constant(0.9), RadioParams{}, cfg);
  std::uint64_t resolved = 0;
  const double got = resolved_delivery(m.connections[0], &resolved);
  const double p = std::pow(0.9, 10);
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(resolved));
  EXPECT_GT(resolved, 15'000u);
  EXPECT_NEAR(got, p, 3.0 * sigma) << "resolved " << resolved;
  EXPECT_EQ(m.connections[0].in_flight, 0u);
}

TEST(Engine, IdealLinkIsLossless) {
  const auto net = make_net(1000, 2);
  const std::vector<Route> routes{route_with_hops(net, 6)};
  RadioParams radio;
  double weakest = 1e300;
  for (const Hop& h : routes[0].hops) {
    weakest = std::min(weakest, radio.received_power(h.length) / radio.noise);
  }
  EngineConfig cfg;
  cfg.lambda = 0.01;
  cfg.measure_slots = 50'000;
  const auto m =
      run(net.dep, net.t, net.schedule, routes, LinkModel::threshold(weakest), radio, cfg);
  EXPECT_GT(m.connections[0].delivered, 0u);
  EXPECT_EQ(m.connections[0].dropped, 0u);
  EXPECT_EQ(m.connections[0].delivery_probability(), 1.0);
}

TEST(Engine, RetransmissionBudget) {
  const auto net = make_net(500, 3);
  const std::vector<Route> routes{route_with_hops(net, 1)};
  const std::size_t K = net.schedule.num_colors();
  for (int R : {1, 2}) {
    EngineConfig cfg;
    cfg.attempts = R;
    cfg.lambda = 1.0 / (static_cast<double>(R * K) + 2.0);
    cfg.measure_slots = static_cast<std::uint64_t>(1.1e5 / cfg.lambda);
    const auto m =
        run(net.dep, net.t, net.schedule, routes, LinkModel::constant(0.5), RadioParams{}, cfg);
    std::uint64_t resolved = 0;
    const double got = resolved_delivery(m.connections[0], &resolved);
    EXPECT_GE(resolved, 100'000u);
    EXPECT_NEAR(got, 1.0 - std::pow(0.5, R), 0.01) << "R=" << R;
  }
}

TEST(Engine, SaturatedCellsAlwaysTransmit) {
  const auto net = make_net(1000, 4);
  std::vector<Route> routes;
  for (std::size_t i = 0; i < 200; ++i) {
    routes.push_back(straight_line_route(net.conns[i], net.dep, net.t, net.relays));
  }
  EngineConfig cfg = saturated_mode(EngineConfig{});
  cfg.inject = false;
  cfg.warmup_slots = 0;
  cfg.measure_slots = 40 * net.schedule.num_colors();
  cfg.drain_slots = 0;
  const auto m =
      run(net.dep, net.t, net.schedule, routes, LinkModel::logistic(), RadioParams{}, cfg);
  EXPECT_TRUE(m.saturated);
  // Every cell in every one of its slots.
  EXPECT_EQ(m.transmissions, 40u * net.t.num_cells());
  EXPECT_EQ(m.dummy_transmissions, m.transmissions);
  for (const auto& cm : m.connections) {
    for (const auto& h : cm.hops) {
      EXPECT_GT(h.observations, 0u);
    }
  }
  EXPECT_EQ(throughput_summary(m, 1).Lambda, 0.0);
}

TEST(Engine, ConservationAndThroughput) {
  const auto net = make_net(500, 5);
  std::vector<Route> routes;
  for (const auto& c : net.conns) {
    routes.push_back(straight_line_route(c, net.dep, net.t, net.relays));
  }
  EngineConfig cfg;
  cfg.lambda = 2e-4;
  cfg.measure_slots = 20'000;
  const auto m =
      run(net.dep, net.t, net.schedule, routes, LinkModel::logistic(), RadioParams{}, cfg);
  for (const auto& cm : m.connections) {
    EXPECT_EQ(cm.injected, cm.delivered + cm.dropped + cm.in_flight);
  }
  const auto s = throughput_summary(m, min_cell_occupancy(net.t, net.dep).min_count);
  EXPECT_LE(s.Lambda, s.lambda_realized);
  EXPECT_NEAR(s.lambda_realized, 2e-4, 4.0 * std::sqrt(2e-4 / (500.0 * 20'000)));
  std::size_t histogram_total = 0;
  for (auto h : s.delivery_histogram) {
    histogram_total += h;
  }
  EXPECT_EQ(histogram_total + s.censored_connections, m.connections.size());
}

TEST(Engine, LosslessSingleHopDeliversAtTheInjectionRate) {
  const auto net = make_net(500, 6);
  std::vector<Route> routes;
  for (const auto& c : net.conns) {
    auto r = straight_line_route(c, net.dep, net.t, net.relays);
    if (r.hop_count() == 1) {
      r.connection = static_cast<ConnectionId>(routes.size());
      routes.push_back(r);
    }
  }
  ASSERT_GE(routes.size(), 3u);
  EngineConfig cfg;
  cfg.lambda = 1e-3;
  cfg.measure_slots = 200'000;
  const auto m = run(net.dep, net.t, net.schedule, routes, LinkModel::threshold(1e-300),
                     RadioParams{}, cfg);
  const auto s = throughput_summary(m, 1);
  const double sources = static_cast<double>(routes.size());
  const double sigma = std::sqrt(cfg.lambda / (sources * cfg.measure_slots));
  EXPECT_NEAR(s.Lambda, s.lambda_realized, 1e-12);
  EXPECT_NEAR(s.Lambda, cfg.lambda, 3.0 * sigma);
}

TEST(Engine, DeterministicPerSeed) {
  const auto net = make_net(500, 7);
  std::vector<Route> routes;
  for (std::size_t i = 0; i < 100; ++i) {
    routes.push_back(straight_line_route(net.conns[i], net.dep, net.t, net.relays));
  }
  EngineConfig cfg;
  cfg.lambda = 5e-3;
  cfg.measure_slots = 5'000;
  cfg.trace = true;
  const auto a = run(net.dep, net.t, net.schedule, routes, LinkModel::logistic(), {}, cfg);
  const auto b = run(net.dep, net.t, net.schedule, routes, LinkModel::logistic(), {}, cfg);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].slot, b.trace[i].slot);
    EXPECT_EQ(a.trace[i].success, b.trace[i].success);
  }
  cfg.seed = 2;
  const auto c = run(net.dep, net.t, net.schedule, routes, LinkModel::logistic(), {}, cfg);
  EXPECT_NE(c.injected(), a.injected());
}

TEST(Engine, FairQueueingAndPeriodicInjection) {
  const auto net = make_net(500, 8);
  std::vector<Route> routes;
  for (std::size_t i = 0; i < 200; ++i) {
    routes.push_back(straight_line_route(net.conns[i], net.dep, net.t, net.relays));
  }
  EngineConfig cfg;
  cfg.lambda = 1e-3;
  cfg.measure_slots = 10'000;
  cfg.queue = QueueDiscipline::fair;
  cfg.injection = Injection::periodic;
  const auto m = run(net.dep, net.t, net.schedule, routes, LinkModel::logistic(), {}, cfg);
  // ceil(1 / lambda) = 1000-slot period: exactly 10 injections per source.
  for (const auto& cm : m.connections) {
    EXPECT_EQ(cm.injected, 10u);
  }
  EXPECT_EQ(m.in_flight(), 0u);
}

TEST(Engine, QueueCapOverflowThrows) {
  const auto net = make_net(500, 9);
  std::vector<Route> routes;
  for (const auto& c : net.conns) {
    routes.push_back(straight_line_route(c, net.dep, net.t, net.relays));
  }
  EngineConfig cfg;
  cfg.lambda = 0.5;
  cfg.queue_cap = 4;
  EXPECT_THROW(run(net.dep, net.t, net.schedule, routes, LinkModel::logistic(), {}, cfg),
               QueueOverflowError);
}

TEST(EngineConfig, Validation) {
  EngineConfig cfg;
  cfg.lambda = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.lambda = 0.5;
  cfg.attempts = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.attempts = 1;
  cfg.measure_slots = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_EQ(parse_traffic("poisson_bernoulli"), Traffic::bernoulli);
  EXPECT_EQ(parse_traffic("saturated"), Traffic::saturated);
  EXPECT_THROW(parse_traffic("bursty"), ConfigError);
}
