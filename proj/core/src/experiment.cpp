#include "hopcap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "hopcap/error.hpp"
#include "hopcap/export.hpp"
#include "hopcap/random.hpp"

namespace hopcap {

namespace {

// Strict reader for one YAML mapping: every key must be consumed.
class Section {
 public:
  Section(const YAML::Node& node, std::string name) : node_(node), name_(std::move(name)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      throw ConfigError("config section '" + name_ + "' must be a mapping");
    }
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!node_ || node_.IsNull() || !node_[key] || node_[key].IsNull()) {
      return fallback;
    }
    try {
      return node_[key].template as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("config key " + name_ + "." + key + " has the wrong type");
    }
  }

  template <class T>
  std::optional<T> optional(const std::string& key) {
    used_.insert(key);
    if (!node_ || node_.IsNull() || !node_[key] || node_[key].IsNull()) {
      return std::nullopt;
    }
    try {
      return node_[key].template as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("config key " + name_ + "." + key + " has the wrong type");
    }
  }

  void finish() const {
    if (!node_ || node_.IsNull()) {
      return;
    }
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (used_.count(key) == 0) {
        throw ConfigError("unknown config key " + name_ + "." + key);
      }
    }
  }

 private:
  YAML::Node node_;
  std::string name_;
  std::set<std::string> used_;
};

const std::set<std::string> kSections{"sweep",    "network", "radio",  "link",
                                      "schedule", "routing", "engine", "verify"};

LinkModel parse_link(Section& s) {
  const auto model = s.get<std::string>("model", "logistic");
  const double beta = s.get<double>("beta", ThresholdLink{}.beta);
  const double p = s.get<double>("p", ConstantLink{}.p);
  const int bits = s.get<int>("bits", BpskPacketLink{}.bits);
  const double slope = s.get<double>("slope", LogisticLink{}.slope);
  const double mid = s.get<double>("midpoint_db", LogisticLink{}.midpoint_db);
  if (model == "threshold") {
    return LinkModel::threshold(beta);
  }
  if (model == "constant_p") {
    return LinkModel::constant(p);
  }
  if (model == "bpsk_packet") {
    return LinkModel::bpsk_packet(bits);
  }
  if (model == "logistic") {
    return LinkModel::logistic(slope, mid);
  }
  throw ConfigError("unknown link model '" + model + "'");
}

ExperimentSpec spec_from_yaml(const YAML::Node& root) {
  if (root && !root.IsNull() && !root.IsMap()) {
    throw ConfigError("config root must be a mapping of sections");
  }
  if (root && root.IsMap()) {
    for (const auto& kv : root) {
      const auto name = kv.first.as<std::string>();
      if (kSections.count(name) == 0) {
        throw ConfigError("unknown config section '" + name + "'");
      }
    }
  }
  ExperimentSpec spec;
  const auto section = [&](const char* name) { return Section(root[name], name); };

  Section sweep = section("sweep");
  spec.n_values = sweep.get<std::vector<std::size_t>>("n", spec.n_values);
  spec.seeds = sweep.get<std::size_t>("seeds", spec.seeds);
  spec.base_seed = sweep.get<std::uint64_t>("seed", spec.base_seed);
  spec.workers = sweep.get<std::size_t>("workers", spec.workers);
  spec.out_dir = sweep.get<std::string>("out", spec.out_dir.string());
  sweep.finish();

  Section net = section("network");
  spec.area_constant = net.get<double>("area_constant", spec.area_constant);
  spec.tessellation.candidate_factor =
      net.get<double>("candidate_factor", spec.tessellation.candidate_factor);
  spec.tessellation.maximality_probes =
      net.get<std::size_t>("maximality_probes", spec.tessellation.maximality_probes);
  spec.tessellation.max_rebuilds = net.get<int>("max_rebuilds", spec.tessellation.max_rebuilds);
  spec.on_empty_cell =
      parse_empty_cell_policy(net.get<std::string>("on_empty_cell", to_string(spec.on_empty_cell)));
  spec.max_redeploys = net.get<int>("max_redeploys", spec.max_redeploys);
  net.finish();

  Section radio = section("radio");
  spec.radio.power = radio.get<double>("power", spec.radio.power);
  spec.radio.noise = radio.get<double>("noise", spec.radio.noise);
  spec.radio.alpha = radio.get<double>("alpha", spec.radio.alpha);
  radio.finish();

  Section link = section("link");
  spec.link = parse_link(link);
  link.finish();

  Section sched = section("schedule");
  const auto regime = sched.get<std::string>("regime", to_string(spec.schedule.regime));
  if (regime == "fixed") {
    spec.schedule.regime = Regime::fixed;
  } else if (regime == "conservative") {
    spec.schedule.regime = Regime::conservative;
  } else {
    throw ConfigError("unknown schedule regime '" + regime + "'");
  }
  spec.schedule.delta = sched.get<double>("delta", spec.schedule.delta);
  spec.schedule.growth = sched.get<std::string>("growth", spec.schedule.growth);
  spec.schedule.pad_to_k = sched.optional<std::size_t>("pad_to_k");
  spec.schedule.balance = sched.get<bool>("balance", spec.schedule.balance);
  sched.finish();

  Section routing = section("routing");
  spec.routing = RouteStrategy::parse(routing.get<std::string>("strategy", spec.routing.id()));
  spec.relay = parse_relay_policy(routing.get<std::string>("relay", to_string(spec.relay)));
  routing.finish();

  Section eng = section("engine");
  EngineConfig& e = spec.engine;
  e.lambda = eng.get<double>("lambda", e.lambda);
  e.attempts = eng.get<int>("attempts", e.attempts);
  e.warmup_slots = eng.optional<std::uint64_t>("warmup_slots");
  e.measure_slots = eng.get<std::uint64_t>("measure_slots", e.measure_slots);
  e.drain_slots = eng.optional<std::uint64_t>("drain_slots");
  e.traffic = parse_traffic(eng.get<std::string>("traffic", to_string(e.traffic)));
  e.injection = parse_injection(eng.get<std::string>("injection", to_string(e.injection)));
  e.queue = parse_queue_discipline(eng.get<std::string>("queue", to_string(e.queue)));
  e.queue_cap = eng.get<std::size_t>("queue_cap", e.queue_cap);
  e.trace = eng.get<bool>("trace", e.trace);
  e.reservoir_size = eng.get<std::size_t>("reservoir_size", e.reservoir_size);
  eng.finish();

  Section ver = section("verify");
  spec.verify.enabled = ver.get<bool>("enabled", spec.verify.enabled);
  spec.verify.measure_slots = ver.get<std::uint64_t>("measure_slots", spec.verify.measure_slots);
  spec.verify.short_hop_t = ver.get<double>("short_hop_t", spec.verify.short_hop_t);
  ver.finish();

  spec.validate();
  return spec;
}

void apply_override(YAML::Node& root, const std::string& text) {
  const auto eq = text.find('=');
  const auto dot = text.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq || dot == 0 ||
      dot + 1 == eq) {
    throw ConfigError("override '" + text + "' is not of the form section.key=value");
  }
  const std::string sec = text.substr(0, dot);
  const std::string key = text.substr(dot + 1, eq - dot - 1);
  YAML::Node value;
  try {
    value = YAML::Load(text.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + text + "': " + e.what());
  }
  root[sec][key] = value;
}

std::string link_params(const LinkModel& m, YAML::Emitter& out) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ThresholdLink>) {
          out << YAML::Key << "beta" << YAML::Value << v.beta;
        } else if constexpr (std::is_same_v<T, ConstantLink>) {
          out << YAML::Key << "p" << YAML::Value << v.p;
        } else if constexpr (std::is_same_v<T, BpskPacketLink>) {
          out << YAML::Key << "bits" << YAML::Value << v.bits;
        } else {
          out << YAML::Key << "slope" << YAML::Value << v.slope;
          out << YAML::Key << "midpoint_db" << YAML::Value << v.midpoint_db;
        }
      },
      m.variant());
  return m.name();
}

}  // namespace

void ExperimentSpec::validate() const {
  if (n_values.empty()) {
    throw ConfigError("sweep.n must list at least one network size");
  }
  if (seeds < 1) {
    throw ConfigError("sweep.seeds must be >= 1");
  }
  if (workers < 1) {
    throw ConfigError("sweep.workers must be >= 1");
  }
  if (!(area_constant > 0.0)) {
    throw ConfigError("network.area_constant must be positive");
  }
  if (max_redeploys < 0) {
    throw ConfigError("network.max_redeploys must be >= 0");
  }
  for (std::size_t n : n_values) {
    if (n < 2) {
      throw ConfigError("sweep.n: every network needs at least 2 nodes");
    }
    (void)rho_for_n(static_cast<double>(n), area_constant);
  }
  radio.validate();
  engine.validate();
  if (schedule.regime == Regime::fixed && !(schedule.delta >= kMinConflictMultiplier)) {
    throw ConfigError("schedule.delta must be >= 4");
  }
  if (schedule.regime == Regime::conservative) {
    (void)Growth::parse(schedule.growth);
  }
  if (!(verify.short_hop_t > 0.0 && verify.short_hop_t < kPi / 16.0)) {
    throw ConfigError("verify.short_hop_t must lie in (0, pi/16)");
  }
}

ExperimentSpec load_spec(const std::string& yaml_text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root || root.IsNull()) {
    root = YAML::Node(YAML::NodeType::Map);
  }
  for (const auto& o : overrides) {
    apply_override(root, o);
  }
  return spec_from_yaml(root);
}

ExperimentSpec load_spec_file(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return load_spec(buf.str(), overrides);
}

std::string dump_spec(const ExperimentSpec& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n" << YAML::Value << YAML::Flow << s.n_values;
  out << YAML::Key << "seeds" << YAML::Value << s.seeds;
  out << YAML::Key << "seed" << YAML::Value << s.base_seed;
  out << YAML::Key << "workers" << YAML::Value << s.workers;
  out << YAML::Key << "out" << YAML::Value << s.out_dir.string();
  out << YAML::EndMap;

  out << YAML::Key << "network" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "area_constant" << YAML::Value << s.area_constant;
  out << YAML::Key << "candidate_factor" << YAML::Value << s.tessellation.candidate_factor;
  out << YAML::Key << "maximality_probes" << YAML::Value << s.tessellation.maximality_probes;
  out << YAML::Key << "max_rebuilds" << YAML::Value << s.tessellation.max_rebuilds;
  out << YAML::Key << "on_empty_cell" << YAML::Value << to_string(s.on_empty_cell);
  out << YAML::Key << "max_redeploys" << YAML::Value << s.max_redeploys;
  out << YAML::EndMap;

  out << YAML::Key << "radio" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "power" << YAML::Value << s.radio.power;
  out << YAML::Key << "noise" << YAML::Value << s.radio.noise;
  out << YAML::Key << "alpha" << YAML::Value << s.radio.alpha;
  out << YAML::EndMap;

  out << YAML::Key << "link" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "model" << YAML::Value << s.link.name();
  link_params(s.link, out);
  out << YAML::EndMap;

  out << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "regime" << YAML::Value << to_string(s.schedule.regime);
  out << YAML::Key << "delta" << YAML::Value << s.schedule.delta;
  out << YAML::Key << "growth" << YAML::Value << s.schedule.growth;
  out << YAML::Key << "balance" << YAML::Value << s.schedule.balance;
  if (s.schedule.pad_to_k) {
    out << YAML::Key << "pad_to_k" << YAML::Value << *s.schedule.pad_to_k;
  }
  out << YAML::EndMap;

  out << YAML::Key << "routing" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "strategy" << YAML::Value << s.routing.id();
  out << YAML::Key << "relay" << YAML::Value << to_string(s.relay);
  out << YAML::EndMap;

  const EngineConfig& e = s.engine;
  out << YAML::Key << "engine" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "lambda" << YAML::Value << e.lambda;
  out << YAML::Key << "attempts" << YAML::Value << e.attempts;
  if (e.warmup_slots) {
    out << YAML::Key << "warmup_slots" << YAML::Value << *e.warmup_slots;
  }
  out << YAML::Key << "measure_slots" << YAML::Value << e.measure_slots;
  if (e.drain_slots) {
    out << YAML::Key << "drain_slots" << YAML::Value << *e.drain_slots;
  }
  out << YAML::Key << "traffic" << YAML::Value << to_string(e.traffic);
  out << YAML::Key << "injection" << YAML::Value << to_string(e.injection);
  out << YAML::Key << "queue" << YAML::Value << to_string(e.queue);
  out << YAML::Key << "queue_cap" << YAML::Value << e.queue_cap;
  out << YAML::Key << "trace" << YAML::Value << e.trace;
  out << YAML::Key << "reservoir_size" << YAML::Value << e.reservoir_size;
  out << YAML::EndMap;

  out << YAML::Key << "verify" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << s.verify.enabled;
  out << YAML::Key << "measure_slots" << YAML::Value << s.verify.measure_slots;
  out << YAML::Key << "short_hop_t" << YAML::Value << s.verify.short_hop_t;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

Network build_network(std::size_t n, std::uint64_t seed, const ExperimentSpec& spec) {
  const double rho = rho_for_n(static_cast<double>(n), spec.area_constant);
  for (int attempt = 0;; ++attempt) {
    // Redeploys draw from a different seed, derived deterministically.
    const std::uint64_t dseed = seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL;
    Deployment dep = deploy(n, dseed);
    Tessellation t = build_tessellation(dep, rho, dseed, spec.tessellation);
    Occupancy occ = min_cell_occupancy(t, dep);
    if (occ.empty_cells == 0 || spec.on_empty_cell == EmptyCellPolicy::error_on_route) {
      return Network{std::move(dep), std::move(t), attempt, occ};
    }
    if (attempt >= spec.max_redeploys) {
      throw RoutingError("every deployment left an empty cell after " +
                             std::to_string(attempt + 1) + " attempts",
                         occ.min_cell);
    }
  }
}

Schedule build_schedule_for(const Tessellation& t, std::size_t n, const ScheduleSpec& s) {
  if (s.regime == Regime::fixed) {
    return build_schedule(t, s.delta, s.balance);
  }
  return build_conservative_schedule(t, static_cast<double>(n), Growth::parse(s.growth),
                                     s.pad_to_k, s.balance);
}

std::vector<Route> build_routes(const std::vector<Connection>& conns, const Deployment& dep,
                                const Tessellation& t, const RelayTable& relays,
                                const ExperimentSpec& spec, std::uint64_t seed) {
  std::vector<Route> routes;
  routes.reserve(conns.size());
  for (const Connection& c : conns) {
    if (spec.routing.kind == RouteStrategy::Kind::straight_line) {
      routes.push_back(straight_line_route(c, dep, t, relays));
    } else {
      routes.push_back(arbitrary_route(c, dep, t, relays, spec.routing, seed));
    }
  }
  return routes;
}

namespace {

std::uint64_t auto_verify_slots(const std::vector<Route>& routes, const Tessellation& t,
                                std::size_t K) {
  std::vector<std::uint64_t> per_cell(t.num_cells(), 0);
  for (const Route& r : routes) {
    for (const Hop& h : r.hops) {
      ++per_cell[h.tx_cell];
    }
  }
  const std::uint64_t busiest = *std::max_element(per_cell.begin(), per_cell.end());
  return std::max<std::uint64_t>(20 * K, 2 * K * busiest);
}

std::size_t count_failures(const VerificationReport& rep, const std::string& check) {
  std::size_t k = 0;
  for (const CheckRow& r : rep.rows) {
    if (r.check == check && !r.pass) {
      ++k;
    }
  }
  return k;
}

}  // namespace

PointResult run_point(const ExperimentSpec& spec, std::size_t n, std::uint64_t seed) {
  PointResult res;
  res.n = n;
  res.seed = seed;
  try {
    Network net = build_network(n, seed, spec);
    const Deployment& dep = net.deployment;
    const Tessellation& t = net.tessellation;
    res.rho = t.rho();
    res.cells = t.num_cells();
    res.redeploys = net.redeploys;
    res.occupancy = net.occupancy;
    res.a1 = certify_a1(t, dep, spec.tessellation.maximality_probes, seed);

    const Schedule schedule = build_schedule_for(t, n, spec.schedule);
    res.K = schedule.num_colors();
    res.schedule_proper = schedule.proper(t);

    const auto conns = pick_connections(dep, seed);
    const RelayTable relays = RelayTable::build(dep, t, spec.relay, seed);
    res.routes = build_routes(conns, dep, t, relays, spec, seed);

    EngineConfig cfg = spec.engine;
    cfg.seed = seed;
    res.run = run(dep, t, schedule, res.routes, spec.link, spec.radio, cfg);

    if (spec.verify.enabled) {
      EngineConfig sat = saturated_mode(cfg);
      sat.measure_slots = spec.verify.measure_slots != 0
                              ? spec.verify.measure_slots
                              : auto_verify_slots(res.routes, t, res.K);
      sat.drain_slots = 0;
      sat.inject = false;
      sat.trace = false;
      res.saturated = run(dep, t, schedule, res.routes, spec.link, spec.radio, sat);
    }

    VerifyInput in;
    in.routes = &res.routes;
    in.run = res.saturated ? &*res.saturated : nullptr;
    in.rho = t.rho();
    in.K = res.K;
    in.alpha = spec.radio.alpha;
    in.routing = spec.routing.kind == RouteStrategy::Kind::straight_line
                     ? RoutingCase::straight_line
                     : RoutingCase::arbitrary;
    in.short_hop_t = spec.verify.short_hop_t;
    res.report = verify_routes(in);

    if (!res.a1.packing_ok()) {
      res.hard_failures.push_back("A1 packing: min center distance below 2 rho");
    }
    if (!res.a1.covering_ok()) {
      res.hard_failures.push_back("A1 covering: a node is farther than 2 rho from its center");
    }
    if (!res.a1.maximal()) {
      res.hard_failures.push_back("A1 maximality: uncovered probe points");
    }
    if (!res.schedule_proper) {
      res.hard_failures.push_back("schedule coloring is not proper");
    }
    for (const char* check : {"hop_count_lower", "hop_count_upper_ends", "consecutive_short_hops"}) {
      if (const auto k = count_failures(res.report, check); k > 0) {
        res.hard_failures.push_back(std::string(check) + ": " + std::to_string(k) +
                                    " connection(s) violate the bound");
      }
    }
  } catch (const ConfigError& e) {
    res.error = e.what();
    res.config_error = true;
  } catch (const Error& e) {
    res.error = e.what();
  }
  return res;
}

bool SweepResult::ok() const {
  return std::all_of(points.begin(), points.end(), [](const PointResult& p) { return p.ok(); });
}

bool SweepResult::any_config_error() const {
  return std::any_of(points.begin(), points.end(),
                     [](const PointResult& p) { return p.config_error; });
}

SweepResult run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<std::pair<std::size_t, std::uint64_t>> grid;
  std::vector<std::size_t> ns = spec.n_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  for (std::size_t n : ns) {
    for (std::size_t s = 0; s < spec.seeds; ++s) {
      grid.emplace_back(n, spec.base_seed + s);
    }
  }
  SweepResult out;
  out.points.resize(grid.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      out.points[i] = run_point(spec, grid[i].first, grid[i].second);
    }
  };
  const std::size_t threads = std::min(spec.workers, grid.size());
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < threads; ++k) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& th : pool) {
    th.join();
  }
  write_sweep_outputs(spec, out);
  return out;
}

namespace {

double percentile(std::vector<double> v, double q) {
  if (v.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) {
    throw ConfigError("cannot write " + p.string());
  }
  return f;
}

}  // namespace

void write_sweep_outputs(const ExperimentSpec& spec, const SweepResult& sweep) {
  std::filesystem::create_directories(spec.out_dir);
  {
    auto f = open_out(spec.out_dir / "resolved_config.yaml");
    f << dump_spec(spec);
  }

  auto runs_f = open_out(spec.out_dir / "runs.csv");
  CsvWriter runs(runs_f, "runs",
                 {"n", "seed", "rho", "cells", "K", "redeploys", "a1_ok", "min_center_distance",
                  "max_node_to_center", "uncovered_probes", "schedule_proper", "min_occupancy",
                  "connections", "injected", "delivered", "dropped", "in_flight",
                  "lambda_realized", "Lambda", "mean_H", "mean_L", "sinr_p05", "hard_failures",
                  "error"});
  auto conn_f = open_out(spec.out_dir / "connections.csv");
  CsvWriter conns(conn_f, "connections",
                  {"n", "seed", "connection", "rho", "K", "lambda", "H", "L", "L_hat", "injected",
                   "delivered", "dropped", "in_flight", "delivery", "predicted_delivery"});
  auto ver_f = open_out(spec.out_dir / "verification.csv");
  CsvWriter ver(ver_f, "verification", {"n", "seed", "check", "connection", "lhs", "rhs", "pass"});
  auto fail_f = open_out(spec.out_dir / "failures.csv");
  CsvWriter fails(fail_f, "failures", {"n", "seed", "kind", "detail"});

  struct ByN {
    std::size_t runs = 0, ok = 0;
    double K = 0, cells = 0, H = 0, Lambda = 0, lambda = 0, delivery = 0;
    std::size_t delivery_runs = 0;
  };
  std::map<std::size_t, ByN> by_n;
  struct ByH {
    std::size_t connections = 0;
    std::uint64_t injected = 0, delivered = 0, dropped = 0;
  };
  std::map<std::size_t, ByH> by_h;

  for (const PointResult& p : sweep.points) {
    ByN& agg = by_n[p.n];
    ++agg.runs;
    if (!p.error.empty()) {
      runs.cell(p.n).cell(p.seed);
      for (int k = 0; k < 21; ++k) {
        runs.cell(std::string());
      }
      runs.cell(p.error);
      runs.end_row();
      fails.cell(p.n).cell(p.seed).cell(p.config_error ? "config" : "error").cell(p.error);
      fails.end_row();
      continue;
    }
    if (p.ok()) {
      ++agg.ok;
    }
    const RunMetrics& m = p.run;
    const ThroughputSummary ts = throughput_summary(m, p.occupancy.min_count);
    double sum_h = 0.0, sum_l = 0.0;
    for (const Route& r : p.routes) {
      sum_h += static_cast<double>(r.hop_count());
      sum_l += r.geodesic_length;
    }
    const double nr = static_cast<double>(std::max<std::size_t>(p.routes.size(), 1));
    const auto& reservoir = p.saturated ? p.saturated->sinr_reservoir : m.sinr_reservoir;
    runs.cell(p.n).cell(p.seed).cell(p.rho).cell(p.cells).cell(p.K).cell(p.redeploys);
    runs.cell(p.a1.ok()).cell(p.a1.min_center_distance).cell(p.a1.max_node_to_center);
    runs.cell(p.a1.uncovered_probes).cell(p.schedule_proper).cell(p.occupancy.min_count);
    runs.cell(p.routes.size()).cell(m.injected()).cell(m.delivered()).cell(m.dropped());
    runs.cell(m.in_flight()).cell(ts.lambda_realized).cell(ts.Lambda).cell(sum_h / nr);
    runs.cell(sum_l / nr).cell(percentile(reservoir, 0.05)).cell(p.hard_failures.size());
    runs.cell(std::string());
    runs.end_row();

    agg.K += static_cast<double>(p.K);
    agg.cells += static_cast<double>(p.cells);
    agg.H += sum_h / nr;
    agg.Lambda += ts.Lambda;
    agg.lambda += ts.lambda_realized;
    if (m.delivered() + m.dropped() > 0) {
      agg.delivery +=
          static_cast<double>(m.delivered()) / static_cast<double>(m.delivered() + m.dropped());
      ++agg.delivery_runs;
    }

    const double window = static_cast<double>(m.measure_slots);
    for (std::size_t i = 0; i < p.routes.size(); ++i) {
      const Route& r = p.routes[i];
      const ConnectionMetrics& cm = m.connections[i];
      double predicted = 1.0;
      for (const HopStats& h : cm.hops) {
        predicted *= h.observations ? h.sum_phi / static_cast<double>(h.observations)
                                    : std::numeric_limits<double>::quiet_NaN();
      }
      conns.cell(p.n).cell(p.seed).cell(r.connection).cell(p.rho).cell(p.K);
      conns.cell(static_cast<double>(cm.injected) / window).cell(r.hop_count());
      conns.cell(r.geodesic_length).cell(r.path_length).cell(cm.injected).cell(cm.delivered);
      conns.cell(cm.dropped).cell(cm.in_flight);
      if (const auto d = cm.delivery_probability()) {
        conns.cell(*d);
      } else {
        conns.cell(std::string());
      }
      conns.cell(predicted);
      conns.end_row();

      ByH& bh = by_h[r.hop_count()];
      ++bh.connections;
      bh.injected += cm.injected;
      bh.delivered += cm.delivered;
      bh.dropped += cm.dropped;
    }

    for (const CheckRow& row : p.report.rows) {
      ver.cell(p.n).cell(p.seed).cell(row.check).cell(row.connection).cell(row.lhs);
      ver.cell(row.rhs).cell(row.pass);
      ver.end_row();
    }
    for (const auto& hf : p.hard_failures) {
      fails.cell(p.n).cell(p.seed).cell("invariant").cell(hf);
      fails.end_row();
    }
  }

  auto sum_f = open_out(spec.out_dir / "summary_by_n.csv");
  CsvWriter sum(sum_f, "summary_by_n",
                {"n", "runs", "ok_runs", "mean_K", "mean_cells", "mean_H", "mean_lambda",
                 "mean_Lambda", "mean_delivery"});
  for (const auto& [n, a] : by_n) {
    const std::size_t good = a.runs - static_cast<std::size_t>(std::count_if(
                                          sweep.points.begin(), sweep.points.end(),
                                          [&](const PointResult& p) {
                                            return p.n == n && !p.error.empty();
                                          }));
    const double d = static_cast<double>(std::max<std::size_t>(good, 1));
    sum.cell(n).cell(a.runs).cell(a.ok).cell(a.K / d).cell(a.cells / d).cell(a.H / d);
    sum.cell(a.lambda / d).cell(a.Lambda / d);
    sum.cell(a.delivery_runs ? a.delivery / static_cast<double>(a.delivery_runs)
                             : std::numeric_limits<double>::quiet_NaN());
    sum.end_row();
  }

  auto dh_f = open_out(spec.out_dir / "delivery_vs_hops.csv");
  CsvWriter dh(dh_f, "delivery_vs_hops",
               {"H", "connections", "injected", "delivered", "dropped", "delivery",
                "ln_delivery"});
  for (const auto& [H, b] : by_h) {
    const std::uint64_t resolved = b.delivered + b.dropped;
    const double d = resolved ? static_cast<double>(b.delivered) / static_cast<double>(resolved)
                              : std::numeric_limits<double>::quiet_NaN();
    dh.cell(H).cell(b.connections).cell(b.injected).cell(b.delivered).cell(b.dropped).cell(d);
    dh.cell(d > 0 ? std::log(d) : std::numeric_limits<double>::quiet_NaN());
    dh.end_row();
  }
}

bool AppendixReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const AppendixCheck& c) { return c.pass; });
}

AppendixReport verify_appendix(std::uint64_t seed, std::size_t pairs) {
  if (pairs < 2) {
    throw ArgumentError("verify_appendix: need at least 2 pairs");
  }
  AppendixReport rep;
  Rng rng = make_rng(seed, Stream::certificate, 0xA11);
  std::vector<double> L(pairs);
  for (auto& l : L) {
    const SpherePoint a = random_point(rng);
    const SpherePoint b = random_point(rng);
    l = surface_distance(a, b);
  }

  const double deltas[] = {0.1, 0.5, 0.9, std::exp(-2.0 * kSqrtPi)};
  const char* names[] = {"E[delta^L] delta=0.1", "E[delta^L] delta=0.5", "E[delta^L] delta=0.9",
                         "E[delta^L] delta=exp(-2 sqrt(pi))"};
  const double np = static_cast<double>(pairs);
  for (int k = 0; k < 4; ++k) {
    double mean = 0.0, m2 = 0.0;
    std::size_t i = 0;
    for (double l : L) {
      const double x = std::pow(deltas[k], l);
      ++i;
      const double d = x - mean;
      mean += d / static_cast<double>(i);
      m2 += d * (x - mean);
    }
    const double se = std::sqrt(m2 / (np - 1.0) / np);
    const double ref = expected_delta_pow_L(deltas[k]);
    rep.checks.push_back({names[k], mean, ref, 3.0 * se, std::abs(mean - ref) <= 3.0 * se});
  }

  std::vector<double> sorted = L;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = distance_cdf(std::min(sorted[i], kMaxSurfaceDistance));
    ks = std::max({ks, static_cast<double>(i + 1) / np - F, F - static_cast<double>(i) / np});
  }
  rep.checks.push_back({"KS distance to F_L", ks, 0.0, 0.002, ks < 0.002});

  std::size_t violations = 0;
  const double top = kSqrtPi / 4.0;
  for (int k = 1; k <= 1000; ++k) {
    const double rho = top * static_cast<double>(k) / 1000.0;
    const double a = cap_area(rho);
    if (!(kPi * rho * rho / 2.0 <= a && a <= kPi * rho * rho)) {
      ++violations;
    }
  }
  rep.checks.push_back({"cap-area sandwich violations", static_cast<double>(violations), 0.0, 0.0,
                        violations == 0});
  return rep;
}

}  // namespace hopcap
