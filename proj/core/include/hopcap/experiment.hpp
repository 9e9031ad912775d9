#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hopcap/engine.hpp"
#include "hopcap/link_model.hpp"
#include "hopcap/routing.hpp"
#include "hopcap/schedule.hpp"
#include "hopcap/tessellation.hpp"
#include "hopcap/verification.hpp"

namespace hopcap {

struct ScheduleSpec {
  Regime regime = Regime::fixed;
  double delta = kDefaultConflictMultiplier;
  std::string growth = "log";
  std::optional<std::size_t> pad_to_k;
  // Merge single-cell color classes where the conflict graph allows.
  bool balance = true;
};

struct VerifySpec {
  bool enabled = true;
  // Measurement window of the saturated verification run.
  std::uint64_t measure_slots = 0;  // 0: 20 * K
  double short_hop_t = 0.05;
};

struct ExperimentSpec {
  std::vector<std::size_t> n_values{250, 500, 1000, 2000, 4000};
  std::size_t seeds = 10;
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
  std::filesystem::path out_dir = "out";

  double area_constant = 1.0;
  TessellationOptions tessellation;
  EmptyCellPolicy on_empty_cell = EmptyCellPolicy::reject_deployment;
  int max_redeploys = 20;

  RadioParams radio;
  LinkModel link;
  ScheduleSpec schedule;
  RouteStrategy routing;
  RelayPolicy relay = RelayPolicy::nearest_center;
  EngineConfig engine;
  VerifySpec verify;

  // Throws ConfigError for an ill-posed experiment, including any n whose
  // scale violates the tessellation precondition.
  void validate() const;
};

// Parses a YAML document (sections sweep, network, radio, link, schedule,
// routing, engine, verify). Unknown sections or keys are ConfigErrors.
// `overrides` are "section.key=value" strings applied on top of the file.
ExperimentSpec load_spec(const std::string& yaml_text,
                         const std::vector<std::string>& overrides = {});
ExperimentSpec load_spec_file(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides = {});
// Fully-resolved spec as YAML; load_spec(dump_spec(s)) reproduces s.
std::string dump_spec(const ExperimentSpec& spec);

struct Network {
  Deployment deployment;
  Tessellation tessellation;
  int redeploys = 0;
  Occupancy occupancy;
};

// Deploys and tessellates, redeploying (deterministically) while a cell is
// empty under reject_deployment. Throws RoutingError when the redeploy budget
// runs out.
Network build_network(std::size_t n, std::uint64_t seed, const ExperimentSpec& spec);

Schedule build_schedule_for(const Tessellation& t, std::size_t n, const ScheduleSpec& s);

// Routes for every connection under the configured strategy.
std::vector<Route> build_routes(const std::vector<Connection>& conns, const Deployment& dep,
                                const Tessellation& t, const RelayTable& relays,
                                const ExperimentSpec& spec, std::uint64_t seed);

struct PointResult {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string error;  // non-empty when the point failed to run
  bool config_error = false;

  double rho = 0.0;
  std::size_t cells = 0;
  std::size_t K = 0;
  int redeploys = 0;
  A1Certificate a1;
  bool schedule_proper = false;
  Occupancy occupancy;
  std::vector<Route> routes;
  RunMetrics run;
  std::optional<RunMetrics> saturated;
  VerificationReport report;
  std::vector<std::string> hard_failures;

  bool ok() const { return error.empty() && hard_failures.empty(); }
};

// deploy -> tessellate -> schedule -> route -> run -> verify for one (n, seed).
// Failures are captured in the result rather than thrown.
PointResult run_point(const ExperimentSpec& spec, std::size_t n, std::uint64_t seed);

struct SweepResult {
  std::vector<PointResult> points;  // sorted by (n, seed)
  bool ok() const;
  bool any_config_error() const;
};

// Runs every grid point on `spec.workers` threads and writes, under out_dir:
//   resolved_config.yaml, runs.csv, connections.csv, verification.csv,
//   summary_by_n.csv, delivery_vs_hops.csv, failures.csv.
SweepResult run_sweep(const ExperimentSpec& spec);

void write_sweep_outputs(const ExperimentSpec& spec, const SweepResult& sweep);

struct AppendixCheck {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct AppendixReport {
  std::vector<AppendixCheck> checks;
  bool ok() const;
};

// Monte Carlo of E[delta^L] for delta in {0.1, 0.5, 0.9, e^(-2 sqrt(pi))}
// (3 standard errors), KS distance of the pair-distance law (< 0.002), and
// the cap-area sandwich on 1000 grid radii in (0, sqrt(pi)/4].
AppendixReport verify_appendix(std::uint64_t seed = 1, std::size_t pairs = 1'000'000);

}  // namespace hopcap
