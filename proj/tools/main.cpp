// hopcap command-line front end.
//
// Exit status: 0 ok, 1 a hard invariant failed, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hopcap/engine.hpp"
#include "hopcap/error.hpp"
#include "hopcap/experiment.hpp"
#include "hopcap/export.hpp"
#include "hopcap/link_model.hpp"
#include "hopcap/verification.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvariant = 1;
constexpr int kConfig = 2;

struct Common {
  std::string config;
  std::vector<std::string> set;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "YAML experiment file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.set, "Override a config key: section.key=value (repeatable)");
  cmd->add_option("--seed", c.seed, "Base seed (sweep.seed)");
  cmd->add_option("--out", c.out, "Output directory (sweep.out)");
  cmd->add_option("--workers", c.workers, "Worker threads (sweep.workers)");
}

hopcap::ExperimentSpec load(const Common& c, std::vector<std::string> extra = {}) {
  std::vector<std::string> overrides = c.set;
  if (c.seed) {
    overrides.push_back("sweep.seed=" + std::to_string(*c.seed));
  }
  if (c.out) {
    overrides.push_back("sweep.out=" + *c.out);
  }
  if (c.workers) {
    overrides.push_back("sweep.workers=" + std::to_string(*c.workers));
  }
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  if (c.config.empty()) {
    return hopcap::load_spec("", overrides);
  }
  return hopcap::load_spec_file(c.config, overrides);
}

std::ofstream open(const std::filesystem::path& p) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) {
    throw hopcap::ConfigError("cannot write " + p.string());
  }
  return f;
}

void print_point(const hopcap::PointResult& p) {
  std::printf("n=%zu seed=%llu rho=%.6g cells=%zu K=%zu redeploys=%d\n", p.n,
              static_cast<unsigned long long>(p.seed), p.rho, p.cells, p.K, p.redeploys);
  if (!p.error.empty()) {
    std::printf("  error: %s\n", p.error.c_str());
    return;
  }
  const auto& m = p.run;
  std::printf("  injected=%llu delivered=%llu dropped=%llu in_flight=%llu\n",
              static_cast<unsigned long long>(m.injected()),
              static_cast<unsigned long long>(m.delivered()),
              static_cast<unsigned long long>(m.dropped()),
              static_cast<unsigned long long>(m.in_flight()));
  for (const auto& s : p.report.summary()) {
    std::printf("  %-24s %zu/%zu pass\n", s.check.c_str(), s.passed, s.total);
  }
  for (const auto& f : p.hard_failures) {
    std::printf("  INVARIANT: %s\n", f.c_str());
  }
}

int cmd_deploy(const Common& c, std::size_t n) {
  const auto spec = load(c);
  const auto dep = hopcap::deploy(n, spec.base_seed);
  auto f = open(spec.out_dir / "deployment.json");
  hopcap::write_deployment_json(f, dep);
  std::printf("wrote %zu nodes to %s\n", n, (spec.out_dir / "deployment.json").c_str());
  return kOk;
}

int cmd_tessellate(const Common& c, std::size_t n) {
  const auto spec = load(c);
  const auto net = hopcap::build_network(n, spec.base_seed, spec);
  const auto& t = net.tessellation;
  const auto cert =
      hopcap::certify_a1(t, net.deployment, spec.tessellation.maximality_probes, spec.base_seed);
  const auto sched = hopcap::build_schedule_for(t, n, spec.schedule);
  {
    auto f = open(spec.out_dir / "deployment.json");
    hopcap::write_deployment_json(f, net.deployment);
  }
  {
    auto f = open(spec.out_dir / "tessellation.json");
    hopcap::write_tessellation_json(f, t);
  }
  {
    auto f = open(spec.out_dir / "schedule.json");
    hopcap::write_schedule_json(f, sched);
  }
  std::printf("rho=%.6g cells=%zu K=%zu min_occupancy=%zu redeploys=%d rebuilds=%d\n", t.rho(),
              t.num_cells(), sched.num_colors(), net.occupancy.min_count, net.redeploys,
              t.rebuilds());
  std::printf("packing: min center distance %.6g vs 2rho %.6g -> %s\n", cert.min_center_distance,
              2 * t.rho(), cert.packing_ok() ? "ok" : "FAIL");
  std::printf("covering: max node-to-center %.6g vs 2rho %.6g -> %s\n", cert.max_node_to_center,
              2 * t.rho(), cert.covering_ok() ? "ok" : "FAIL");
  std::printf("maximality: %zu/%zu probes uncovered -> %s\n", cert.uncovered_probes, cert.probes,
              cert.maximal() ? "ok" : "FAIL");
  return cert.ok() && sched.proper(t) ? kOk : kInvariant;
}

int cmd_simulate(const Common& c, std::size_t n, bool force_verify) {
  std::vector<std::string> extra{"sweep.n=[" + std::to_string(n) + "]", "sweep.seeds=1"};
  if (force_verify) {
    extra.push_back("verify.enabled=true");
  }
  const auto spec = load(c, extra);
  hopcap::SweepResult sweep;
  sweep.points.push_back(hopcap::run_point(spec, n, spec.base_seed));
  hopcap::write_sweep_outputs(spec, sweep);
  const auto& p = sweep.points.front();
  if (p.config_error) {
    throw hopcap::ConfigError(p.error);
  }
  if (p.error.empty()) {
    auto f = open(spec.out_dir / "routes.json");
    hopcap::write_routes_json(f, p.routes, p.rho);
    if (spec.engine.trace) {
      auto tf = open(spec.out_dir / "trace.csv");
      hopcap::write_trace_csv(tf, p.run.trace);
    }
  }
  print_point(p);
  return p.ok() ? kOk : kInvariant;
}

int cmd_sweep(const Common& c) {
  const auto spec = load(c);
  const auto sweep = hopcap::run_sweep(spec);
  for (const auto& p : sweep.points) {
    print_point(p);
  }
  if (sweep.any_config_error()) {
    return kConfig;
  }
  return sweep.ok() ? kOk : kInvariant;
}

int cmd_bounds(double eps1, double eps2, double alpha, std::size_t K, std::optional<double> phi,
               std::optional<double> rho, std::optional<std::size_t> n, double lambda) {
  const auto b = hopcap::compute_bounds(eps1, eps2, alpha, K);
  std::printf("eps1=%.17g eps2=%.17g alpha=%.17g K=%zu c1=%.17g\n", b.eps1, b.eps2, b.alpha, b.K,
              b.c1);
  std::printf("t0=%.17g\nM0=%.17g\nbeta0=%.17g\n", b.t0, b.M0, b.beta0);
  std::printf("M0_arbitrary=%.17g\nbeta1=%.17g\n", b.M0_arbitrary, b.beta1);
  if (phi) {
    std::printf("c0=%.17g\n", hopcap::c0_constant(*phi));
    if (rho && n) {
      const auto t = hopcap::throughput_ceilings(*rho, K, lambda, *phi, *n);
      std::printf("delta=%.17g\nE[delta^L]=%.17g\n", t.delta, t.expected_delta_L);
      std::printf("Lambda_chain=%.17g\nLambda_direct=%.17g\n", t.Lambda_chain, t.Lambda_direct);
      std::printf("Lambda_relaxed=%.17g\nLambda_bound=%.17g\n", t.Lambda_relaxed,
                  t.Lambda_bound);
      std::printf("c0_over_n=%.17g\nconservative=%.17g\nconservative_sqrt_log=%.17g\n",
                  t.c0_over_n, t.conservative, t.conservative_sqrt_log);
      std::printf("occupancy=%.17g\n", t.occupancy);
    }
  }
  return kOk;
}

int cmd_appendix(std::uint64_t seed, std::size_t pairs) {
  const auto rep = hopcap::verify_appendix(seed, pairs);
  for (const auto& c : rep.checks) {
    std::printf("%-36s value=%.9g reference=%.9g tolerance=%.3g %s\n", c.name.c_str(), c.value,
                c.reference, c.tolerance, c.pass ? "PASS" : "FAIL");
  }
  return rep.ok() ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-hop wireless capacity simulator on the unit-area sphere"};
  app.require_subcommand(1);

  Common common;
  std::size_t n = 2000;

  auto* deploy = app.add_subcommand("deploy", "Deploy n uniform nodes and write deployment.json");
  add_common(deploy, common);
  deploy->add_option("-n,--nodes", n, "Number of nodes")->required();

  auto* tess = app.add_subcommand("tessellate", "Build and certify the tessellation and schedule");
  add_common(tess, common);
  tess->add_option("-n,--nodes", n, "Number of nodes")->required();

  auto* sim = app.add_subcommand("simulate", "Run one network size with the configured engine");
  add_common(sim, common);
  sim->add_option("-n,--nodes", n, "Number of nodes")->required();

  auto* sweep = app.add_subcommand("sweep", "Run the configured grid of sizes and seeds");
  add_common(sweep, common);

  auto* verify = app.add_subcommand("verify", "Run the route and SINR checks on one network size");
  add_common(verify, common);
  verify->add_option("-n,--nodes", n, "Number of nodes")->required();

  double eps1 = 1.0 / 32.0, eps2 = 1.0 / 32.0, alpha = 3.0, lambda = 1.0;
  std::size_t K = 1;
  std::optional<double> phi, rho;
  std::optional<std::size_t> bn;
  auto* bounds = app.add_subcommand("bounds", "Evaluate t0, M0, beta0, beta1, c0 and ceilings");
  bounds->add_option("--eps1", eps1, "Short-hop slack");
  bounds->add_option("--eps2", eps2, "Interferer-free slack");
  bounds->add_option("--alpha", alpha, "Path-loss exponent");
  bounds->add_option("-K,--schedule-length", K, "Schedule length K = 1 + c1")->required();
  bounds->add_option("--phi", phi, "phi(beta0), in (0, 1)");
  bounds->add_option("--rho", rho, "Tessellation scale for the throughput ceilings");
  bounds->add_option("-n,--nodes", bn, "Number of nodes for the throughput ceilings");
  bounds->add_option("--lambda", lambda, "Per-node injection rate");

  std::uint64_t appendix_seed = 1;
  std::size_t pairs = 1'000'000;
  auto* appendix = app.add_subcommand("appendix", "Closed-form geometry checks (Monte Carlo, KS)");
  appendix->add_option("--seed", appendix_seed, "Monte Carlo seed");
  appendix->add_option("--pairs", pairs, "Uniform point pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*deploy) {
      return cmd_deploy(common, n);
    }
    if (*tess) {
      return cmd_tessellate(common, n);
    }
    if (*sim) {
      return cmd_simulate(common, n, false);
    }
    if (*verify) {
      return cmd_simulate(common, n, true);
    }
    if (*sweep) {
      return cmd_sweep(common);
    }
    if (*bounds) {
      return cmd_bounds(eps1, eps2, alpha, K, phi, rho, bn, lambda);
    }
    if (*appendix) {
      return cmd_appendix(appendix_seed, pairs);
    }
  } catch (const hopcap::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const hopcap::ArgumentError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const hopcap::DomainError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfig;
  } catch (const hopcap::Error& e) {
    std::fprintf(stderr, "invariant failure: %s\n", e.what());
    return kInvariant;
  }
  return kOk;
}
