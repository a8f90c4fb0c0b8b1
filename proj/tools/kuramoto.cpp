// Copyright 2026 The kuramoto-graphs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: graph generation and audit, simulation, PDE
// solves, manifold tracking and the experiment harness.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kuramoto/experiment.hpp"
#include "kuramoto/graph.hpp"
#include "kuramoto/manifold.hpp"
#include "kuramoto/mean_field.hpp"
#include "kuramoto/particles.hpp"

namespace {

using namespace kuramoto;
using nlohmann::json;

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  return out;
}

std::ifstream open_in(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  return in;
}

struct GraphGenArgs {
  std::string kind = "er";
  Index n = 0;
  double p = 0.1;
  Index d = 0;
  std::uint64_t seed = 1;
  bool symmetric = false;
  std::string out;
};

int graph_gen(const GraphGenArgs &a) {
  SparseGraph graph = [&] {
    if (a.kind == "complete") {
      return gen_complete(a.n);
    }
    if (a.kind == "er") {
      return gen_erdos_renyi(a.n, a.p, a.seed, a.symmetric);
    }
    if (a.kind == "regular") {
      return gen_random_regular(a.n, a.d, a.seed);
    }
    return gen_disjoint_er(a.n, a.p, a.seed, a.symmetric);
  }();
  auto out = open_out(a.out);
  write_edge_list(out, graph);
  return 0;
}

struct GraphAuditArgs {
  std::string in;
  double delta = 0.2;
  std::string norm = "heuristic";
  int restarts = 64;
  std::uint64_t seed = 1;
  bool as_json = false;
};

int graph_audit(const GraphAuditArgs &a) {
  auto in = open_in(a.in);
  const SparseGraph graph = read_edge_list(in);
  const GraphAudit stats = audit(graph, a.delta);
  const Index n = graph.size();
  const double n2 = double(n) * double(n);

  // Each norm value is (1/n^2) ||xi/p - 1||, labelled by what it certifies.
  json norms = json::array();
  if (a.norm == "exact") {
    if (n > kExactNormMaxVertices) {
      throw std::runtime_error("exact norm is limited to n <= " +
                               std::to_string(kExactNormMaxVertices) + "; use --norm heuristic");
    }
    norms.push_back({{"method", "exhaustive"}, {"value", deviation_norm_exact(graph) / n2},
                     {"label", "exact"}});
  } else if (a.norm == "heuristic") {
    norms.push_back({{"method", "alternating_sign"},
                     {"value", deviation_norm_heuristic(graph, a.restarts, a.seed) / n2},
                     {"label", "lower_bound"}});
  }
  if (a.norm == "bounds" || a.norm == "heuristic") {
    if (graph.regular_degree() > 0) {
      norms.push_back({{"method", "mixing"}, {"value", mixing_bound(graph)}, {"label", "upper_bound"}});
    } else {
      norms.push_back({{"method", "bernstein"},
                       {"value", bernstein_bound(n, graph.dilution())},
                       {"label", "upper_bound"},
                       {"note", "holds with high probability for Erdos-Renyi graphs"}});
    }
  }

  const json report = {{"n", n},
                       {"edges", graph.edge_count()},
                       {"dilution", graph.dilution()},
                       {"symmetric", graph.symmetric()},
                       {"delta", a.delta},
                       {"bad_fraction", stats.bad_fraction},
                       {"giant_fraction", stats.giant_fraction},
                       {"component_count", stats.component_count},
                       {"max_degree_deviation", (stats.normalized_degrees.array() - 1.0).abs().maxCoeff()},
                       {"normalized_norm", norms}};
  if (a.as_json) {
    std::cout << report.dump(2) << '\n';
  } else {
    for (const auto &[key, value] : report.items()) {
      if (key != "normalized_norm") {
        std::cout << key << ": " << value << '\n';
      }
    }
    for (const auto &v : norms) {
      std::cout << "norm/n^2 [" << v["method"].get<std::string>() << "]: " << v["value"]
                << " (" << v["label"].get<std::string>() << ")\n";
    }
  }
  return 0;
}

struct SimulateArgs {
  std::string graph;
  double coupling = 0.0;
  std::optional<double> dt;
  double t_end = 1.0;
  int record_every = 1;
  std::uint64_t seed = 1;
  Index order = 64;
  std::string init = "uniform";
  bool allow_large_dt = false;
  std::string out;
};

int simulate_cmd(const SimulateArgs &a) {
  auto in = open_in(a.graph);
  const SparseGraph graph = read_edge_list(in);
  SimParams params;
  params.coupling = a.coupling;
  params.dt = a.dt.value_or(max_stable_dt(a.coupling));
  params.t_end = a.t_end;
  params.record_every = a.record_every;
  params.seed = derive_seed(a.seed, kNoiseStream);
  params.spectrum_order = a.order;
  params.allow_large_dt = a.allow_large_dt;
  const InitialCondition init =
      make_initial(parse_init(a.init), graph.size(), derive_seed(a.seed, kInitStream), a.coupling, a.order);
  const Trajectory trajectory = simulate(graph, params, init);
  auto out = open_out(a.out);
  write_trajectory_csv(out, trajectory);
  return 0;
}

struct PdeArgs {
  double coupling = 0.0;
  Index order = 64;
  double dt = 0.01;
  double t_end = 1.0;
  std::string init = "uniform";
  int record_every = 1;
  std::string out;
  std::string final_density;
};

FourierDensity pde_initial(const std::string &text, double coupling, Index order) {
  if (text == "uniform") {
    return FourierDensity::uniform(order);
  }
  if (text == "sync") {
    const auto sync = solve_sync_state(coupling, order);
    if (!sync) {
      throw std::runtime_error("--init sync needs K > 1");
    }
    return stationary_density(*sync, order);
  }
  if (text.rfind("file:", 0) == 0) {
    auto in = open_in(text.substr(5));
    FourierDensity density = read_density_csv(in);
    if (density.order() != order) {
      throw std::runtime_error("density file has L = " + std::to_string(density.order()) +
                               ", expected " + std::to_string(order));
    }
    return density;
  }
  if (text.rfind("mode1:", 0) == 0) {
    // First moment m_1 = EPS, all other modes zero.
    return FourierDensity::cardioid(2.0 * std::stod(text.substr(6)), order);
  }
  throw std::runtime_error("unknown --init '" + text + "'");
}

int pde_solve_cmd(const PdeArgs &a) {
  PdeOptions options;
  options.dt = a.dt;
  options.t_end = a.t_end;
  options.record_every = a.record_every;
  const PdeTrajectory result = pde_solve(pde_initial(a.init, a.coupling, a.order), a.coupling, options);
  Trajectory moments;
  for (const auto &rec : result.records) {
    moments.push_back({rec.time, density_moments(rec.density, a.order)});
  }
  auto out = open_out(a.out);
  write_trajectory_csv(out, moments);
  if (!a.final_density.empty()) {
    auto density_out = open_out(a.final_density);
    write_density_csv(density_out, result.records.back().density);
  }
  if (result.positivity_violations > 0) {
    std::cerr << "warning: density went negative at " << result.positivity_violations
              << " records (min " << result.min_density << ")\n";
  }
  return 0;
}

int sync_state_cmd(double coupling, bool as_json) {
  const auto sync = solve_sync_state(coupling, 128);
  json report = {{"K", coupling}};
  if (!sync) {
    report["synchronized"] = false;
    report["r"] = 0.0;
  } else {
    std::vector<double> moments(sync->moments.data(), sync->moments.data() + 16);
    report["synchronized"] = true;
    report["r"] = sync->r;
    report["Z"] = sync->normalizer;
    report["residual"] = std::abs(sync->r - psi(2.0 * coupling * sync->r));
    report["moments"] = moments;
  }
  if (as_json) {
    std::cout << report.dump(2) << '\n';
  } else {
    for (const auto &[key, value] : report.items()) {
      std::cout << key << ": " << value << '\n';
    }
  }
  return 0;
}

int manifold_track_cmd(const std::string &traj, double coupling, std::optional<Index> order,
                       const std::string &out_path) {
  auto in = open_in(traj);
  Trajectory trajectory = read_trajectory_csv(in);
  if (trajectory.empty()) {
    throw std::runtime_error("trajectory '" + traj + "' has no records");
  }
  const Index stored = trajectory.front().spectrum.order();
  const Index use = order.value_or(stored);
  if (use > stored) {
    throw std::runtime_error("--L exceeds the " + std::to_string(stored) + " stored moments");
  }
  for (auto &rec : trajectory) {
    rec.spectrum.moments.conservativeResize(use);
  }
  const ManifoldChart chart = ManifoldChart::build(coupling, use);
  const auto records = track_phase(trajectory, chart);
  for (const auto &rec : trajectory) {
    if (std::abs(rec.spectrum.moment(1)) < 1e-3) {
      std::cerr << "warning: |m_1| < 1e-3 at t = " << rec.time
                << "; the state is near the incoherent set and the phase is ill-defined\n";
      break;
    }
  }
  auto out = open_out(out_path);
  write_phase_csv(out, records);
  return 0;
}

int run_cmd(const std::string &config_path, unsigned threads, const std::string &out_dir) {
  auto in = open_in(config_path);
  const ExperimentConfig config = config_from_json(json::parse(in));
  RunOptions options;
  options.threads = threads;
  options.output_dir = out_dir.empty() ? std::filesystem::path("runs") / (config.name.empty() ? to_string(config.kind) : config.name)
                                       : std::filesystem::path(out_dir);
  const ExperimentReport report = run_experiment(config, options);
  std::cout << render_markdown(report);
  std::cout << "output: " << options.output_dir->string() << '\n';
  return report.summary.pass ? 0 : 1;
}

int report_cmd(const std::string &dir, bool as_markdown) {
  const ExperimentReport report = load_report(dir);
  if (as_markdown) {
    std::cout << render_markdown(report);
  } else {
    std::cout << report.to_json().dump(2) << '\n';
  }
  return report.summary.pass ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Kuramoto oscillators on random graphs"};
  app.set_version_flag("--version", std::string(KURAMOTO_VERSION));
  app.require_subcommand(1);

  GraphGenArgs gen;
  auto *gen_cmd = app.add_subcommand("graph-gen", "Generate a graph as an edge list");
  gen_cmd->add_option("--kind", gen.kind)->check(CLI::IsMember({"complete", "er", "regular", "disjoint_er"}));
  gen_cmd->add_option("--n", gen.n)->required();
  gen_cmd->add_option("--p", gen.p, "Edge probability (er, disjoint_er)");
  gen_cmd->add_option("--d", gen.d, "Degree (regular)");
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_flag("--sym", gen.symmetric, "Symmetric adjacency (er, disjoint_er)");
  gen_cmd->add_option("--out", gen.out)->required();

  GraphAuditArgs aud;
  auto *audit_cmd = app.add_subcommand("graph-audit", "Degree, component and deviation-norm statistics");
  audit_cmd->add_option("--in", aud.in)->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--delta", aud.delta);
  audit_cmd->add_option("--norm", aud.norm)->check(CLI::IsMember({"exact", "heuristic", "bounds"}));
  audit_cmd->add_option("--restarts", aud.restarts);
  audit_cmd->add_option("--seed", aud.seed);
  audit_cmd->add_flag("--json", aud.as_json);

  SimulateArgs sim;
  auto *sim_cmd = app.add_subcommand("simulate", "Euler-Maruyama run of the oscillator system");
  sim_cmd->add_option("--graph", sim.graph)->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--K", sim.coupling)->required();
  sim_cmd->add_option("--dt", sim.dt, "Default 0.01 / max(1, K)");
  sim_cmd->add_option("--t-end", sim.t_end);
  sim_cmd->add_option("--record-every", sim.record_every);
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--L", sim.order);
  sim_cmd->add_option("--init", sim.init, "uniform | sync | density:FILE | point:PSI | twoblock:PSI1,PSI2");
  sim_cmd->add_flag("--allow-large-dt", sim.allow_large_dt);
  sim_cmd->add_option("--out", sim.out)->required();

  PdeArgs pde;
  auto *pde_cmd = app.add_subcommand("pde-solve", "Fourier-Galerkin solve of the mean-field equation");
  pde_cmd->add_option("--K", pde.coupling)->required();
  pde_cmd->add_option("--L", pde.order);
  pde_cmd->add_option("--dt", pde.dt);
  pde_cmd->add_option("--t-end", pde.t_end);
  pde_cmd->add_option("--init", pde.init, "uniform | sync | file:PATH | mode1:EPS");
  pde_cmd->add_option("--record-every", pde.record_every);
  pde_cmd->add_option("--out", pde.out)->required();
  pde_cmd->add_option("--final-density", pde.final_density, "Also write the final density (l,re,im)");

  double sync_k = 0.0;
  bool sync_json = false;
  auto *sync_cmd = app.add_subcommand("sync-state", "Solve r = Psi(2Kr) and print the profile");
  sync_cmd->add_option("--K", sync_k)->required();
  sync_cmd->add_flag("--json", sync_json);

  std::string track_traj;
  std::string track_out;
  double track_k = 0.0;
  std::optional<Index> track_order;
  auto *track_cmd = app.add_subcommand("manifold-track", "Distance to the synchronised circle and its phase");
  track_cmd->add_option("--traj", track_traj)->required()->check(CLI::ExistingFile);
  track_cmd->add_option("--K", track_k)->required();
  track_cmd->add_option("--L", track_order, "Default: all stored moments");
  track_cmd->add_option("--out", track_out)->required();

  std::string run_config;
  unsigned run_threads = 1;
  std::string run_out;
  auto *run_sub = app.add_subcommand("run", "Run an experiment; exit code 0 iff it passes");
  run_sub->add_option("--config", run_config)->required()->check(CLI::ExistingFile);
  run_sub->add_option("--threads", run_threads)->check(CLI::PositiveNumber);
  run_sub->add_option("--out", run_out, "Default runs/<name>");

  std::string report_dir;
  bool report_json = false;
  bool report_markdown = false;
  auto *report_sub = app.add_subcommand("report", "Recompute the summary of a stored run");
  report_sub->add_option("--dir", report_dir)->required()->check(CLI::ExistingDirectory);
  auto *json_flag = report_sub->add_flag("--json", report_json);
  report_sub->add_flag("--markdown", report_markdown)->excludes(json_flag);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      return graph_gen(gen);
    }
    if (*audit_cmd) {
      return graph_audit(aud);
    }
    if (*sim_cmd) {
      return simulate_cmd(sim);
    }
    if (*pde_cmd) {
      return pde_solve_cmd(pde);
    }
    if (*sync_cmd) {
      return sync_state_cmd(sync_k, sync_json);
    }
    if (*track_cmd) {
      return manifold_track_cmd(track_traj, track_k, track_order, track_out);
    }
    if (*run_sub) {
      return run_cmd(run_config, run_threads, run_out);
    }
    if (*report_sub) {
      return report_cmd(report_dir, report_markdown);
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
