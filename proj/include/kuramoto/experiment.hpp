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

#ifndef KURAMOTO_EXPERIMENT_HPP_
#define KURAMOTO_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kuramoto/graph.hpp"
#include "kuramoto/mean_field.hpp"
#include "kuramoto/particles.hpp"

namespace kuramoto {

enum class ExperimentKind {
  kFiniteTime,
  kLongtimeSub,
  kLongtimeSuper,
  kBrownianMaximal,
  kGraphScaling,
  kAdversarialInit,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string &name);

struct GraphSpec {
  /// complete | er | regular | disjoint_er
  std::string kind = "er";
  double p = 0.1;
  /// Fixed degree for `regular`; ignored when degree_rule is "sqrt"
  /// (d = ceil(sqrt(n)), bumped by one if n d is odd).
  Index degree = 0;
  std::string degree_rule;
  bool symmetric = false;
};

SparseGraph make_graph(const GraphSpec &spec, Index n, std::uint64_t seed);

struct ModelSpec {
  double coupling = 0.0;
  double dt = 0.01;
  double t_end = 1.0;
  int record_every = 1;
  Index order = 256;
  bool allow_large_dt = false;
};

struct Tolerances {
  /// Upper threshold on tracked distances.
  double eps = 0.15;
  /// Lower threshold for the two-component counterexample.
  double floor = 0.3;
  /// Allowed max/min ratio of fitted maximal-inequality constants.
  double spread = 3.0;
  /// Allowed relative deviation from 1/n scaling.
  double scaling_slack = 0.25;
  /// Additive slack on computed-bound comparisons.
  double bound_slack = 1e-9;
};

struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::kFiniteTime;
  GraphSpec graph;
  std::vector<Index> sizes;
  std::vector<std::uint64_t> seeds;
  ModelSpec model;
  /// uniform | sync | cardioid:A | point:PSI | twoblock:PSI1,PSI2 |
  /// density:FILE | angles:FILE
  std::string init = "uniform";
  Tolerances tolerance;

  double t_skip = 0.0;              // longtime_sub: sup over t >= t_skip
  std::vector<double> horizons;     // brownian_maximal
  double t0 = 1.0;                  // brownian_maximal
  double t_converge = 10.0;         // adversarial_init, connected graph horizon
  double t_check = 50.0;            // adversarial_init, split graph check time
  int restarts = 64;                // graph_scaling
  double delta = 0.2;               // graph_scaling audit
};

nlohmann::json to_json(const ExperimentConfig &config);
ExperimentConfig config_from_json(const nlohmann::json &j);
void validate(const ExperimentConfig &config);

/// Independent stream seed for one purpose (graph, init, noise, ...) of a
/// replica.
std::uint64_t derive_seed(std::uint64_t replica_seed, std::uint64_t stream);

enum SeedStream : std::uint64_t {
  kGraphStream = 1,
  kInitStream = 2,
  kNoiseStream = 3,
  kSearchStream = 4,
};

/// Parsed initial-condition spec; see ExperimentConfig::init.
struct InitSpec {
  enum class Kind { kUniform, kSync, kCardioid, kPoint, kTwoBlock, kDensityFile, kAnglesFile };
  Kind kind = Kind::kUniform;
  double a = 0.0;
  double b = 0.0;
  std::string path;
};

InitSpec parse_init(const std::string &text);

/// Concrete initial condition for n oscillators. `coupling` and `order`
/// are used by `sync`.
InitialCondition make_initial(const InitSpec &spec, Index n, std::uint64_t seed, double coupling,
                              Index order);

/// The mean-field initial datum matching `spec`: the density for IID
/// draws, the exact spectrum of the deterministic angles otherwise.
FourierDensity mean_field_initial(const InitSpec &spec, const Eigen::VectorXd &angles,
                                  double coupling, Index order);

/// One stored time series.
struct Series {
  std::string id;
  Index n = 0;
  std::uint64_t seed = 0;
  std::string variant;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string &name) const;
};

void write_series_csv(const std::filesystem::path &path, const Series &series);
Series read_series_csv(const std::filesystem::path &path);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Summary {
  nlohmann::json metrics;
  std::vector<Check> checks;
  bool pass = false;
};

/// Pure function of the stored series.
Summary summarize(const ExperimentConfig &config, const std::vector<Series> &series);

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<Series> series;
  Summary summary;
  nlohmann::json fingerprint;

  nlohmann::json to_json() const;
};

struct RunOptions {
  unsigned threads = 1;
  /// When set, config.json, series/<id>.csv and report.json are written
  /// here; series are flushed as replicas finish so partial output
  /// survives a failure.
  std::optional<std::filesystem::path> output_dir;
};

ExperimentReport run_finite_time(const ExperimentConfig &config, const RunOptions &options = {});
ExperimentReport run_longtime_super(const ExperimentConfig &config,
                                    const RunOptions &options = {});
ExperimentReport run_longtime_sub(const ExperimentConfig &config, const RunOptions &options = {});
ExperimentReport run_brownian_maximal(const ExperimentConfig &config,
                                      const RunOptions &options = {});
ExperimentReport run_adversarial_init(const ExperimentConfig &config,
                                      const RunOptions &options = {});
ExperimentReport run_graph_scaling(const ExperimentConfig &config,
                                   const RunOptions &options = {});

/// Dispatches on config.kind.
ExperimentReport run_experiment(const ExperimentConfig &config, const RunOptions &options = {});

/// Re-reads config.json, report.json and the series of a stored run and
/// recomputes the summary.
ExperimentReport load_report(const std::filesystem::path &dir);

std::string render_markdown(const ExperimentReport &report);

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)> &body);

} // namespace kuramoto

#endif // KURAMOTO_EXPERIMENT_HPP_
