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

#ifndef KURAMOTO_PARTICLES_HPP_
#define KURAMOTO_PARTICLES_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "kuramoto/graph.hpp"
#include "kuramoto/mean_field.hpp"
#include "kuramoto/rng_audit.hpp"
#include "kuramoto/torus.hpp"

namespace kuramoto {

struct OscillatorState {
  Eigen::VectorXd angles;
  double time = 0.0;
};

struct SimParams {
  double coupling = 0.0;
  double dt = 0.01;
  double t_end = 1.0;
  int record_every = 1;
  std::uint64_t seed = 0;
  Index spectrum_order = 256;
  /// Skip the dt <= 0.01 / max(1, K) guard.
  bool allow_large_dt = false;
  long long max_steps = 100'000'000;
};

/// Largest dt accepted without `allow_large_dt`.
double max_stable_dt(double coupling);

/*
 * Counter-based standard normal stream: the variate for particle i at step
 * k is a pure function of (seed, k, i), so trajectories do not depend on
 * how the work is split across threads.
 */
class NoiseStream {
public:
  explicit NoiseStream(std::uint64_t seed) : seed_(seed) { rng_audit::note(seed); }

  void fill(std::uint64_t step, Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd draw(std::uint64_t step, Index n) const;

private:
  std::uint64_t seed_;
};

struct IidUniform {
  std::uint64_t seed = 0;
};
struct IidFromDensity {
  FourierDensity density;
  std::uint64_t seed = 0;
};
struct PointMass {
  double phase = 0.0;
};
/// Phase `first_phase` on the listed vertices, `second_phase` elsewhere.
struct TwoBlock {
  double first_phase = 0.0;
  double second_phase = 0.0;
  std::vector<Index> first_block;

  /// First block = vertices with index < split.
  static TwoBlock by_index(double first_phase, double second_phase, Index split);
  /// First block = connected component of vertex 0.
  static TwoBlock by_component(double first_phase, double second_phase, const SparseGraph &graph);
};
struct ExplicitAngles {
  Eigen::VectorXd angles;
};

using InitialCondition = std::variant<IidUniform, IidFromDensity, PointMass, TwoBlock, ExplicitAngles>;

Eigen::VectorXd sample_initial(const InitialCondition &init, Index n);

/// drift_i = -(K / (n p)) sum_j xi_ij sin(theta_i - theta_j), evaluated in
/// one sparse pass through the neighbour sums of cos and sin. The complete
/// graph uses global sums instead.
Eigen::VectorXd drift(const OscillatorState &state, const SparseGraph &graph, double coupling);

/// Generic sparse path regardless of graph structure.
Eigen::VectorXd drift_sparse(const OscillatorState &state, const SparseGraph &graph,
                             double coupling);

/// One Euler-Maruyama step with the given standard normal increments.
OscillatorState step(const OscillatorState &state, const SparseGraph &graph,
                     const SimParams &params, const Eigen::VectorXd &noise);

struct TrajectoryRecord {
  double time = 0.0;
  EmpiricalSpectrum spectrum;
};
using Trajectory = std::vector<TrajectoryRecord>;

/// Called at each record with the current state (after the spectrum is
/// taken). Lets callers observe raw angles without storing them.
using StateObserver = std::function<void(const OscillatorState &)>;

/// Records the spectrum at t = 0, every `record_every` steps and at t_end.
/// Noise for step k comes from NoiseStream(params.seed) at counter k.
Trajectory simulate(const SparseGraph &graph, const SimParams &params,
                    const InitialCondition &init, const StateObserver &observer = {});

/// Same, from explicit starting angles.
Trajectory simulate_from(const SparseGraph &graph, const SimParams &params,
                         const Eigen::VectorXd &angles, const StateObserver &observer = {});

// CSV `t,re_m1,im_m1,...,re_mL,im_mL`.
void write_trajectory_csv(std::ostream &os, const Trajectory &trajectory);
Trajectory read_trajectory_csv(std::istream &is);

} // namespace kuramoto

#endif // KURAMOTO_PARTICLES_HPP_
