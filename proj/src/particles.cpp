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

#include "kuramoto/particles.hpp"
#include "kuramoto/rng_audit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kuramoto {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform in (0, 1), never exactly 0.
double to_open_unit(std::uint64_t bits) {
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace

double max_stable_dt(double coupling) { return 0.01 / std::max(1.0, coupling); }

void NoiseStream::fill(std::uint64_t step, Eigen::Ref<Eigen::VectorXd> out) const {
  const std::uint64_t step_key = splitmix64(splitmix64(seed_) ^ step);
  const Index n = out.size();
  for (Index pair = 0; 2 * pair < n; ++pair) {
    const std::uint64_t base = step_key ^ (std::uint64_t(pair) * 0xD1B54A32D192ED03ULL);
    const double u1 = to_open_unit(splitmix64(base));
    const double u2 = to_open_unit(splitmix64(base ^ 0xA0761D6478BD642FULL));
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = kTwoPi<double> * u2;
    out(2 * pair) = radius * std::cos(angle);
    if (2 * pair + 1 < n) {
      out(2 * pair + 1) = radius * std::sin(angle);
    }
  }
}

Eigen::VectorXd NoiseStream::draw(std::uint64_t step, Index n) const {
  Eigen::VectorXd out(n);
  fill(step, out);
  return out;
}

TwoBlock TwoBlock::by_index(double first_phase, double second_phase, Index split) {
  TwoBlock out{first_phase, second_phase, {}};
  for (Index i = 0; i < split; ++i) {
    out.first_block.push_back(i);
  }
  return out;
}

TwoBlock TwoBlock::by_component(double first_phase, double second_phase,
                                const SparseGraph &graph) {
  const GraphAudit stats = audit(graph, 1.0);
  TwoBlock out{first_phase, second_phase, {}};
  for (Index i = 0; i < graph.size(); ++i) {
    if (stats.component_of[i] == stats.component_of[0]) {
      out.first_block.push_back(i);
    }
  }
  return out;
}

Eigen::VectorXd sample_initial(const InitialCondition &init, Index n) {
  struct Sampler {
    Index n;
    Eigen::VectorXd operator()(const IidUniform &c) const {
      rng_audit::note(c.seed);
      std::mt19937_64 rng(c.seed);
      std::uniform_real_distribution<double> angle(0.0, kTwoPi<double>);
      Eigen::VectorXd out(n);
      for (Index i = 0; i < n; ++i) {
        out(i) = wrap(angle(rng));
      }
      return out;
    }
    Eigen::VectorXd operator()(const IidFromDensity &c) const {
      rng_audit::note(c.seed);
      std::mt19937_64 rng(c.seed);
      return sample_density(c.density, n, rng);
    }
    Eigen::VectorXd operator()(const PointMass &c) const {
      return Eigen::VectorXd::Constant(n, wrap(c.phase));
    }
    Eigen::VectorXd operator()(const TwoBlock &c) const {
      Eigen::VectorXd out = Eigen::VectorXd::Constant(n, wrap(c.second_phase));
      for (Index i : c.first_block) {
        if (i < 0 || i >= n) {
          throw std::invalid_argument("TwoBlock: vertex index out of range");
        }
        out(i) = wrap(c.first_phase);
      }
      return out;
    }
    Eigen::VectorXd operator()(const ExplicitAngles &c) const {
      if (c.angles.size() != n) {
        throw std::invalid_argument("ExplicitAngles: expected " + std::to_string(n) +
                                    " angles, got " + std::to_string(c.angles.size()));
      }
      Eigen::VectorXd out = c.angles;
      wrap_in_place(out);
      return out;
    }
  };
  return std::visit(Sampler{n}, init);
}

Eigen::VectorXd drift_sparse(const OscillatorState &state, const SparseGraph &graph,
                             double coupling) {
  const Index n = graph.size();
  if (state.angles.size() != n) {
    throw std::invalid_argument("drift: state has " + std::to_string(state.angles.size()) +
                                " angles but graph has " + std::to_string(n) + " vertices");
  }
  const Eigen::ArrayXd cosines = state.angles.array().cos();
  const Eigen::ArrayXd sines = state.angles.array().sin();
  const auto offsets = graph.row_offsets();
  const auto columns = graph.col_indices();
  const auto weights = graph.edge_weights();
  const double scale = -coupling / (double(n) * graph.dilution());
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    double cos_sum = 0.0;
    double sin_sum = 0.0;
    for (int e = offsets[i]; e < offsets[i + 1]; ++e) {
      cos_sum += weights[e] * cosines(columns[e]);
      sin_sum += weights[e] * sines(columns[e]);
    }
    out(i) = scale * (sines(i) * cos_sum - cosines(i) * sin_sum);
  }
  return out;
}

Eigen::VectorXd drift(const OscillatorState &state, const SparseGraph &graph, double coupling) {
  const Index n = graph.size();
  if (state.angles.size() != n) {
    return drift_sparse(state, graph, coupling); // throws the size mismatch
  }
  if (coupling == 0.0) {
    return Eigen::VectorXd::Zero(n);
  }
  if (!graph.is_complete()) {
    return drift_sparse(state, graph, coupling);
  }
  // The j = i term vanishes, so the sums may include it.
  const Eigen::ArrayXd cosines = state.angles.array().cos();
  const Eigen::ArrayXd sines = state.angles.array().sin();
  const double cos_total = cosines.sum();
  const double sin_total = sines.sum();
  return (-coupling / double(n) * (sines * cos_total - cosines * sin_total)).matrix();
}

OscillatorState step(const OscillatorState &state, const SparseGraph &graph,
                     const SimParams &params, const Eigen::VectorXd &noise) {
  if (noise.size() != state.angles.size()) {
    throw std::invalid_argument("step: noise length differs from state length");
  }
  OscillatorState next;
  next.angles = state.angles + params.dt * drift(state, graph, params.coupling) +
                std::sqrt(params.dt) * noise;
  wrap_in_place(next.angles);
  next.time = state.time + params.dt;
  return next;
}

Trajectory simulate_from(const SparseGraph &graph, const SimParams &params,
                         const Eigen::VectorXd &angles, const StateObserver &observer) {
  if (!(params.coupling >= 0.0)) {
    throw std::invalid_argument("simulate: coupling must be >= 0");
  }
  if (!(params.dt > 0.0) || !(params.t_end >= 0.0) || params.record_every < 1 ||
      params.spectrum_order < 1) {
    throw std::invalid_argument("simulate: need dt > 0, t_end >= 0, record_every >= 1, L >= 1");
  }
  if (!params.allow_large_dt && params.dt > max_stable_dt(params.coupling) * (1.0 + 1e-12)) {
    throw std::invalid_argument("simulate: dt exceeds 0.01 / max(1, K); pass allow_large_dt "
                                "to override");
  }
  if (angles.size() != graph.size()) {
    throw std::invalid_argument("simulate: initial condition size differs from graph size");
  }
  const long long steps = std::llround(params.t_end / params.dt);
  if (steps > params.max_steps) {
    throw std::invalid_argument("simulate: " + std::to_string(steps) +
                                " steps exceed the budget of " +
                                std::to_string(params.max_steps));
  }

  const NoiseStream noise(params.seed);
  const double root_dt = std::sqrt(params.dt);
  OscillatorState state{angles, 0.0};
  wrap_in_place(state.angles);
  Eigen::VectorXd increments(graph.size());

  Trajectory out;
  out.reserve(static_cast<std::size_t>(steps / params.record_every + 2));
  const auto record = [&]() {
    out.push_back({state.time, empirical_spectrum(state.angles, params.spectrum_order)});
    if (observer) {
      observer(state);
    }
  };
  record();
  for (long long k = 1; k <= steps; ++k) {
    noise.fill(std::uint64_t(k), increments);
    // Same expression order as step().
    state.angles = state.angles + params.dt * drift(state, graph, params.coupling) +
                   root_dt * increments;
    wrap_in_place(state.angles);
    state.time = double(k) * params.dt;
    if (k % params.record_every == 0 || k == steps) {
      record();
    }
  }
  return out;
}

Trajectory simulate(const SparseGraph &graph, const SimParams &params,
                    const InitialCondition &init, const StateObserver &observer) {
  return simulate_from(graph, params, sample_initial(init, graph.size()), observer);
}

void write_trajectory_csv(std::ostream &os, const Trajectory &trajectory) {
  const Index order = trajectory.empty() ? 0 : trajectory.front().spectrum.order();
  os << 't';
  for (Index l = 1; l <= order; ++l) {
    os << ",re_m" << l << ",im_m" << l;
  }
  os << '\n' << std::setprecision(17);
  for (const auto &rec : trajectory) {
    os << rec.time;
    for (Index l = 1; l <= order; ++l) {
      os << ',' << rec.spectrum.moment(l).real() << ',' << rec.spectrum.moment(l).imag();
    }
    os << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream &is) {
  std::string line;
  if (!std::getline(is, line) || line.empty() || line[0] != 't') {
    throw std::runtime_error("trajectory csv: expected header 't,re_m1,im_m1,...'");
  }
  const auto columns = std::count(line.begin(), line.end(), ',');
  if (columns < 2 || columns % 2 != 0) {
    throw std::runtime_error("trajectory csv: header must list re/im pairs");
  }
  const Index order = columns / 2;
  Trajectory out;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    TrajectoryRecord rec;
    rec.spectrum.moments.resize(order);
    if (!(row >> rec.time)) {
      throw std::runtime_error("trajectory csv: malformed row");
    }
    for (Index l = 0; l < order; ++l) {
      double re = 0.0;
      double im = 0.0;
      if (!(row >> re >> im)) {
        throw std::runtime_error("trajectory csv: row has too few columns");
      }
      rec.spectrum.moments(l) = {re, im};
    }
    out.push_back(std::move(rec));
  }
  return out;
}

} // namespace kuramoto
