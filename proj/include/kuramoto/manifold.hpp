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

#ifndef KURAMOTO_MANIFOLD_HPP_
#define KURAMOTO_MANIFOLD_HPP_

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "kuramoto/mean_field.hpp"
#include "kuramoto/particles.hpp"
#include "kuramoto/torus.hpp"

namespace kuramoto {

/// The circle of rotated stationary profiles {q(. - psi)} for a K > 1.
struct ManifoldChart {
  SyncState sync;
  /// m_l(q), l = 1..L.
  Eigen::VectorXd profile_moments;

  Index order() const { return profile_moments.size(); }

  /// Throws std::invalid_argument when K <= 1 (no synchronised profile).
  static ManifoldChart build(double coupling, Index order);

  EmpiricalSpectrum profile_spectrum(double phase) const;
};

struct ManifoldDistance {
  double distance = 0.0;
  double phase = 0.0;
};

inline constexpr Index kCoarsePhases = 1024;

/// inf over psi of the truncated H^{-1} distance between `spectrum` and
/// q(. - psi): a coarse scan over equispaced phases (all evaluated with
/// one FFT) followed by golden-section refinement inside the best bracket.
ManifoldDistance dist_to_manifold(const EmpiricalSpectrum &spectrum, const ManifoldChart &chart,
                                  Index coarse_phases = kCoarsePhases);

struct PhaseRecord {
  double time = 0.0;
  double distance = 0.0;
  /// Lifted continuously in time, so it may leave [0, 2 pi).
  double phase = 0.0;
};

std::vector<PhaseRecord> track_phase(const Trajectory &trajectory, const ManifoldChart &chart);

// CSV `t,dist,psi`.
void write_phase_csv(std::ostream &os, const std::vector<PhaseRecord> &records);

} // namespace kuramoto

#endif // KURAMOTO_MANIFOLD_HPP_
