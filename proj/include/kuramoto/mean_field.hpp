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

#ifndef KURAMOTO_MEAN_FIELD_HPP_
#define KURAMOTO_MEAN_FIELD_HPP_

#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "kuramoto/torus.hpp"

namespace kuramoto {

/*
 * Real density on the torus in truncated Fourier form,
 *
 *   rho(theta) = sum_{|l| <= L} c_l e^{i l theta},  c_{-l} = conj(c_l),
 *
 * storing c_0..c_L. A probability density has c_0 = 1 / (2 pi), and its
 * circular moments are m_l = 2 pi conj(c_l).
 */
struct FourierDensity {
  Eigen::VectorXcd coeffs;

  Index order() const { return coeffs.size() - 1; }

  static FourierDensity uniform(Index order);
  /// Density whose moments are those of `spectrum` (possibly a measure
  /// without density, e.g. a point mass, in which case this is its
  /// truncated Fourier series).
  static FourierDensity from_spectrum(const EmpiricalSpectrum &spectrum);
  /// (1 + a cos theta) / (2 pi), a probability density for |a| <= 1.
  static FourierDensity cardioid(double amplitude, Index order);

  /// Values at `points` equispaced nodes 2 pi k / points.
  Eigen::VectorXd evaluate(Index points) const;
  double evaluate_at(double theta) const;
};

/// Moments m_l = 2 pi conj(c_l) for l = 1..order as an analytic spectrum.
EmpiricalSpectrum density_moments(const FourierDensity &density, Index order);

/// Quadrature nodes used for every Bessel-type integral.
inline constexpr Index kQuadratureNodes = 512;

/// Psi(x) = \int cos(t) e^{x cos t} dt / \int e^{x cos t} dt, the first moment
/// of the exponentially tilted uniform density.
double psi(double x);

/// Stationary synchronised profile q(theta) = exp(2 K r cos theta) / Z.
struct SyncState {
  double coupling = 0.0;
  double r = 0.0;
  double normalizer = 0.0;
  /// m_l(q) for l = 1..L; real because q is even.
  Eigen::VectorXd moments;
};

/// nullopt when K <= 1, where r = 0 is the only solution.
std::optional<SyncState> solve_sync_state(double coupling, Index order = 128);

/// Fourier coefficients of q(. - phase).
FourierDensity stationary_density(const SyncState &sync, Index order, double phase = 0.0);

/// Time derivative of c_1..c_L under the McKean-Vlasov equation with
/// J = -K sin:
///
///   dc_l/dt = -(l^2/2) c_l + l pi K (c_1 c_{l-1} - conj(c_1) c_{l+1}),
///
/// with c_{L+1} = 0. Entry l - 1 of the result is dc_l/dt.
Eigen::VectorXcd pde_rhs(const FourierDensity &state, double coupling);

struct PdeOptions {
  double dt = 0.01;
  double t_end = 1.0;
  int record_every = 1;
  /// Treat the diffusion exactly through the factor exp(-l^2 t / 2). When
  /// off, plain explicit midpoint steps are used and dt <= 0.5 / L^2 is
  /// required.
  bool integrating_factor = true;
};

struct PdeRecord {
  double time = 0.0;
  FourierDensity density;
};

struct PdeTrajectory {
  std::vector<PdeRecord> records;
  /// Smallest density value seen on the 512-point monitoring grid.
  double min_density = 0.0;
  /// Records at which the density dipped below -1e-6.
  int positivity_violations = 0;
};

/// Throws std::runtime_error if any |c_l| exceeds 10^3.
PdeTrajectory pde_solve(const FourierDensity &init, double coupling, const PdeOptions &options);

/// Single integrating-factor midpoint step.
FourierDensity pde_step(const FourierDensity &state, double coupling, double dt);

/// IID samples by rejection against 1.01 times the grid maximum.
Eigen::VectorXd sample_density(const FourierDensity &density, Index count, std::mt19937_64 &rng);

// CSV with header `l,re,im`, rows l = 0..L.
void write_density_csv(std::ostream &os, const FourierDensity &density);
FourierDensity read_density_csv(std::istream &is);

} // namespace kuramoto

#endif // KURAMOTO_MEAN_FIELD_HPP_
