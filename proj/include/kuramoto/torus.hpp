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

#ifndef KURAMOTO_TORUS_HPP_
#define KURAMOTO_TORUS_HPP_

#include <cmath>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace kuramoto {

using Eigen::Index;

template <typename Scalar>
inline constexpr Scalar kTwoPi = Scalar(2) * std::numbers::pi_v<Scalar>;

/// Maps x onto the canonical range [0, 2pi). Throws on NaN or infinity.
template <typename Scalar> Scalar wrap(Scalar x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("wrap: non-finite angle");
  }
  Scalar y = std::fmod(x, kTwoPi<Scalar>);
  if (y < Scalar(0)) {
    y += kTwoPi<Scalar>;
  }
  // fmod of a tiny negative number can round up to exactly 2pi.
  if (y >= kTwoPi<Scalar>) {
    y = Scalar(0);
  }
  return y;
}

template <typename Derived> void wrap_in_place(Eigen::MatrixBase<Derived> &angles) {
  for (Index i = 0; i < angles.size(); ++i) {
    angles(i) = wrap(angles(i));
  }
}

/// Circular moments m_l = \int e^{il theta} d mu, for l = 1..L.
///
/// `moments(l - 1)` holds m_l. `source_size` is the number of atoms of an
/// empirical measure, or zero when the spectrum describes an analytic
/// measure.
template <typename Scalar> struct EmpiricalSpectrumT {
  using Complex = std::complex<Scalar>;
  using Moments = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  Moments moments;
  Index source_size = 0;

  Index order() const { return moments.size(); }
  Complex moment(Index l) const { return moments(l - 1); }
};

using EmpiricalSpectrum = EmpiricalSpectrumT<double>;

template <typename Derived>
EmpiricalSpectrumT<typename Derived::Scalar>
empirical_spectrum(const Eigen::MatrixBase<Derived> &angles, Index order) {
  using Scalar = typename Derived::Scalar;
  using Complex = std::complex<Scalar>;
  if (angles.size() == 0) {
    throw std::invalid_argument("empirical_spectrum: empty angle list");
  }
  if (order < 1) {
    throw std::invalid_argument("empirical_spectrum: order must be >= 1");
  }
  EmpiricalSpectrumT<Scalar> out;
  out.moments = EmpiricalSpectrumT<Scalar>::Moments::Zero(order);
  out.source_size = angles.size();
  for (Index j = 0; j < angles.size(); ++j) {
    const Complex base = std::polar(Scalar(1), Scalar(angles(j)));
    Complex power = base;
    for (Index l = 0; l < order; ++l) {
      out.moments(l) += power;
      power *= base;
      // Renormalise every 64 steps so rounding in |power| cannot build up.
      if ((l & 63) == 63) {
        power = std::polar(Scalar(1), Scalar(l + 2) * Scalar(angles(j)));
      }
    }
  }
  out.moments /= Scalar(angles.size());
  return out;
}

template <typename Scalar = double> EmpiricalSpectrumT<Scalar> uniform_spectrum(Index order) {
  return {EmpiricalSpectrumT<Scalar>::Moments::Zero(order), 0};
}

template <typename Scalar = double>
EmpiricalSpectrumT<Scalar> point_mass_spectrum(Scalar psi, Index order) {
  EmpiricalSpectrumT<Scalar> out{typename EmpiricalSpectrumT<Scalar>::Moments(order), 0};
  for (Index l = 0; l < order; ++l) {
    out.moments(l) = std::polar(Scalar(1), Scalar(l + 1) * psi);
  }
  return out;
}

/// Spectrum of the measure pushed forward by theta -> theta + alpha.
template <typename Scalar>
EmpiricalSpectrumT<Scalar> rotate(const EmpiricalSpectrumT<Scalar> &spectrum, Scalar alpha) {
  EmpiricalSpectrumT<Scalar> out = spectrum;
  for (Index l = 0; l < out.order(); ++l) {
    out.moments(l) *= std::polar(Scalar(1), Scalar(l + 1) * alpha);
  }
  return out;
}

/// A truncated H^{-1} distance together with a rigorous bound on the
/// neglected modes: |true - value| <= tail_bound.
struct DistanceEstimate {
  double value = 0.0;
  double tail_bound = 0.0;
};

inline double hminus1_tail_bound(Index order) {
  return 2.0 / std::sqrt(static_cast<double>(order));
}

template <typename Scalar>
DistanceEstimate hminus1_distance(const EmpiricalSpectrumT<Scalar> &a,
                                  const EmpiricalSpectrumT<Scalar> &b) {
  if (a.order() != b.order()) {
    throw std::invalid_argument("hminus1_distance: truncation orders differ (" +
                                std::to_string(a.order()) + " vs " +
                                std::to_string(b.order()) + ")");
  }
  Scalar sum = 0;
  for (Index l = 0; l < a.order(); ++l) {
    const Scalar weight = Scalar(l + 1);
    sum += std::norm(a.moments(l) - b.moments(l)) / (weight * weight);
  }
  return {static_cast<double>(std::sqrt(sum)), hminus1_tail_bound(a.order())};
}

/// Largest |<mu_A - mu_B, h>| over `trials` random zero-mean piecewise linear
/// test functions normalised to \int (h')^2 = 1. Each trial is a valid
/// witness, so the result never exceeds the H^{-1} distance.
double bl_lower_bound(const Eigen::VectorXd &angles_a, const Eigen::VectorXd &angles_b,
                      int trials, std::uint64_t seed);

/// Same as above with mu_B the uniform measure (which annihilates every
/// zero-mean test function).
double bl_lower_bound_uniform(const Eigen::VectorXd &angles, int trials, std::uint64_t seed);

// CSV with header `l,re,im`, one row per mode l = 1..L.
void write_spectrum_csv(std::ostream &os, const EmpiricalSpectrum &spectrum);
EmpiricalSpectrum read_spectrum_csv(std::istream &is);

// Newline-delimited decimal radians.
void write_angles(std::ostream &os, const Eigen::VectorXd &angles);
Eigen::VectorXd read_angles(std::istream &is);

} // namespace kuramoto

#endif // KURAMOTO_TORUS_HPP_
