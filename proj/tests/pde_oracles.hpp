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

// Independent reference computations for the mean-field solver, shared by
// the unit tests and the acceptance binary.

#ifndef KURAMOTO_TESTS_PDE_ORACLES_HPP_
#define KURAMOTO_TESTS_PDE_ORACLES_HPP_

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "kuramoto/mean_field.hpp"

namespace kuramoto::oracle {

// Random smooth probability density: c_l with |c_l| <= 0.3 e^{-l/3} / (2 pi),
// so sum_l 2 |c_l| stays below c_0.
inline FourierDensity random_density(Index order, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FourierDensity out = FourierDensity::uniform(order);
  for (Index l = 1; l <= order; ++l) {
    out.coeffs(l) = std::polar(0.3 * unit(rng) * std::exp(-double(l) / 3.0) / (2 * std::numbers::pi),
                               2 * std::numbers::pi * unit(rng));
  }
  return out;
}

// Pseudo-spectral evaluation of 1/2 rho'' - d/dtheta[rho (J * rho)] with
// J = -K sin: rho and J * rho are computed on a grid of 4L points (the
// convolution by direct quadrature), multiplied pointwise, and the flux is
// differentiated through its discrete Fourier coefficients.
inline Eigen::VectorXcd pseudo_spectral_rhs(const FourierDensity &state, double coupling) {
  const Index order = state.order();
  const Index points = 4 * order;
  const double h = 2 * std::numbers::pi / double(points);
  Eigen::VectorXd rho(points);
  for (Index k = 0; k < points; ++k) {
    double value = state.coeffs(0).real();
    for (Index l = 1; l <= order; ++l) {
      value += 2.0 * (state.coeffs(l) * std::exp(std::complex<double>(0.0, 1.0) * (double(l) * h * double(k)))).real();
    }
    rho(k) = value;
  }
  Eigen::VectorXd flux(points);
  for (Index k = 0; k < points; ++k) {
    double field = 0.0;
    for (Index m = 0; m < points; ++m) {
      field += -coupling * std::sin(h * double(k - m)) * rho(m) * h;
    }
    flux(k) = rho(k) * field;
  }
  Eigen::VectorXcd out(order);
  for (Index l = 1; l <= order; ++l) {
    std::complex<double> flux_hat = 0.0;
    for (Index k = 0; k < points; ++k) {
      flux_hat += flux(k) * std::exp(-std::complex<double>(0.0, 1.0) * (double(l) * h * double(k)));
    }
    flux_hat /= double(points);
    out(l - 1) = -0.5 * double(l * l) * state.coeffs(l) - std::complex<double>(0.0, 1.0) * double(l) * flux_hat;
  }
  return out;
}

// Slope of log|c_1| against t over records with t in [from, to].
inline double log_decay_rate(const PdeTrajectory &run, double from, double to) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  int count = 0;
  for (const auto &rec : run.records) {
    if (rec.time < from - 1e-9 || rec.time > to + 1e-9) {
      continue;
    }
    const double y = std::log(std::abs(rec.density.coeffs(1)));
    st += rec.time;
    sy += y;
    stt += rec.time * rec.time;
    sty += rec.time * y;
    ++count;
  }
  return -(count * sty - st * sy) / (count * stt - st * st);
}

} // namespace kuramoto::oracle

#endif // KURAMOTO_TESTS_PDE_ORACLES_HPP_
