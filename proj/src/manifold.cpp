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

#include "kuramoto/manifold.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/FFT>

namespace kuramoto {

namespace {

constexpr double kGoldenTolerance = 1e-11;

// D(psi)^2 summed directly; no cancellation near the minimiser.
double squared_distance(const EmpiricalSpectrum &spectrum, const Eigen::VectorXd &profile,
                        double phase) {
  const std::complex<double> base = std::polar(1.0, phase);
  std::complex<double> rotation = base;
  double sum = 0.0;
  for (Index l = 1; l <= profile.size(); ++l) {
    sum += std::norm(spectrum.moment(l) - rotation * profile(l - 1)) / double(l * l);
    rotation *= base;
    if ((l & 63) == 0) {
      rotation = std::polar(1.0, double(l + 1) * phase);
    }
  }
  return sum;
}

} // namespace

ManifoldChart ManifoldChart::build(double coupling, Index order) {
  auto sync = solve_sync_state(coupling, order);
  if (!sync) {
    throw std::invalid_argument("ManifoldChart: K = " + std::to_string(coupling) +
                                " has no synchronised profile (need K > 1)");
  }
  ManifoldChart chart{*sync, sync->moments};
  return chart;
}

EmpiricalSpectrum ManifoldChart::profile_spectrum(double phase) const {
  EmpiricalSpectrum out{Eigen::VectorXcd(order()), 0};
  for (Index l = 1; l <= order(); ++l) {
    out.moments(l - 1) = std::polar(profile_moments(l - 1), double(l) * phase);
  }
  return out;
}

ManifoldDistance dist_to_manifold(const EmpiricalSpectrum &spectrum, const ManifoldChart &chart,
                                  Index coarse_phases) {
  if (spectrum.order() != chart.order()) {
    throw std::invalid_argument("dist_to_manifold: spectrum order " +
                                std::to_string(spectrum.order()) + " differs from chart order " +
                                std::to_string(chart.order()));
  }
  if (coarse_phases < 8) {
    throw std::invalid_argument("dist_to_manifold: need at least 8 coarse phases");
  }
  const Eigen::VectorXd &profile = chart.profile_moments;

  // D(psi)^2 = A - 2 Re sum_l w_l e^{i l psi} with w_l = conj(m_l) q_l / l^2.
  // On the grid psi_k = 2 pi k / N the sum is an inverse DFT of w folded
  // modulo N.
  double constant = 0.0;
  std::vector<std::complex<double>> folded(static_cast<std::size_t>(coarse_phases), 0.0);
  for (Index l = 1; l <= profile.size(); ++l) {
    const double weight = 1.0 / double(l * l);
    constant += (std::norm(spectrum.moment(l)) + profile(l - 1) * profile(l - 1)) * weight;
    folded[l % coarse_phases] += std::conj(spectrum.moment(l)) * profile(l - 1) * weight;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> sums;
  fft.inv(sums, folded);

  Index best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < coarse_phases; ++k) {
    const double value = constant - 2.0 * double(coarse_phases) * sums[k].real();
    if (value < best_value) {
      best_value = value;
      best = k;
    }
  }

  const double spacing = kTwoPi<double> / double(coarse_phases);
  const double centre = spacing * double(best);
  const auto objective = [&](double phase) { return squared_distance(spectrum, profile, phase); };

  // Golden-section search on [centre - spacing, centre + spacing].
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = centre - spacing;
  double hi = centre + spacing;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > kGoldenTolerance) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = objective(x2);
    }
  }
  double phase = 0.5 * (lo + hi);
  double value = objective(phase);
  const double at_centre = objective(centre);
  if (at_centre < value) {
    phase = centre;
    value = at_centre;
  }
  return {std::sqrt(std::max(value, 0.0)), wrap(phase)};
}

std::vector<PhaseRecord> track_phase(const Trajectory &trajectory, const ManifoldChart &chart) {
  std::vector<PhaseRecord> out;
  out.reserve(trajectory.size());
  for (const auto &rec : trajectory) {
    const ManifoldDistance d = dist_to_manifold(rec.spectrum, chart);
    double phase = d.phase;
    if (!out.empty()) {
      // Nearest lift of the new phase relative to the previous one.
      const double previous = out.back().phase;
      phase = previous + std::remainder(d.phase - previous, kTwoPi<double>);
    }
    out.push_back({rec.time, d.distance, phase});
  }
  return out;
}

void write_phase_csv(std::ostream &os, const std::vector<PhaseRecord> &records) {
  os << "t,dist,psi\n" << std::setprecision(17);
  for (const auto &rec : records) {
    os << rec.time << ',' << rec.distance << ',' << rec.phase << '\n';
  }
}

} // namespace kuramoto
