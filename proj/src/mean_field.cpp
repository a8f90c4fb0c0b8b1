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

#include "kuramoto/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kuramoto {

namespace {

constexpr double kPi = std::numbers::pi;

// Moments \int cos(l t) e^{x cos t} dt / \int e^{x cos t} dt for l = 1..order,
// plus the normaliser \int e^{x cos t} dt, by the periodic trapezoidal rule.
struct TiltedMoments {
  Eigen::VectorXd moments;
  double normalizer = 0.0;
};

TiltedMoments tilted_moments(double x, Index order) {
  // Extra nodes for high orders keep mode l away from its alias N - l.
  const Index nodes = std::max(kQuadratureNodes, 4 * order);
  Eigen::VectorXd weights(nodes);
  for (Index k = 0; k < nodes; ++k) {
    const double theta = kTwoPi<double> * double(k) / double(nodes);
    weights(k) = std::exp(x * (std::cos(theta) - 1.0));
  }
  const double mass = weights.sum();
  TiltedMoments out;
  out.normalizer = std::exp(x) * mass * kTwoPi<double> / double(nodes);
  out.moments.resize(order);
  for (Index l = 1; l <= order; ++l) {
    double sum = 0.0;
    for (Index k = 0; k < nodes; ++k) {
      // Reduce l k mod nodes before scaling so the argument stays small.
      const Index phase = (l * k) % nodes;
      sum += std::cos(kTwoPi<double> * double(phase) / double(nodes)) * weights(k);
    }
    out.moments(l - 1) = sum / mass;
  }
  return out;
}

Eigen::VectorXcd coupling_term(const Eigen::VectorXcd &c, double coupling) {
  const Index order = c.size() - 1;
  Eigen::VectorXcd out(order);
  const std::complex<double> c1 = order >= 1 ? c(1) : 0.0;
  for (Index l = 1; l <= order; ++l) {
    const std::complex<double> next = l < order ? c(l + 1) : 0.0;
    out(l - 1) = double(l) * kPi * coupling * (c1 * c(l - 1) - std::conj(c1) * next);
  }
  return out;
}

void check_blow_up(const FourierDensity &state, double time) {
  for (Index l = 0; l <= state.order(); ++l) {
    const double magnitude = std::abs(state.coeffs(l));
    if (!(magnitude <= 1e3)) {
      std::ostringstream msg;
      msg << "pde_solve: blow-up at t = " << time << ", |c_" << l << "| = " << magnitude;
      throw std::runtime_error(msg.str());
    }
  }
}

} // namespace

FourierDensity FourierDensity::uniform(Index order) {
  FourierDensity out{Eigen::VectorXcd::Zero(order + 1)};
  out.coeffs(0) = 1.0 / kTwoPi<double>;
  return out;
}

FourierDensity FourierDensity::from_spectrum(const EmpiricalSpectrum &spectrum) {
  FourierDensity out = uniform(spectrum.order());
  for (Index l = 1; l <= spectrum.order(); ++l) {
    out.coeffs(l) = std::conj(spectrum.moment(l)) / kTwoPi<double>;
  }
  return out;
}

FourierDensity FourierDensity::cardioid(double amplitude, Index order) {
  if (std::abs(amplitude) > 1.0 || order < 1) {
    throw std::invalid_argument("cardioid: need |a| <= 1 and order >= 1");
  }
  FourierDensity out = uniform(order);
  out.coeffs(1) = amplitude / (2.0 * kTwoPi<double>);
  return out;
}

Eigen::VectorXd FourierDensity::evaluate(Index points) const {
  Eigen::VectorXd out(points);
  for (Index k = 0; k < points; ++k) {
    out(k) = evaluate_at(kTwoPi<double> * double(k) / double(points));
  }
  return out;
}

double FourierDensity::evaluate_at(double theta) const {
  const std::complex<double> base = std::polar(1.0, theta);
  std::complex<double> power = base;
  double sum = 0.0;
  for (Index l = 1; l <= order(); ++l) {
    sum += (coeffs(l) * power).real();
    power *= base;
  }
  return coeffs(0).real() + 2.0 * sum;
}

EmpiricalSpectrum density_moments(const FourierDensity &density, Index order) {
  if (order > density.order() || order < 1) {
    throw std::invalid_argument("density_moments: requested order " + std::to_string(order) +
                                " outside 1.." + std::to_string(density.order()));
  }
  EmpiricalSpectrum out{Eigen::VectorXcd(order), 0};
  for (Index l = 1; l <= order; ++l) {
    out.moments(l - 1) = kTwoPi<double> * std::conj(density.coeffs(l));
  }
  return out;
}

double psi(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("psi: argument must be finite and >= 0");
  }
  if (x == 0.0) {
    return 0.0;
  }
  double numerator = 0.0;
  double denominator = 0.0;
  for (Index k = 0; k < kQuadratureNodes; ++k) {
    const double c = std::cos(kTwoPi<double> * double(k) / double(kQuadratureNodes));
    const double w = std::exp(x * (c - 1.0));
    numerator += c * w;
    denominator += w;
  }
  return numerator / denominator;
}

std::optional<SyncState> solve_sync_state(double coupling, Index order) {
  if (!(coupling >= 0.0)) {
    throw std::invalid_argument("solve_sync_state: K must be >= 0");
  }
  if (coupling <= 1.0) {
    return std::nullopt;
  }
  const auto residual = [&](double r) { return psi(2.0 * coupling * r) - r; };
  double lo = 1e-6;
  double hi = 1.0 - 1e-9;
  if (!(residual(lo) > 0.0 && residual(hi) < 0.0)) {
    throw std::runtime_error("solve_sync_state: no sign change of Psi(2Kr) - r for K = " +
                             std::to_string(coupling));
  }
  // Bisect until the bracket stops shrinking in double precision.
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  const double r = std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
  if (std::abs(residual(r)) > 1e-10) {
    throw std::runtime_error("solve_sync_state: residual above 1e-10 after bisection");
  }
  const TiltedMoments tilted = tilted_moments(2.0 * coupling * r, order);
  return SyncState{coupling, r, tilted.normalizer, tilted.moments};
}

FourierDensity stationary_density(const SyncState &sync, Index order, double phase) {
  const Eigen::VectorXd moments =
      order <= sync.moments.size()
          ? Eigen::VectorXd(sync.moments.head(order))
          : tilted_moments(2.0 * sync.coupling * sync.r, order).moments;
  FourierDensity out = FourierDensity::uniform(order);
  for (Index l = 1; l <= order; ++l) {
    out.coeffs(l) = moments(l - 1) * std::polar(1.0, -double(l) * phase) / kTwoPi<double>;
  }
  return out;
}

Eigen::VectorXcd pde_rhs(const FourierDensity &state, double coupling) {
  Eigen::VectorXcd out = coupling_term(state.coeffs, coupling);
  for (Index l = 1; l <= state.order(); ++l) {
    out(l - 1) -= 0.5 * double(l * l) * state.coeffs(l);
  }
  return out;
}

FourierDensity pde_step(const FourierDensity &state, double coupling, double dt) {
  const Index order = state.order();
  Eigen::VectorXd half_decay(order);
  for (Index l = 1; l <= order; ++l) {
    half_decay(l - 1) = std::exp(-0.25 * double(l * l) * dt);
  }
  const Eigen::VectorXcd current = state.coeffs.tail(order);

  FourierDensity midpoint = state;
  midpoint.coeffs.tail(order) =
      half_decay.cwiseProduct(current + 0.5 * dt * coupling_term(state.coeffs, coupling));

  FourierDensity next = state;
  next.coeffs.tail(order) =
      half_decay.cwiseProduct(half_decay).cwiseProduct(current) +
      dt * half_decay.cwiseProduct(coupling_term(midpoint.coeffs, coupling));
  return next;
}

namespace {

FourierDensity explicit_midpoint_step(const FourierDensity &state, double coupling, double dt) {
  const Index order = state.order();
  FourierDensity midpoint = state;
  midpoint.coeffs.tail(order) += 0.5 * dt * pde_rhs(state, coupling);
  FourierDensity next = state;
  next.coeffs.tail(order) += dt * pde_rhs(midpoint, coupling);
  return next;
}

} // namespace

PdeTrajectory pde_solve(const FourierDensity &init, double coupling, const PdeOptions &options) {
  if (init.order() < 1) {
    throw std::invalid_argument("pde_solve: need at least one mode");
  }
  if (!(options.dt > 0.0) || !(options.t_end >= 0.0) || options.record_every < 1) {
    throw std::invalid_argument("pde_solve: need dt > 0, t_end >= 0, record_every >= 1");
  }
  const double order = double(init.order());
  if (!options.integrating_factor && options.dt > 0.5 / (order * order)) {
    throw std::invalid_argument("pde_solve: explicit mode requires dt <= 0.5 / L^2");
  }
  const long long steps = std::llround(options.t_end / options.dt);

  constexpr Index kMonitorPoints = 512;
  PdeTrajectory out;
  FourierDensity state = init;
  state.coeffs(0) = 1.0 / kTwoPi<double>;
  out.min_density = std::numeric_limits<double>::infinity();
  const auto record = [&](double time) {
    const double lowest = state.evaluate(kMonitorPoints).minCoeff();
    out.min_density = std::min(out.min_density, lowest);
    if (lowest < -1e-6) {
      ++out.positivity_violations;
    }
    out.records.push_back({time, state});
  };

  record(0.0);
  for (long long k = 1; k <= steps; ++k) {
    state = options.integrating_factor ? pde_step(state, coupling, options.dt)
                                       : explicit_midpoint_step(state, coupling, options.dt);
    const double time = double(k) * options.dt;
    check_blow_up(state, time);
    if (k % options.record_every == 0 || k == steps) {
      record(time);
    }
  }
  return out;
}

Eigen::VectorXd sample_density(const FourierDensity &density, Index count, std::mt19937_64 &rng) {
  const double ceiling = 1.01 * density.evaluate(kQuadratureNodes).maxCoeff();
  if (!(ceiling > 0.0)) {
    throw std::invalid_argument("sample_density: density is not positive anywhere");
  }
  std::uniform_real_distribution<double> angle(0.0, kTwoPi<double>);
  std::uniform_real_distribution<double> height(0.0, ceiling);
  Eigen::VectorXd out(count);
  for (Index i = 0; i < count;) {
    const double theta = angle(rng);
    if (height(rng) < density.evaluate_at(theta)) {
      out(i++) = wrap(theta);
    }
  }
  return out;
}

void write_density_csv(std::ostream &os, const FourierDensity &density) {
  os << "l,re,im\n" << std::setprecision(17);
  for (Index l = 0; l <= density.order(); ++l) {
    os << l << ',' << density.coeffs(l).real() << ',' << density.coeffs(l).imag() << '\n';
  }
}

FourierDensity read_density_csv(std::istream &is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("l,re,im", 0) != 0) {
    throw std::runtime_error("density csv: expected header 'l,re,im'");
  }
  std::vector<std::complex<double>> values;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    long l = 0;
    double re = 0.0;
    double im = 0.0;
    char c1 = 0;
    char c2 = 0;
    if (!(row >> l >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',' ||
        l != static_cast<long>(values.size())) {
      throw std::runtime_error("density csv: malformed row '" + line + "'");
    }
    values.emplace_back(re, im);
  }
  if (values.size() < 2) {
    throw std::runtime_error("density csv: need rows for l = 0 and at least l = 1");
  }
  FourierDensity out{Eigen::Map<const Eigen::VectorXcd>(values.data(), Index(values.size()))};
  if (std::abs(out.coeffs(0) - 1.0 / kTwoPi<double>) > 1e-9) {
    throw std::runtime_error("density csv: c_0 must equal 1/(2 pi) for a probability density");
  }
  out.coeffs(0) = 1.0 / kTwoPi<double>;
  return out;
}

} // namespace kuramoto
