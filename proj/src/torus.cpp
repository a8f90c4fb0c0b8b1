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

#include "kuramoto/torus.hpp"
#include "kuramoto/rng_audit.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

namespace kuramoto {

namespace {

constexpr Index kTestGridSize = 64;

// Zero-mean periodic piecewise linear function on an equispaced grid,
// scaled so that the integral of its squared derivative is one.
class PiecewiseLinearTest {
public:
  explicit PiecewiseLinearTest(std::mt19937_64 &rng) : nodes_(kTestGridSize) {
    std::normal_distribution<double> normal;
    for (Index k = 0; k < kTestGridSize; ++k) {
      nodes_(k) = normal(rng);
    }
    nodes_.array() -= nodes_.mean();
    const double h = kTwoPi<double> / kTestGridSize;
    double energy = 0.0;
    for (Index k = 0; k < kTestGridSize; ++k) {
      const double diff = nodes_((k + 1) % kTestGridSize) - nodes_(k);
      energy += diff * diff / h;
    }
    nodes_ /= std::sqrt(energy);
  }

  double operator()(double theta) const {
    const double h = kTwoPi<double> / kTestGridSize;
    const double x = wrap(theta) / h;
    Index k = static_cast<Index>(x);
    k = std::min(k, kTestGridSize - 1);
    const double frac = x - static_cast<double>(k);
    return (1.0 - frac) * nodes_(k) + frac * nodes_((k + 1) % kTestGridSize);
  }

  double integrate(const Eigen::VectorXd &angles) const {
    double sum = 0.0;
    for (Index j = 0; j < angles.size(); ++j) {
      sum += (*this)(angles(j));
    }
    return sum / static_cast<double>(angles.size());
  }

private:
  Eigen::VectorXd nodes_;
};

double bl_search(const Eigen::VectorXd &angles_a, const Eigen::VectorXd *angles_b, int trials,
                 std::uint64_t seed) {
  if (angles_a.size() == 0 || (angles_b != nullptr && angles_b->size() == 0)) {
    throw std::invalid_argument("bl_lower_bound: empty angle list");
  }
  if (trials < 1) {
    throw std::invalid_argument("bl_lower_bound: trials must be >= 1");
  }
  rng_audit::note(seed);
  std::mt19937_64 rng(seed);
  double best = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const PiecewiseLinearTest h(rng);
    double gap = h.integrate(angles_a);
    if (angles_b != nullptr) {
      gap -= h.integrate(*angles_b);
    }
    best = std::max(best, std::abs(gap));
  }
  return best;
}

} // namespace

double bl_lower_bound(const Eigen::VectorXd &angles_a, const Eigen::VectorXd &angles_b,
                      int trials, std::uint64_t seed) {
  return bl_search(angles_a, &angles_b, trials, seed);
}

double bl_lower_bound_uniform(const Eigen::VectorXd &angles, int trials, std::uint64_t seed) {
  return bl_search(angles, nullptr, trials, seed);
}

void write_spectrum_csv(std::ostream &os, const EmpiricalSpectrum &spectrum) {
  os << "l,re,im\n" << std::setprecision(17);
  for (Index l = 1; l <= spectrum.order(); ++l) {
    os << l << ',' << spectrum.moment(l).real() << ',' << spectrum.moment(l).imag() << '\n';
  }
}

EmpiricalSpectrum read_spectrum_csv(std::istream &is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("l,re,im", 0) != 0) {
    throw std::runtime_error("spectrum csv: expected header 'l,re,im'");
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
    if (!(row >> l >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',') {
      throw std::runtime_error("spectrum csv: malformed row '" + line + "'");
    }
    if (l != static_cast<long>(values.size()) + 1) {
      throw std::runtime_error("spectrum csv: modes must be listed as 1, 2, ..., L");
    }
    values.emplace_back(re, im);
  }
  if (values.empty()) {
    throw std::runtime_error("spectrum csv: no modes");
  }
  EmpiricalSpectrum out;
  out.moments = Eigen::Map<const Eigen::VectorXcd>(values.data(), Index(values.size()));
  return out;
}

void write_angles(std::ostream &os, const Eigen::VectorXd &angles) {
  os << std::setprecision(17);
  for (Index i = 0; i < angles.size(); ++i) {
    os << angles(i) << '\n';
  }
}

Eigen::VectorXd read_angles(std::istream &is) {
  std::vector<double> values;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(line, &used);
    } catch (const std::exception &) {
      throw std::runtime_error("angle list: cannot parse '" + line + "'");
    }
    if (line.find_first_not_of(" \t\r", used) != std::string::npos) {
      throw std::runtime_error("angle list: trailing text in '" + line + "'");
    }
    values.push_back(wrap(x));
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), Index(values.size()));
}

} // namespace kuramoto
