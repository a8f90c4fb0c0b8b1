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

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "kuramoto/torus.hpp"

namespace kuramoto {
namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd random_angles(Index n, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    out(i) = angle(rng);
  }
  return out;
}

// Direct evaluation of (1/n) sum_j exp(i l theta_j), one cos/sin per term.
std::complex<double> direct_moment(const Eigen::VectorXd &angles, Index l) {
  std::complex<double> sum = 0.0;
  for (Index j = 0; j < angles.size(); ++j) {
    sum += std::polar(1.0, double(l) * angles(j));
  }
  return sum / double(angles.size());
}

TEST(Wrap, Examples) {
  EXPECT_EQ(wrap(0.0), 0.0);
  EXPECT_EQ(wrap(2.0 * kPi), 0.0);
  EXPECT_NEAR(wrap(-kPi / 2.0), 3.0 * kPi / 2.0, 1e-15);
  EXPECT_NEAR(wrap(7.0 * kPi), kPi, 1e-14);
}

TEST(Wrap, StaysInRangeForTinyNegatives) {
  for (double x : {-1e-300, -1e-17, -std::numeric_limits<double>::denorm_min(), -4e-16}) {
    const double w = wrap(x);
    EXPECT_GE(w, 0.0);
    EXPECT_LT(w, 2.0 * kPi);
  }
}

TEST(Wrap, RejectsNonFinite) {
  EXPECT_THROW(wrap(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
  EXPECT_THROW(wrap(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(EmpiricalSpectrum, Examples) {
  const auto point = empirical_spectrum(Eigen::Vector3d::Zero(), 5);
  for (Index l = 1; l <= 5; ++l) {
    EXPECT_EQ(point.moment(l), std::complex<double>(1.0, 0.0));
  }
  EXPECT_EQ(point.source_size, 3);

  const auto antipodal = empirical_spectrum(Eigen::Vector2d(0.0, kPi), 2);
  EXPECT_LT(std::abs(antipodal.moment(1)), 1e-15);
  EXPECT_NEAR(std::abs(antipodal.moment(2) - 1.0), 0.0, 1e-15);

  const auto square = empirical_spectrum(Eigen::Vector4d(0.0, kPi / 2, kPi, 3 * kPi / 2), 4);
  for (Index l = 1; l <= 3; ++l) {
    EXPECT_LT(std::abs(square.moment(l)), 1e-15);
  }
  EXPECT_NEAR(std::abs(square.moment(4) - 1.0), 0.0, 1e-14);
}

TEST(EmpiricalSpectrum, RejectsBadInput) {
  EXPECT_THROW(empirical_spectrum(Eigen::VectorXd(0), 3), std::invalid_argument);
  EXPECT_THROW(empirical_spectrum(Eigen::VectorXd::Zero(3), 0), std::invalid_argument);
}

TEST(EmpiricalSpectrum, MatchesDirectSumAtHighOrder) {
  std::mt19937_64 rng(11);
  const Eigen::VectorXd angles = random_angles(300, rng);
  const auto spectrum = empirical_spectrum(angles, 1000);
  for (Index l : {1, 2, 63, 64, 65, 127, 128, 500, 999, 1000}) {
    EXPECT_LT(std::abs(spectrum.moment(l) - direct_moment(angles, l)), 1e-12) << "l = " << l;
  }
}

TEST(EmpiricalSpectrum, MomentsBoundedByOne) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto spectrum = empirical_spectrum(random_angles(1 + trial, rng), 300);
    EXPECT_LE(spectrum.moments.cwiseAbs().maxCoeff(), 1.0 + 1e-14);
  }
}

TEST(EmpiricalSpectrum, RotationCovariance) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> shift(-10.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd angles = random_angles(50, rng);
    const double alpha = shift(rng);
    Eigen::VectorXd moved = angles.array() + alpha;
    wrap_in_place(moved);
    const auto expected = rotate(empirical_spectrum(angles, 64), alpha);
    const auto actual = empirical_spectrum(moved, 64);
    for (Index l = 1; l <= 64; ++l) {
      const double scale = std::max(std::abs(expected.moment(l)), 1.0 / std::sqrt(50.0));
      EXPECT_LT(std::abs(actual.moment(l) - expected.moment(l)), 1e-12 * scale);
    }
  }
}

TEST(EmpiricalSpectrum, WorksInLongDouble) {
  Eigen::Matrix<long double, Eigen::Dynamic, 1> angles(2);
  angles << 0.0L, std::numbers::pi_v<long double>;
  const auto spectrum = empirical_spectrum(angles, 2);
  EXPECT_LT(std::abs(spectrum.moment(1)), 1e-18L);
}

TEST(HMinus1, Examples) {
  std::mt19937_64 rng(14);
  const auto a = empirical_spectrum(random_angles(20, rng), 32);
  EXPECT_EQ(hminus1_distance(a, a).value, 0.0);

  auto b = a;
  b.moments(0) += std::polar(0.37, 1.1);
  EXPECT_NEAR(hminus1_distance(a, b).value, 0.37, 1e-15);
}

TEST(HMinus1, PointMassVersusUniform) {
  // sum_{l <= L} 1/l^2 -> pi^2 / 6.
  const Index order = 10000;
  const auto d = hminus1_distance(point_mass_spectrum(0.0, order), uniform_spectrum(order));
  EXPECT_NEAR(d.value, kPi / std::sqrt(6.0), 1e-3);
  EXPECT_NEAR(d.value, kPi / std::sqrt(6.0), d.tail_bound);
  EXPECT_DOUBLE_EQ(d.tail_bound, 0.02);
}

TEST(HMinus1, RejectsMismatchedOrders) {
  EXPECT_THROW(hminus1_distance(uniform_spectrum(3), uniform_spectrum(4)), std::invalid_argument);
}

TEST(HMinus1, TriangleInequality) {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<int> size(1, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = empirical_spectrum(random_angles(size(rng), rng), 48);
    const auto b = empirical_spectrum(random_angles(size(rng), rng), 48);
    const auto c = empirical_spectrum(random_angles(size(rng), rng), 48);
    EXPECT_LE(hminus1_distance(a, c).value,
              hminus1_distance(a, b).value + hminus1_distance(b, c).value + 1e-12);
  }
}

TEST(BlLowerBound, ZeroForIdenticalAngles) {
  std::mt19937_64 rng(16);
  const Eigen::VectorXd angles = random_angles(100, rng);
  EXPECT_EQ(bl_lower_bound(angles, angles, 16, 1), 0.0);
}

TEST(BlLowerBound, NeverExceedsHMinus1PlusTail) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd a = random_angles(1 + trial % 7, rng);
    const Eigen::VectorXd b = random_angles(1 + trial % 5, rng);
    const auto d = hminus1_distance(empirical_spectrum(a, 256), empirical_spectrum(b, 256));
    EXPECT_LE(bl_lower_bound(a, b, 32, std::uint64_t(trial)), d.value + d.tail_bound);
  }
}

TEST(BlLowerBound, SeparatesDistinctPointMasses) {
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(1, 0.0);
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(1, kPi);
  EXPECT_GT(bl_lower_bound(a, b, 64, 3), 0.1);
}

TEST(BlLowerBound, UniformSamplesAreClose) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(100 + seed);
    EXPECT_LE(bl_lower_bound_uniform(random_angles(10000, rng), 16, seed), 0.05);
  }
}

TEST(Io, SpectrumRoundTrip) {
  std::mt19937_64 rng(18);
  const auto spectrum = empirical_spectrum(random_angles(7, rng), 9);
  std::stringstream buffer;
  write_spectrum_csv(buffer, spectrum);
  const auto back = read_spectrum_csv(buffer);
  ASSERT_EQ(back.order(), 9);
  EXPECT_EQ(back.moments, spectrum.moments);
}

TEST(Io, AnglesRoundTrip) {
  std::mt19937_64 rng(19);
  const Eigen::VectorXd angles = random_angles(25, rng);
  std::stringstream buffer;
  write_angles(buffer, angles);
  EXPECT_EQ(read_angles(buffer), angles);
}

TEST(Io, AnglesRejectGarbage) {
  std::stringstream buffer("0.5\n1.0x\n");
  EXPECT_THROW(read_angles(buffer), std::runtime_error);
}

} // namespace
} // namespace kuramoto
