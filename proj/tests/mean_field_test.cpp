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
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "kuramoto/mean_field.hpp"
#include "pde_oracles.hpp"

namespace kuramoto {
namespace {

using namespace oracle;

constexpr double kPi = std::numbers::pi;
const std::complex<double> kI(0.0, 1.0);

// Derivative of the quadratic mode map in direction v (v_0 = 0).
Eigen::VectorXcd rhs_derivative(const FourierDensity &c, const Eigen::VectorXcd &v,
                                double coupling) {
  const Index order = c.order();
  const auto cv = [&](Index l) { return l <= order ? c.coeffs(l) : 0.0; };
  const auto vv = [&](Index l) { return l >= 1 && l <= order ? v(l - 1) : 0.0; };
  Eigen::VectorXcd out(order);
  for (Index l = 1; l <= order; ++l) {
    out(l - 1) = -0.5 * double(l * l) * vv(l) +
                 double(l) * kPi * coupling *
                     (vv(1) * cv(l - 1) + c.coeffs(1) * vv(l - 1) - std::conj(vv(1)) * cv(l + 1) -
                      std::conj(c.coeffs(1)) * vv(l + 1));
  }
  return out;
}

TEST(Psi, Examples) {
  EXPECT_EQ(psi(0.0), 0.0);
  EXPECT_GT(psi(50.0), 0.98);
  EXPECT_LT(psi(50.0), 1.0);
  EXPECT_THROW(psi(-1.0), std::invalid_argument);
}

TEST(Psi, MatchesBesselRatio) {
  for (double x : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 20.0}) {
    EXPECT_NEAR(psi(x), std::cyl_bessel_i(1.0, x) / std::cyl_bessel_i(0.0, x), 1e-13) << x;
  }
}

TEST(Psi, StrictlyIncreasing) {
  double previous = psi(0.0);
  for (int k = 1; k <= 100; ++k) {
    const double value = psi(0.1 * k);
    EXPECT_GT(value, previous);
    previous = value;
  }
}

TEST(SyncState, NoSyncAtOrBelowCritical) {
  for (double k : {0.0, 0.5, 0.99, 1.0}) {
    EXPECT_FALSE(solve_sync_state(k).has_value()) << k;
  }
  EXPECT_THROW(solve_sync_state(-0.1), std::invalid_argument);
}

TEST(SyncState, FixedPointAndMoments) {
  for (double k : {1.2, 2.0, 5.0}) {
    const auto sync = solve_sync_state(k, 64);
    ASSERT_TRUE(sync.has_value());
    EXPECT_GT(sync->r, 0.0);
    EXPECT_LT(sync->r, 1.0);
    EXPECT_LE(std::abs(sync->r - psi(2 * k * sync->r)), 1e-10);
    EXPECT_LE(std::abs(sync->moments(0) - sync->r), 1e-10);
    const double x = 2 * k * sync->r;
    EXPECT_NEAR(sync->normalizer, 2 * kPi * std::cyl_bessel_i(0.0, x), 1e-10 * sync->normalizer);
    for (Index l = 1; l <= 20; ++l) {
      const double expected = std::cyl_bessel_i(double(l), x) / std::cyl_bessel_i(0.0, x);
      EXPECT_NEAR(sync->moments(l - 1), expected, 1e-12);
      // Ordering is only resolvable above the quadrature roundoff.
      if (expected > 1e-13) {
        EXPECT_GT(sync->moments(l - 1), 0.0);
        if (l > 1) {
          EXPECT_LT(sync->moments(l - 1), sync->moments(l - 2));
        }
      }
    }
  }
}

TEST(Density, UniformAndCardioid) {
  EXPECT_TRUE(density_moments(FourierDensity::uniform(8), 8).moments.isZero());
  const FourierDensity cardioid = FourierDensity::cardioid(0.6, 8);
  EXPECT_NEAR(density_moments(cardioid, 8).moment(1).real(), 0.3, 1e-15);
  EXPECT_NEAR(cardioid.evaluate_at(0.0), 1.6 / (2 * kPi), 1e-15);
  EXPECT_THROW(FourierDensity::cardioid(1.5, 8), std::invalid_argument);
  EXPECT_THROW(density_moments(cardioid, 9), std::invalid_argument);
}

TEST(Density, StationaryProfileMomentsAndValues) {
  const auto sync = solve_sync_state(2.0, 64);
  const FourierDensity q = stationary_density(*sync, 64);
  EXPECT_NEAR(density_moments(q, 64).moment(1).real(), sync->r, 1e-12);
  for (double theta : {0.0, 1.0, 2.5}) {
    EXPECT_NEAR(q.evaluate_at(theta), std::exp(2 * 2.0 * sync->r * std::cos(theta)) / sync->normalizer,
                1e-12);
  }
  const FourierDensity shifted = stationary_density(*sync, 64, 0.7);
  EXPECT_NEAR(shifted.evaluate_at(1.2), q.evaluate_at(0.5), 1e-12);
}

TEST(Density, SamplingMatchesMoments) {
  const auto sync = solve_sync_state(2.0, 16);
  const FourierDensity q = stationary_density(*sync, 16);
  std::mt19937_64 rng(5);
  const auto empirical = empirical_spectrum(sample_density(q, 100000, rng), 8);
  const auto analytic = density_moments(q, 8);
  for (Index l = 1; l <= 8; ++l) {
    EXPECT_LT(std::abs(empirical.moment(l) - analytic.moment(l)), 3e-2);
  }
}

TEST(Density, CsvRoundTrip) {
  std::mt19937_64 rng(6);
  const FourierDensity density = random_density(10, rng);
  std::stringstream buffer;
  write_density_csv(buffer, density);
  EXPECT_EQ(read_density_csv(buffer).coeffs, density.coeffs);

  std::stringstream bad("l,re,im\n0,0.2,0\n1,0,0\n");
  EXPECT_THROW(read_density_csv(bad), std::runtime_error);
}

TEST(PdeRhs, UniformIsStationary) {
  EXPECT_TRUE(pde_rhs(FourierDensity::uniform(16), 3.0).isZero());
}

TEST(PdeRhs, MatchesPseudoSpectralOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coupling(0.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const FourierDensity state = random_density(24, rng);
    const double k = coupling(rng);
    const Eigen::VectorXcd oracle = pseudo_spectral_rhs(state, k);
    const Eigen::VectorXcd actual = pde_rhs(state, k);
    EXPECT_LE((actual - oracle).cwiseAbs().maxCoeff(), 1e-10 * oracle.cwiseAbs().maxCoeff());
  }
}

TEST(PdeRhs, StationaryProfileResidual) {
  const auto sync = solve_sync_state(2.0, 128);
  const FourierDensity q = stationary_density(*sync, 128);
  EXPECT_LE(pde_rhs(q, 2.0).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(PdeRhs, LinearisedModeOneRate) {
  for (double k : {0.2, 0.5, 0.8}) {
    FourierDensity state = FourierDensity::uniform(8);
    state.coeffs(1) = 1e-8;
    EXPECT_NEAR(pde_rhs(state, k)(0).real() / 1e-8, -(1.0 - k) / 2.0, 1e-7);
  }
}

TEST(PdeRhs, DirectionalDerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    const FourierDensity c = random_density(16, rng);
    Eigen::VectorXcd v(16);
    for (Index l = 0; l < 16; ++l) {
      v(l) = {normal(rng), normal(rng)};
    }
    v /= v.norm();
    const double h = 1e-6;
    FourierDensity plus = c;
    FourierDensity minus = c;
    plus.coeffs.tail(16) += h * v;
    minus.coeffs.tail(16) -= h * v;
    const Eigen::VectorXcd fd = (pde_rhs(plus, 2.0) - pde_rhs(minus, 2.0)) / (2 * h);
    const Eigen::VectorXcd exact = rhs_derivative(c, v, 2.0);
    EXPECT_LE((fd - exact).norm(), 1e-5 * exact.norm());
  }
}

TEST(PdeSolve, UniformStaysUniform) {
  const PdeTrajectory run = pde_solve(FourierDensity::uniform(32), 2.0, {0.01, 1.0, 10});
  ASSERT_EQ(run.records.size(), 11u);
  for (const auto &rec : run.records) {
    EXPECT_TRUE(rec.density.coeffs.tail(32).isZero());
  }
}

TEST(PdeSolve, MassExactlyConserved) {
  std::mt19937_64 rng(9);
  const PdeTrajectory run = pde_solve(random_density(64, rng), 3.0, {0.01, 5.0, 7});
  for (const auto &rec : run.records) {
    EXPECT_EQ(rec.density.coeffs(0), std::complex<double>(1.0 / (2 * kPi), 0.0));
  }
}

TEST(PdeSolve, RecordsIncludeEndpoints) {
  const PdeTrajectory run = pde_solve(FourierDensity::cardioid(0.5, 16), 1.0, {0.01, 0.55, 10});
  ASSERT_EQ(run.records.size(), 7u);
  EXPECT_EQ(run.records.front().time, 0.0);
  EXPECT_NEAR(run.records.back().time, 0.55, 1e-12);
}

TEST(PdeSolve, SubcriticalDecayRate) {
  for (double k : {0.2, 0.5, 0.8}) {
    FourierDensity init = FourierDensity::uniform(64);
    init.coeffs(1) = 1e-6 / (2 * kPi);
    const PdeTrajectory run = pde_solve(init, k, {0.01, 10.0, 10});
    const double expected = (1.0 - k) / 2.0;
    EXPECT_NEAR(log_decay_rate(run, 1.0, 10.0), expected, 0.05 * expected) << k;
  }
}

TEST(PdeSolve, RotationEquivariance) {
  std::mt19937_64 rng(10);
  const FourierDensity init = random_density(48, rng);
  const double alpha = 1.3;
  FourierDensity rotated = init;
  for (Index l = 1; l <= 48; ++l) {
    rotated.coeffs(l) *= std::polar(1.0, -double(l) * alpha);
  }
  const auto a = pde_solve(init, 2.5, {0.01, 3.0, 300}).records.back().density;
  const auto b = pde_solve(rotated, 2.5, {0.01, 3.0, 300}).records.back().density;
  for (Index l = 1; l <= 48; ++l) {
    EXPECT_LT(std::abs(b.coeffs(l) - a.coeffs(l) * std::polar(1.0, -double(l) * alpha)), 1e-10);
  }
}

TEST(PdeSolve, RefinementInL) {
  std::mt19937_64 rng(11);
  const FourierDensity coarse = random_density(64, rng);
  FourierDensity fine = FourierDensity::uniform(128);
  fine.coeffs.head(65) = coarse.coeffs;
  const auto a = pde_solve(coarse, 2.0, {0.001, 2.0, 100});
  const auto b = pde_solve(fine, 2.0, {0.001, 2.0, 100});
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    if (a.records[k].time < 0.1) {
      continue;
    }
    const Eigen::VectorXcd diff = a.records[k].density.coeffs - b.records[k].density.coeffs.head(65);
    EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(PdeSolve, TimeStepConvergence) {
  std::mt19937_64 rng(12);
  const FourierDensity init = random_density(32, rng);
  const auto coarse = pde_solve(init, 2.0, {0.01, 1.0, 100}).records.back().density;
  const auto mid = pde_solve(init, 2.0, {0.005, 1.0, 200}).records.back().density;
  const auto fine = pde_solve(init, 2.0, {0.0025, 1.0, 400}).records.back().density;
  const double e1 = (coarse.coeffs - fine.coeffs).norm();
  const double e2 = (mid.coeffs - fine.coeffs).norm();
  // Second order: halving dt cuts the error by about 4 (3 against the
  // finest run as reference).
  EXPECT_GT(e1 / e2, 2.5);
}

TEST(PdeSolve, ExplicitModeAgreesAndIsGuarded) {
  std::mt19937_64 rng(13);
  const FourierDensity init = random_density(8, rng);
  PdeOptions options{0.002, 0.5, 250, false};
  EXPECT_THROW(pde_solve(init, 2.0, {0.01, 0.5, 1, false}), std::invalid_argument);
  const auto explicit_run = pde_solve(init, 2.0, options).records.back().density;
  options.integrating_factor = true;
  const auto factor_run = pde_solve(init, 2.0, options).records.back().density;
  EXPECT_LT((explicit_run.coeffs - factor_run.coeffs).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(PdeSolve, ConvergesToSynchronisedProfile) {
  const auto sync = solve_sync_state(2.0, 64);
  const PdeTrajectory run = pde_solve(FourierDensity::cardioid(0.2, 64), 2.0, {0.01, 100.0, 10000});
  const auto final_moments = density_moments(run.records.back().density, 64);
  const double phase = std::arg(final_moments.moment(1));
  const auto target = density_moments(stationary_density(*sync, 64, phase), 64);
  EXPECT_LE(hminus1_distance(final_moments, target).value, 1e-4);
  EXPECT_EQ(run.positivity_violations, 0);
}

TEST(PdeSolve, StationaryResidualIsSecondOrderInDt) {
  // The discrete flow settles on a fixed point of the step map, which is
  // O(dt^2) away from the zero set of the right-hand side.
  std::vector<double> floor;
  for (double dt : {0.02, 0.01, 0.005}) {
    std::mt19937_64 rng(14);
    const PdeTrajectory run = pde_solve(random_density(64, rng), 2.0, {dt, 40.0, 100});
    const double last = pde_rhs(run.records.back().density, 2.0).norm();
    const double before = pde_rhs(run.records[run.records.size() - 2].density, 2.0).norm();
    EXPECT_NEAR(last, before, 1e-3 * last) << dt;
    floor.push_back(last);
  }
  EXPECT_NEAR(floor[0] / floor[1], 4.0, 0.3);
  EXPECT_NEAR(floor[1] / floor[2], 4.0, 0.3);
}

TEST(PdeSolve, PositivityMonitor) {
  std::mt19937_64 rng(15);
  EXPECT_EQ(pde_solve(random_density(32, rng), 2.0, {0.01, 1.0, 10}).positivity_violations, 0);
  // A truncated point mass oscillates below zero until diffusion smooths it.
  const FourierDensity spike = FourierDensity::from_spectrum(point_mass_spectrum(0.0, 64));
  const PdeTrajectory run = pde_solve(spike, 2.0, {0.01, 0.5, 1});
  EXPECT_GT(run.positivity_violations, 0);
  EXPECT_LT(run.min_density, -1e-6);
}

TEST(PdeSolve, BlowUpGuard) {
  FourierDensity init = FourierDensity::uniform(32);
  init.coeffs(1) = 0.1;
  EXPECT_THROW(pde_solve(init, 1e4, {0.01, 10.0, 1}), std::runtime_error);
}

} // namespace
} // namespace kuramoto
