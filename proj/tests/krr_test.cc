// Copyright 2026 The Authors.
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

#include "semcache/krr.h"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "gtest/gtest.h"
#include "semcache/errors.h"
#include "test_util.h"

namespace semcache {
namespace {

using testing::RandomUnit;

Embedding Point(std::initializer_list<double> c) { return Embedding(c); }

// Independent batch posterior from a dense LLT of (K + ridge I).
Posterior BatchPosterior(const KernelSpec& k, double ridge,
                         const std::vector<Embedding>& z,
                         const std::vector<double>& y, const Embedding& x) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd K(n, n);
  Eigen::VectorXd kx(n), yv(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) K(i, j) = k.Eval(z[i], z[j]);
    kx(i) = k.Eval(z[i], x);
    yv(i) = y[i];
  }
  K.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  const double mean = kx.dot(llt.solve(yv));
  const double var = 1.0 - kx.dot(llt.solve(kx));
  return {mean, std::sqrt(std::max(0.0, var))};
}

double BatchLogDet(const KernelSpec& k, double ridge,
                   const std::vector<Embedding>& z) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M(i, j) += k.Eval(z[i], z[j]) / ridge;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

TEST(Kernel, RawEuclideanRbf) {
  KernelSpec k{0.5, 1.0};
  EXPECT_DOUBLE_EQ(k.Eval(Point({0, 0}), Point({0, 0})), 1.0);
  // ||a - b||^2 = 1, 2 l^2 = 0.5.
  EXPECT_NEAR(k.Eval(Point({0, 0}), Point({1, 0})), std::exp(-2.0), 1e-15);
}

TEST(Krr, PriorWithoutObservations) {
  KrrModel m(KernelSpec{}, 1.0);
  const Posterior p = m.Predict(Point({1, 0}));
  EXPECT_EQ(p.mean, 0.0);
  EXPECT_EQ(p.sigma, 1.0);
  EXPECT_EQ(m.info_gain(), 0.0);
}

TEST(Krr, SingleObservationByHand) {
  KrrModel m(KernelSpec{0.5, 1.0}, 1.0);
  const Embedding z = Point({0.6, 0.8});
  m.Append(z, 0.7);
  const Posterior p = m.Predict(z);
  EXPECT_NEAR(p.mean, 0.35, 1e-9);  // jitter on the Gram diagonal
  EXPECT_NEAR(p.sigma * p.sigma, 0.5, 1e-9);
  EXPECT_NEAR(m.info_gain(), 0.5 * std::log(2.0), 1e-12);
  EXPECT_EQ(m.size(), 1u);
}

TEST(Krr, MatchesBatchSolveAndProbes) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const KernelSpec k{0.3 + 0.2 * trial, 1.0};
    const double ridge = trial % 2 ? 0.1 : 2.0;
    KrrModel m(k, ridge);
    std::vector<Embedding> grid;
    for (int g = 0; g < 8; ++g) grid.push_back(RandomUnit(3, rng));
    for (const auto& g : grid) m.AddProbe(g);
    std::vector<Embedding> z;
    std::vector<double> y;
    std::vector<double> prev_sigma(grid.size(), 1.0);
    for (int i = 0; i < 25; ++i) {
      z.push_back(RandomUnit(3, rng));
      y.push_back(u(rng));
      m.Append(z.back(), y.back());
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const Posterior want = BatchPosterior(k, ridge, z, y, grid[g]);
        const Posterior got = m.Predict(grid[g]);
        const Posterior probe = m.ProbePosterior(g);
        ASSERT_NEAR(got.mean, want.mean, 1e-8);
        ASSERT_NEAR(got.sigma, want.sigma, 1e-8);
        ASSERT_NEAR(probe.mean, want.mean, 1e-8);
        ASSERT_NEAR(probe.sigma, want.sigma, 1e-8);
        ASSERT_LE(probe.sigma, prev_sigma[g] + 1e-12);
        prev_sigma[g] = probe.sigma;
      }
    }
    EXPECT_NEAR(m.info_gain(), 0.5 * BatchLogDet(k, ridge, z), 1e-6);
  }
}

TEST(Krr, ProbeAddedAfterDataIsCurrent) {
  KrrModel m(KernelSpec{0.5, 1.0}, 1.0);
  m.Append(Point({1, 0}), 0.4);
  m.Append(Point({0, 1}), 0.9);
  const std::size_t p = m.AddProbe(Point({0.6, 0.8}));
  EXPECT_NEAR(m.ProbePosterior(p).mean, m.Predict(Point({0.6, 0.8})).mean,
              1e-12);
  EXPECT_THROW(m.ProbePosterior(5), ContractViolation);
}

TEST(Krr, InterpolatesNoiselessData) {
  Rng rng(5);
  KrrModel m(KernelSpec{0.5, 1e-8}, 1e-8);
  std::vector<Embedding> z;
  for (int i = 0; i < 10; ++i) {
    z.push_back(RandomUnit(4, rng));
    m.Append(z.back(), 0.1 * i);
  }
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(m.Predict(z[i]).mean, 0.1 * i, 1e-4);
}

TEST(Krr, RejectsNonFinite) {
  KrrModel m(KernelSpec{}, 1.0);
  EXPECT_THROW(m.Append(Point({1, 0}), std::nan("")), NumericError);
  EXPECT_THROW(KrrModel(KernelSpec{}, 0.0), ConfigError);
}

// Width bound from a single nearest observation, with the ridge term the
// noiseless statement omits: sigma^2 <= 2 (1 - k(x, z*)) + ridge/(1+ridge).
TEST(Krr, GeometricWidthBoundWithRidge) {
  Rng rng(17);
  std::uniform_int_distribution<int> count(1, 12);
  for (int trial = 0; trial < 300; ++trial) {
    const KernelSpec k{0.3 + 0.01 * (trial % 100), 1.0};
    const double ridge = trial % 3 == 0 ? 1.0 : 1e-3;
    KrrModel m(k, ridge);
    const Embedding x = RandomUnit(3, rng);
    double r2 = std::numeric_limits<double>::infinity();
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const Embedding z = RandomUnit(3, rng);
      r2 = std::min(r2, SquaredEuclidean(x, z));
      m.Append(z, 0.5);
    }
    const double kx = std::exp(-r2 / (2 * k.length_scale * k.length_scale));
    const double s = m.Predict(x).sigma;
    ASSERT_LE(s * s, 2 * (1 - kx) + ridge / (1 + ridge) + 1e-9);
    ASSERT_LE(s, 1.0 + 1e-12);
  }
}

TEST(Confidence, OfflineMultiplierByHand) {
  KrrModel m(KernelSpec{0.5, 1.0}, 1.0);
  const Embedding z = Point({1, 0});
  m.Append(z, 0.0);
  ConfidenceSpec c{1.0, 0.1, 0.1};
  const double mult = 1.0 + std::sqrt(std::log(40.0));
  EXPECT_NEAR(OfflineRadiusMultiplier(m, c, 2), mult, 1e-12);
  const Posterior p = m.Predict(z);
  EXPECT_NEAR(PessimisticCost(m, c, p, 2), p.mean + mult * std::sqrt(0.5), 1e-9);
  EXPECT_NEAR(PessimisticCost(m, c, z, 2), p.mean + mult * std::sqrt(0.5), 1e-9);
}

TEST(Confidence, PriorBounds) {
  KrrModel m(KernelSpec{}, 1.0);
  ConfidenceSpec c{2.0, 0.1, 0.05};
  EXPECT_EQ(PessimisticCost(m, c, Point({1, 0}), 5), 1.0);
  c.rkhs_bound = 0.4;
  EXPECT_EQ(PessimisticCost(m, c, Point({1, 0}), 5), 0.4);
  EXPECT_EQ(OptimisticCost(m, c, Point({1, 0})), -0.4);
}

TEST(Confidence, OnlineBetaUsesCurrentGain) {
  KrrModel m(KernelSpec{0.5, 1.0}, 1.0);
  ConfidenceSpec c{1.0, 0.1, 0.05};
  EXPECT_NEAR(OnlineBeta(m, c), 1.0 + 0.1 * std::sqrt(2 * std::log(40.0)), 1e-12);
  m.Append(Point({1, 0}), 0.3);
  const double g = 0.5 * std::log(2.0);
  const double beta = 1.0 + 0.1 * std::sqrt(2 * (g + std::log(40.0)));
  EXPECT_NEAR(OnlineBeta(m, c), beta, 1e-12);
  const Posterior p = m.Predict(Point({1, 0}));
  EXPECT_NEAR(OptimisticCost(m, c, p), 0.15 - beta * std::sqrt(0.5), 1e-9);
}

TEST(Krr, SnapshotFields) {
  KrrModel m(KernelSpec{}, 1.0);
  m.Append(Point({1, 0}), 0.3);
  const std::vector<Embedding> grid = {Point({1, 0}), Point({0, 1})};
  const auto j = m.Snapshot(grid);
  EXPECT_EQ(j.at("observations").get<int>(), 1);
  EXPECT_EQ(j.at("probe_sigma").size(), 2u);
}

}  // namespace
}  // namespace semcache
