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

#include "semcache/cost_model.h"

#include <cmath>
#include <limits>

#include "gtest/gtest.h"
#include "semcache/errors.h"
#include "test_util.h"

namespace semcache {
namespace {

using testing::Angle;

TEST(Mismatch, Examples) {
  MismatchFn phi;
  EXPECT_DOUBLE_EQ(phi(0.0), 0.0);
  EXPECT_DOUBLE_EQ(phi(0.2), 0.2);
  EXPECT_DOUBLE_EQ(phi(1.0), 1.0);
  EXPECT_DOUBLE_EQ(phi(std::numeric_limits<double>::infinity()), 1.0);
  MismatchFn steep{3.0};
  EXPECT_DOUBLE_EQ(steep(0.1), 0.30000000000000004);
  EXPECT_DOUBLE_EQ(steep(0.5), 1.0);
}

TEST(TokenCost, MinMaxWithFloor) {
  const std::vector<Embedding> u = {Angle(0), Angle(1), Angle(2), Angle(3)};
  const CostField f = CostField::FromTokenLengths(u, {3, 40, 21, 12}, 0.05);
  EXPECT_EQ(f.mode(), CostMode::kTokenLength);
  EXPECT_DOUBLE_EQ(f.PointCost(0), 0.05);
  EXPECT_DOUBLE_EQ(f.PointCost(1), 1.0);
  EXPECT_DOUBLE_EQ(f.PointCost(2), 18.0 / 37.0);
  EXPECT_DOUBLE_EQ(f.PointCost(3), 9.0 / 37.0);
  // Nearest universe point decides the cost of an arbitrary query.
  EXPECT_DOUBLE_EQ(f.TrueCost(Angle(1.1)), f.PointCost(1));
  EXPECT_DOUBLE_EQ(f.TrueCost(Angle(2.6)), f.PointCost(3));
  EXPECT_FALSE(f.degenerate());
  EXPECT_EQ(f.rkhs_norm(), 0.0);
  EXPECT_THROW(f.PointCost(4), ContractViolation);
}

TEST(TokenCost, DegenerateLengths) {
  const std::vector<Embedding> u = {Angle(0), Angle(1)};
  const CostField f = CostField::FromTokenLengths(u, {7, 7});
  EXPECT_TRUE(f.degenerate());
  EXPECT_DOUBLE_EQ(f.TrueCost(Angle(0.3)), 0.5);
}

TEST(TokenCost, InvalidInputs) {
  const std::vector<Embedding> u = {Angle(0), Angle(1)};
  EXPECT_THROW(CostField::FromTokenLengths(u, {1}), ConfigError);
  EXPECT_THROW(CostField::FromTokenLengths({}, {}), ConfigError);
  EXPECT_THROW(CostField::FromTokenLengths(u, {1, 2}, 0.0), ConfigError);
}

TEST(RkhsCost, ScaleAndNorm) {
  const std::vector<Embedding> a = {Angle(0), Angle(2)};
  const std::vector<double> w = {1.0, 0.5};
  const KernelSpec k{1.0, 1.0};
  const CostField f = CostField::SyntheticRkhs(a, w, k, 0.01);
  const double k01 = k.Eval(a[0], a[1]);
  const double raw0 = 1.0 + 0.5 * k01;
  const double raw1 = k01 + 0.5;
  const double scale = 1.0 / std::max(raw0, raw1);
  EXPECT_NEAR(f.Unclamped(a[0]), scale * raw0, 1e-15);
  EXPECT_NEAR(f.TrueCost(a[0]), 1.0, 1e-15);
  EXPECT_NEAR(f.TrueCost(a[1]), scale * raw1, 1e-15);
  EXPECT_NEAR(f.rkhs_norm(), scale * std::sqrt(1.0 + 2 * 0.5 * k01 + 0.25),
              1e-15);
  // Far from both anchors the floor applies.
  const CostField narrow = CostField::SyntheticRkhs(a, w, KernelSpec{0.05, 1}, 0.2);
  EXPECT_DOUBLE_EQ(narrow.TrueCost(Angle(1.0)), 0.2);
}

TEST(RkhsCost, InvalidWeights) {
  const std::vector<Embedding> a = {Angle(0), Angle(2)};
  EXPECT_THROW(CostField::SyntheticRkhs(a, {1.0, -0.1}, KernelSpec{}), ConfigError);
  EXPECT_THROW(CostField::SyntheticRkhs(a, {0.0, 0.0}, KernelSpec{}), ConfigError);
  EXPECT_THROW(CostField::SyntheticRkhs(a, {1.0}, KernelSpec{}), ConfigError);
}

TEST(Noise, ClippedAndUnbiased) {
  const std::vector<Embedding> u = {Angle(0), Angle(1)};
  const CostField f = CostField::FromTokenLengths(u, {10, 20});
  Rng rng(7);
  NoiseSpec none{0.0, true};
  EXPECT_DOUBLE_EQ(SampleCost(f, none, Angle(1), rng), 1.0);
  NoiseSpec clip{0.3, true};
  for (int i = 0; i < 1000; ++i) {
    const double y = SampleAround(0.95, clip, rng);
    ASSERT_GE(y, 0.0);
    ASSERT_LE(y, 1.0);
  }
  NoiseSpec raw{0.1, false};
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += SampleAround(0.5, raw, rng);
  EXPECT_NEAR(sum / n, 0.5, 4 * 0.1 / std::sqrt(n));
}

}  // namespace
}  // namespace semcache
