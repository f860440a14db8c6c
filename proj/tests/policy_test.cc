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

#include "semcache/policy.h"

#include "gtest/gtest.h"
#include "semcache/errors.h"
#include "test_util.h"

namespace semcache {
namespace {

using testing::Angle;

TEST(StageScheduler, HandSchedule) {
  StageScheduler s(100);
  s.AddCenter();
  EXPECT_FALSE(s.Check(1));
  s.RecordObservation(0);
  s.RecordArrival();
  // Empty past stage: the first observation closes it.
  EXPECT_TRUE(s.Check(1));
  EXPECT_EQ(s.stage(0), 2u);
  EXPECT_EQ(s.past(0), 1u);
  EXPECT_EQ(s.current(0), 0u);
  EXPECT_EQ(s.global_stage(), 2u);
  // Next limit is 1 + sqrt(100 * 1) = 11.
  for (int i = 0; i < 10; ++i) {
    s.RecordObservation(0);
    s.RecordArrival();
    EXPECT_FALSE(s.Check(1)) << i;
  }
  s.RecordObservation(0);
  s.RecordArrival();
  EXPECT_TRUE(s.Check(1));
  EXPECT_EQ(s.past(0), 12u);
  EXPECT_EQ(s.global_past(), 12u);
  EXPECT_EQ(s.local_advances(), 2u);
  EXPECT_EQ(s.global_advances(), 2u);
}

TEST(StageScheduler, LocalLimitScalesWithCenterCount) {
  StageScheduler s(100);
  s.AddCenter();
  s.AddCenter();
  s.RecordObservation(1);
  EXPECT_TRUE(s.Check(2));
  // With m = 4 the limit is 1 + sqrt(25 * 1) = 6.
  for (int i = 0; i < 5; ++i) s.RecordObservation(1);
  EXPECT_FALSE(s.Check(4));
  s.RecordObservation(1);
  EXPECT_TRUE(s.Check(4));
  EXPECT_EQ(s.stage(1), 3u);
  EXPECT_EQ(s.stage(0), 1u);
  EXPECT_THROW(StageScheduler(0), ConfigError);
}

class SelectionTest : public ::testing::Test {
 protected:
  SelectionTest()
      : field_(CostField::FromTokenLengths(points_, {10, 20, 30}, 0.01)) {
    env_.field = &field_;
    env_.noise = {0.0, true};
  }
  std::vector<Embedding> points_ = {Angle(0), Angle(1), Angle(2)};
  CostField field_;
  Environment env_;
};

TEST_F(SelectionTest, PaysOnlyForNewEntries) {
  CacheState cache(2);
  bool changed = false;
  const std::vector<std::size_t> first = {0, 1};
  double pay = ApplyCacheSelection(cache, first, points_, env_, &changed);
  EXPECT_TRUE(changed);
  EXPECT_DOUBLE_EQ(pay, field_.PointCost(0) + field_.PointCost(1));
  const auto handles = cache.entries();

  pay = ApplyCacheSelection(cache, first, points_, env_, &changed);
  EXPECT_FALSE(changed);
  EXPECT_EQ(pay, 0.0);
  EXPECT_EQ(cache.entries()[1].response_handle, handles[1].response_handle);

  const std::vector<std::size_t> next = {1, 2};
  pay = ApplyCacheSelection(cache, next, points_, env_, &changed);
  EXPECT_TRUE(changed);
  EXPECT_DOUBLE_EQ(pay, field_.PointCost(2));
  EXPECT_EQ(cache.Keys(), next);
  EXPECT_EQ(cache.entries()[0].response_handle, handles[1].response_handle);

  const std::vector<std::size_t> shrink = {2};
  ApplyCacheSelection(cache, shrink, points_, env_, &changed);
  EXPECT_TRUE(changed);
  EXPECT_EQ(cache.size(), 1u);
}

TEST_F(SelectionTest, RejectsBadSelections) {
  CacheState cache(1);
  bool changed;
  const std::vector<std::size_t> two = {0, 1};
  EXPECT_THROW(ApplyCacheSelection(cache, two, points_, env_, &changed),
               ContractViolation);
  const std::vector<std::size_t> bad = {7};
  EXPECT_THROW(ApplyCacheSelection(cache, bad, points_, env_, &changed),
               ContractViolation);
}

}  // namespace
}  // namespace semcache
