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

#include "semcache/offline_learner.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "gtest/gtest.h"
#include "semcache/errors.h"
#include "semcache/workload.h"
#include "test_util.h"

namespace semcache {
namespace {

using testing::Angle;

struct Fixture {
  Universe universe;
  std::optional<CostField> field;
  std::vector<Query> queries;
};

Fixture Make(std::size_t n) {
  Fixture f;
  SyntheticSpec spec;
  spec.universe_size = 12;
  spec.dim = 8;
  f.universe = GenSyntheticUniverse(spec);
  f.field = CostField::FromTokenLengths(f.universe.points, f.universe.token_lengths);
  SyntheticStream s(spec, f.universe);
  for (std::size_t i = 0; i < n; ++i) f.queries.push_back(s.Next());
  return f;
}

TEST(Logging, Propensities) {
  const Fixture f = Make(400);
  Rng rng(1);
  LoggingPolicy all{1.0, {}};
  EXPECT_EQ(LogDataset(f.queries, *f.field, {}, all, rng).cost_observations(), 400u);
  LoggingPolicy none{0.0, {}};
  EXPECT_EQ(LogDataset(f.queries, *f.field, {}, none, rng).cost_observations(), 0u);
  LoggingPolicy per{0.0, std::vector<double>(12, 0.0)};
  per.per_point_nu[3] = 1.0;
  const OfflineDataset d = LogDataset(f.queries, *f.field, {}, per, rng);
  for (const auto& r : d.records) EXPECT_EQ(r.cost.has_value(), r.universe_index == 3);
  EXPECT_EQ(per.PropensityFor(3), 1.0);
  EXPECT_EQ(per.PropensityFor(20), 0.0);
  EXPECT_NE(per.Tag(), all.Tag());
}

TEST(Logging, FileRoundTrip) {
  const Fixture f = Make(50);
  Rng rng(2);
  const OfflineDataset d = LogDataset(f.queries, *f.field, {}, LoggingPolicy{}, rng);
  const auto path = std::filesystem::temp_directory_path() / "semcache_log.jsonl";
  WriteDatasetLog(path, d);
  const OfflineDataset back = ReadDatasetLog(path, f.universe.points);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.records[i].universe_index, d.records[i].universe_index);
    EXPECT_EQ(back.records[i].cost, d.records[i].cost);
    EXPECT_EQ(back.records[i].query, f.universe.points[d.records[i].universe_index]);
  }
  {
    std::ofstream out(path);
    out << "{\"query_index\": 99, \"cost\": 0.5}\n";
  }
  EXPECT_THROW(ReadDatasetLog(path, f.universe.points), ConfigError);
  {
    std::ofstream out(path);
    out << "{\"query_index\": 1, \"cost\": 1.5}\n";
  }
  EXPECT_THROW(ReadDatasetLog(path, f.universe.points), ConfigError);
}

TEST(Offline, SingleObservationByHand) {
  OfflineDataset d;
  d.records.push_back({Angle(0), 0.6, 0});
  d.records.push_back({Angle(0.05), std::nullopt, 0});
  OfflineConfig c;
  c.eps = 0.5;
  c.k = 1;
  c.conf = {1.0, 0.1, 0.1};
  const OfflineResult r = RunOffline(d, c);
  ASSERT_EQ(r.net.size(), 1u);
  EXPECT_DOUBLE_EQ(r.ridge, 1.0);
  EXPECT_EQ(r.cost_observations, 1u);
  EXPECT_NEAR(r.posterior_means[0], 0.3, 1e-9);
  EXPECT_NEAR(r.pessimistic_costs[0],
              0.3 + (1.0 + std::sqrt(std::log(2.0 / 0.1))) * std::sqrt(0.5), 1e-9);
  EXPECT_DOUBLE_EQ(r.propensities[0], 0.5);
  EXPECT_NEAR(r.build_cost, 0.3, 1e-9);
}

TEST(Offline, NoObservationsUsesPrior) {
  const Fixture f = Make(100);
  Rng rng(3);
  const OfflineDataset d =
      LogDataset(f.queries, *f.field, {}, LoggingPolicy{0.0, {}}, rng);
  OfflineConfig c;
  c.conf.rkhs_bound = 0.8;
  const OfflineResult r = RunOffline(d, c);
  for (double v : r.pessimistic_costs) EXPECT_EQ(v, 0.8);
  EXPECT_DOUBLE_EQ(r.ridge, c.kernel.ridge_lambda);
  EXPECT_THROW(RunOffline(OfflineDataset{}, c), ConfigError);
}

TEST(Offline, FitInvariants) {
  const Fixture f = Make(300);
  Rng rng(4);
  const OfflineDataset d =
      LogDataset(f.queries, *f.field, {}, LoggingPolicy{0.5, {}}, rng);
  OfflineConfig c;
  c.k = 4;
  double fetched = 0;
  const OfflineResult r = RunOffline(d, c, [&](const Embedding& x) {
    const double v = f.field->TrueCost(x);
    fetched += v;
    return v;
  });
  EXPECT_DOUBLE_EQ(r.ridge, c.kernel.ridge_lambda * d.cost_observations());
  EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 1.0, 1e-12);
  EXPECT_EQ(r.cache.size(), 4u);
  EXPECT_DOUBLE_EQ(r.build_cost, fetched);
  for (std::size_t i = 0; i < r.net.size(); ++i) {
    EXPECT_GE(r.pessimistic_costs[i], r.posterior_means[i]);
  }
  for (std::size_t key : r.greedy.cache) EXPECT_LT(key, r.net.size());
  EXPECT_EQ(std::accumulate(r.cell_observations.begin(), r.cell_observations.end(),
                            std::uint64_t{0}),
            d.cost_observations());
  EXPECT_EQ(r.ToJson().at("net_size").get<std::size_t>(), r.net.size());
}

TEST(Offline, OptimalEps) {
  EXPECT_NEAR(OptimalEps(512, 7, 7), 0.5, 1e-12);
  EXPECT_NEAR(OptimalEps(512, 7, 5), 0.5, 1e-12);
  EXPECT_NEAR(OptimalEps(1000, 10, 2), std::pow(1000.0, -1.0 / 22), 1e-12);
  EXPECT_NEAR(OptimalEps(512, 7, 7, 2.0), 1.0, 1e-12);
  EXPECT_THROW(OptimalEps(0, 7, 7), ConfigError);
}

}  // namespace
}  // namespace semcache
