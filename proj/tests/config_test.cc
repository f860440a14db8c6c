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

#include "semcache/config.h"

#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"
#include "semcache/errors.h"

namespace semcache {
namespace {

using nlohmann::json;

json Minimal() { return {{"seeds", {1, 2}}}; }

TEST(Config, Defaults) {
  const ExperimentSpec s = ParseExperimentSpec(Minimal());
  EXPECT_EQ(s.setting, Setting::kOnline);
  EXPECT_EQ(s.learners, std::vector<std::string>{kOnlineLearner});
  EXPECT_TRUE(s.baselines.empty());
  EXPECT_FALSE(s.delta_given);
  EXPECT_EQ(s.kernel.length_scale, 0.5);
  EXPECT_EQ(s.kernel.ridge_lambda, 1.0);
  EXPECT_EQ(s.conf.rkhs_bound, 1.0);
  EXPECT_EQ(s.conf.noise_r, 0.1);
  EXPECT_EQ(s.mismatch.zeta, 1.0);
  EXPECT_EQ(s.epsilon_explore, 0.1);
  EXPECT_EQ(s.recompute_period, 1u);
  EXPECT_EQ(s.workload.synthetic.universe_size, 50u);
  EXPECT_EQ(s.workload.burst_min, 20u);
  EXPECT_EQ(s.workload.burst_max, 100u);
  EXPECT_EQ(s.cost.c_min, 0.01);
  EXPECT_EQ(s.seeds, (std::vector<std::uint64_t>{1, 2}));
}

TEST(Config, FullOfflineSpec) {
  const json j = {
      {"name", "abl"},
      {"setting", "offline"},
      {"workload", {{"kind", "synthetic"}, {"dim", 32}, {"universe_seed", 9}}},
      {"cost", {{"mode", "synthetic_rkhs"}, {"noise_r", 0.05}, {"clip", false}}},
      {"kernel", {{"length_scale", 0.7}, {"lambda", 0.5}}},
      {"confidence", {{"B", 2.0}, {"delta", 0.1}}},
      {"baselines", {"lfu", "greedy"}},
      {"logging", {{"nu", 0.3}}},
      {"grid", {{"eps", {0.2, 0.4}}, {"n", {100, 200, 400}}, {"k", 5}}},
      {"seeds", {1}},
      {"alpha", 1.5}};
  const ExperimentSpec s = ParseExperimentSpec(j);
  EXPECT_EQ(s.setting, Setting::kOffline);
  EXPECT_EQ(s.learners, std::vector<std::string>{kOfflineLearner});
  EXPECT_EQ(s.cost.mode, CostMode::kSyntheticRkhs);
  EXPECT_FALSE(s.cost.noise.clip);
  EXPECT_TRUE(s.delta_given);
  EXPECT_EQ(s.conf.delta, 0.1);
  EXPECT_EQ(s.logging.nu, 0.3);
  EXPECT_EQ(s.workload.synthetic.universe_seed, 9u);
  EXPECT_EQ(s.grid_k, std::vector<std::size_t>{5});
  EXPECT_EQ(s.alpha, 1.5);

  const auto cells = ExpandGrid(s);
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[0].eps, 0.2);
  EXPECT_EQ(cells[0].n, 100u);
  EXPECT_EQ(cells[2].n, 400u);
  EXPECT_EQ(cells[3].eps, 0.4);
  EXPECT_EQ(cells[5].index, 5u);

  // The serialized spec parses back to the same grid.
  const ExperimentSpec again = ParseExperimentSpec(s.ToJson());
  EXPECT_EQ(again.grid_n, s.grid_n);
  EXPECT_EQ(again.conf.rkhs_bound, 2.0);
}

TEST(Config, OnlineGridIgnoresN) {
  json j = Minimal();
  j["grid"] = {{"n", {1, 2, 3}}, {"T", {100, 200}}};
  EXPECT_EQ(ExpandGrid(ParseExperimentSpec(j)).size(), 2u);
}

TEST(Config, Rejections) {
  auto bad = [](json patch) {
    json j = Minimal();
    j.merge_patch(patch);
    return j;
  };
  EXPECT_THROW(ParseExperimentSpec(json::object()), ConfigError);
  EXPECT_THROW(ParseExperimentSpec({{"seeds", json::array()}}), ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"colour", 1}})), ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"kernel", {{"ell", 1}}}})), ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"setting", "batch"}})), ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"alpha", 0.5}})), ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"grid", {{"eps", {0.0}}}}})), ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"grid", {{"eps", {1.2}}}}})), ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"grid", {{"T", {1}}}}})), ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"confidence", {{"delta", 1.0}}}})),
               ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"baselines", {"lru"}}})), ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"learners", {"cucb_sc_cont"}}})),
               ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"setting", "offline"},
                                        {"baselines", {"eps_greedy"}}})),
               ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"workload", {{"kind", "trace"}}}})),
               ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"kernel", {{"lambda", "one"}}}})),
               ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"baseline", {{"recompute_period", 0}}}})),
               ConfigError);
  EXPECT_THROW(ParseExperimentSpec(bad({{"cost", {{"c_min", 0.0}}}})), ConfigError);
}

TEST(Config, FilesAndRelativeTracePaths) {
  const auto dir = std::filesystem::temp_directory_path() / "semcache_cfg";
  std::filesystem::create_directories(dir);
  const auto path = dir / "spec.json";
  {
    std::ofstream out(path);
    out << R"({"seeds": [3], "workload": {"kind": "trace",
              "sources": [{"path": "pool.semc"}]}})";
  }
  const ExperimentSpec s = LoadExperimentSpec(path);
  ASSERT_EQ(s.workload.trace_sources.size(), 1u);
  EXPECT_EQ(s.workload.trace_sources[0].path, dir / "pool.semc");
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  EXPECT_THROW(LoadExperimentSpec(path), ConfigError);
  EXPECT_THROW(LoadExperimentSpec(dir / "missing.json"), ConfigError);
}

}  // namespace
}  // namespace semcache
