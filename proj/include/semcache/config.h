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

#ifndef SEMCACHE_CONFIG_H_
#define SEMCACHE_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nlohmann/json.hpp"
#include "semcache/baselines.h"
#include "semcache/cost_model.h"
#include "semcache/krr.h"
#include "semcache/offline_learner.h"
#include "semcache/workload.h"

namespace semcache {

enum class Setting { kOffline, kOnline };
enum class WorkloadKind { kSynthetic, kTrace };

struct TraceSourceSpec {
  std::filesystem::path path;
  std::uint64_t popularity_seed = 1;
};

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::kSynthetic;
  SyntheticSpec synthetic;
  std::vector<TraceSourceSpec> trace_sources;
  std::uint32_t burst_min = 20;
  std::uint32_t burst_max = 100;
  // Trace runs: discrete baselines use a static net over this many leading
  // arrivals as their arm set.
  std::size_t warmup = 200;
};

struct CostSpec {
  CostMode mode = CostMode::kTokenLength;
  double c_min = kDefaultCostFloor;
  NoiseSpec noise;
  // Synthetic RKHS field: anchors are the first `rkhs_anchors` universe
  // points with weights uniform on [0, 1].
  std::size_t rkhs_anchors = 10;
  double rkhs_length_scale = 1.0;
  std::uint64_t rkhs_seed = 7;
};

inline constexpr char kOfflineLearner[] = "cucb_sc_cont";
inline constexpr char kOnlineLearner[] = "clcb_ls_cont";
inline constexpr char kFrozenLearner[] = "clcb_frozen_cont";

struct ExperimentSpec {
  std::string name = "experiment";
  Setting setting = Setting::kOnline;
  WorkloadSpec workload;
  CostSpec cost;
  MismatchFn mismatch;
  KernelSpec kernel;
  ConfidenceSpec conf;
  // When false the online learners use delta = 1/T.
  bool delta_given = false;
  std::vector<std::string> learners;
  std::vector<BaselineKind> baselines;
  double epsilon_explore = 0.1;
  std::uint64_t recompute_period = 1;
  double serve_radius = -1.0;
  double lipschitz_g = 1.0;
  double pool_constant = 1.0;
  LoggingPolicy logging;

  std::vector<double> grid_eps = {0.4};
  std::vector<std::uint64_t> grid_n = {1000};
  std::vector<std::size_t> grid_k = {5};
  std::vector<std::uint64_t> grid_t = {5000};
  std::vector<std::uint64_t> seeds;

  double alpha = 1.0;
  std::size_t truth_samples = 100000;
  bool emit_trace = false;
  std::size_t series_stride = 50;

  nlohmann::json ToJson() const;
};

struct Cell {
  std::size_t index = 0;
  double eps = 0.4;
  std::uint64_t n = 1000;
  std::size_t k = 5;
  std::uint64_t horizon = 5000;
};

// Cartesian product of the grid lists in (eps, n, k, T) order; n is dropped
// for online specs and T for offline ones.
std::vector<Cell> ExpandGrid(const ExperimentSpec& spec);

// Throws ConfigError on unknown keys, wrong types or out-of-range values.
ExperimentSpec ParseExperimentSpec(const nlohmann::json& j);
ExperimentSpec LoadExperimentSpec(const std::filesystem::path& path);

// Reads a JSON file; throws ConfigError on I/O or syntax errors.
nlohmann::json LoadJsonFile(const std::filesystem::path& path);

// Rejects keys of `obj` outside `allowed`.
void CheckKeys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
               const std::string& where);

}  // namespace semcache

#endif  // SEMCACHE_CONFIG_H_
