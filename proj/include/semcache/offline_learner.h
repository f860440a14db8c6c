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

#ifndef SEMCACHE_OFFLINE_LEARNER_H_
#define SEMCACHE_OFFLINE_LEARNER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "semcache/cache.h"
#include "semcache/cost_model.h"
#include "semcache/geometry.h"
#include "semcache/krr.h"
#include "semcache/rng.h"
#include "semcache/workload.h"

namespace semcache {

struct OfflineRecord {
  Embedding query;
  std::optional<double> cost;  // absent when the logger did not call the LLM
  std::size_t universe_index = kOutside;
};

struct OfflineDataset {
  std::vector<OfflineRecord> records;
  std::string logging_policy_tag;

  std::size_t size() const { return records.size(); }
  std::size_t cost_observations() const;
};

// Simulated logger: each arrival is sent to the LLM (and its cost recorded)
// with probability nu, or per_point_nu[universe_index] when given.
struct LoggingPolicy {
  double nu = 0.5;
  std::vector<double> per_point_nu;

  double PropensityFor(std::size_t universe_index) const;
  std::string Tag() const;
};

OfflineDataset LogDataset(std::span<const Query> queries,
                          const CostField& field, const NoiseSpec& noise,
                          const LoggingPolicy& logging, Rng& rng);

// JSON lines {"query_index": i, "cost": c | null} against `universe`.
OfflineDataset ReadDatasetLog(const std::filesystem::path& path,
                              std::span<const Embedding> universe);
void WriteDatasetLog(const std::filesystem::path& path,
                     const OfflineDataset& data);

struct OfflineConfig {
  double eps = 0.4;
  std::size_t k = 5;
  KernelSpec kernel;
  ConfidenceSpec conf;
  MismatchFn mismatch;
};

struct OfflineResult {
  EpsilonNet net{1.0};
  std::vector<double> weights;
  std::vector<double> posterior_means;
  std::vector<double> pessimistic_costs;
  GreedyResult greedy;
  CacheState cache;
  // Per-cell logged cost observations N_i and measured propensity
  // N_i / arrivals_i.
  std::vector<std::uint64_t> cell_observations;
  std::vector<double> propensities;
  std::size_t cost_observations = 0;
  double ridge = 0.0;
  double build_cost = 0.0;

  nlohmann::json ToJson() const;
};

// Pays for fetching the response of a cached center; returns its cost.
using FetchFn = std::function<double(const Embedding&)>;

// Static net over all logged queries, Voronoi weights, KRR on the logged
// costs with ridge (number of cost observations) * lambda, pessimistic
// per-center costs, reverse greedy. Without `fetch`, the build cost is the
// sum of posterior means at the cached centers.
OfflineResult RunOffline(const OfflineDataset& data,
                         const OfflineConfig& config,
                         const FetchFn& fetch = nullptr);

// Radius minimizing the offline bound, up to the constant `scale`:
// scale * n^{-1/(d_e+2)} when p >= d_e - 2, else scale * n^{-1/(2 d_e + p)}.
double OptimalEps(std::uint64_t n, int d_e, int p, double scale = 1.0);

}  // namespace semcache

#endif  // SEMCACHE_OFFLINE_LEARNER_H_
