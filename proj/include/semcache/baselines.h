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

#ifndef SEMCACHE_BASELINES_H_
#define SEMCACHE_BASELINES_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "semcache/cache.h"
#include "semcache/geometry.h"
#include "semcache/offline_learner.h"
#include "semcache/policy.h"

namespace semcache {

enum class BaselineKind {
  kLfu,
  kGreedy,
  kEpsGreedy,
  kDiscreteCucb,
  kDiscreteClcbLs,
};

// Accepts lfu, greedy, eps_greedy, discrete_cucb, discrete_clcb_ls. Throws
// ConfigError otherwise.
BaselineKind ParseBaselineKind(std::string_view name);
std::string BaselineName(BaselineKind kind);

struct BaselineConfig {
  BaselineKind kind = BaselineKind::kLfu;
  double epsilon_explore = 0.1;
  std::uint64_t recompute_period = 1;
  // Cell radius for frequency keys and, unless set, the serve radius.
  double eps = 0.4;
  double serve_radius = -1.0;  // negative selects eps
  std::size_t k = 5;
  std::uint64_t horizon = 5000;
  // Fixed candidate universe for the discrete kinds.
  std::vector<Embedding> arms;
  std::uint64_t policy_seed = 1;

  double EffectiveServeRadius() const {
    return serve_radius < 0.0 ? eps : serve_radius;
  }
};

// Builds the online form of any baseline kind.
std::unique_ptr<Policy> MakeBaseline(const BaselineConfig& config);

// Frequency policies keyed by cells of their own dynamic eps-net (same
// insertion rule as the treatment). LFU caches the top-k cells by arrival
// count; Greedy by frequency times the mean observed LLM cost;
// Eps-Greedy additionally sends a query to the LLM with probability
// epsilon_explore. A query is served from cache when the nearest cached
// center is within the serve radius.
class FrequencyBaseline : public Policy {
 public:
  explicit FrequencyBaseline(BaselineConfig config);

  std::string name() const override { return BaselineName(config_.kind); }
  RoundOutcome Step(const Embedding& x, Environment& env) override;
  const CacheState& cache() const override { return cache_; }
  nlohmann::json Diagnostics() const override;

  const EpsilonNet& net() const { return net_; }
  // Top-k keys by score, descending, lowest index on ties; zero scores are
  // never selected.
  std::vector<std::size_t> SelectKeys() const;

 private:
  BaselineConfig config_;
  EpsilonNet net_;
  std::vector<std::uint64_t> obs_count_;
  std::vector<double> obs_sum_;
  CacheState cache_;
  Rng explore_rng_;
  std::uint64_t t_ = 0;
  std::uint64_t switches_ = 0;
  std::uint64_t llm_calls_ = 0;
};

// Discrete-universe adaptations: arms are fixed points, arrivals and cost
// observations are attributed to the nearest arm, and per-arm empirical
// means with radius sqrt(2 log t / N_c) replace KRR. The CUCB form refreshes
// every recompute_period rounds with upper bounds and serves by the radius
// rule; the CLCB-LS form uses lower bounds, the stage schedule of the
// continuous learner and its routing rule.
class DiscreteBaseline : public Policy {
 public:
  explicit DiscreteBaseline(BaselineConfig config);

  std::string name() const override { return BaselineName(config_.kind); }
  RoundOutcome Step(const Embedding& x, Environment& env) override;
  const CacheState& cache() const override { return cache_; }
  nlohmann::json Diagnostics() const override;

  double Radius(std::size_t arm) const;
  double Mean(std::size_t arm) const;

 private:
  double Rebuild(Environment& env, bool upper, bool* changed);

  BaselineConfig config_;
  std::vector<std::uint64_t> arrivals_;
  std::vector<std::uint64_t> obs_count_;
  std::vector<double> obs_sum_;
  StageScheduler stages_;
  CacheState cache_;
  std::uint64_t t_ = 0;
  std::uint64_t switches_ = 0;
  std::uint64_t llm_calls_ = 0;
};

// Offline forms over a logged dataset, returning the cached centers.
// LFU and Greedy key on the static eps-net of the logged queries; discrete
// CUCB uses the arms with pessimistic Hoeffding costs. Eps-Greedy and
// CLCB-LS have no offline form (ConfigError).
std::vector<Embedding> OfflineBaselineCache(const BaselineConfig& config,
                                            const OfflineDataset& data,
                                            const MismatchFn& mismatch);

}  // namespace semcache

#endif  // SEMCACHE_BASELINES_H_
