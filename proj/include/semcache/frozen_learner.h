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

#ifndef SEMCACHE_FROZEN_LEARNER_H_
#define SEMCACHE_FROZEN_LEARNER_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "semcache/cache.h"
#include "semcache/geometry.h"
#include "semcache/krr.h"
#include "semcache/policy.h"

namespace semcache {

struct FrozenConfig {
  std::uint64_t horizon = 5000;
  std::size_t k = 5;
  KernelSpec kernel;
  ConfidenceSpec conf;  // conf.delta <= 0 selects 1/T
  double lipschitz_g = 1.0;  // L_g
  double pool_constant = 1.0;  // C_p

  double EffectiveDelta() const;
};

// e_s = 2^{-2^s}.
double StageTolerance(int s);
// rho_s = e_s / (2 L_g).
double StageRadius(int s, double lipschitz_g);

// C_p * sqrt((m_s log 2 + log(2 t^2 / delta)) / n).
double PoolUncertainty(std::size_t m_s, std::uint64_t t, std::uint64_t n,
                       double delta, double pool_constant);

// beta_t * sqrt(2 gamma_t / t), with beta_t the online multiplier.
double CostUncertainty(const KrrModel& model, const ConfidenceSpec& conf,
                       std::uint64_t t);

struct StageRecord {
  int stage = 1;
  double tolerance = 0.0;
  double radius = 0.0;
  std::uint64_t start_round = 0;
  std::uint64_t length = 0;
  std::size_t pool_size = 0;
};

// Past this stage index the tolerance underflows double precision.
inline constexpr int kMaxStage = 9;

// Stage-frozen learner: the candidate pool is fixed for a stage and
// refreshed, together with the cache, only when both uncertainty envelopes
// drop below the stage tolerance.
class FrozenLearner : public Policy {
 public:
  explicit FrozenLearner(FrozenConfig config);

  std::string name() const override { return "clcb_frozen_cont"; }
  RoundOutcome Step(const Embedding& x, Environment& env) override;
  const CacheState& cache() const override { return cache_; }
  nlohmann::json Diagnostics() const override;

  int stage() const { return stage_; }
  double tolerance() const { return tolerance_; }
  double radius() const { return radius_; }
  std::uint64_t stage_length() const { return n_; }
  std::uint64_t bottom_count() const { return bottom_count_; }
  const std::vector<std::uint64_t>& pool_counts() const { return counts_; }
  const std::vector<Embedding>& pool() const { return pool_; }
  const KrrModel& krr() const { return krr_; }
  double last_pool_uncertainty() const { return last_u_pool_; }
  double last_cost_uncertainty() const { return last_u_cost_; }

  // Completed and current stages, in order.
  std::vector<StageRecord> StageHistory() const;
  // Number of stages executed so far (including the current one).
  std::size_t stage_count() const { return history_.size() + 1; }

 private:
  double Refresh(Environment& env, bool* changed);

  FrozenConfig config_;
  ConfidenceSpec conf_;
  KrrModel krr_;
  CacheState cache_;
  std::vector<Embedding> pool_;
  std::vector<Embedding> all_seen_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t bottom_count_ = 0;
  std::uint64_t n_ = 0;
  int stage_ = 1;
  double tolerance_;
  double radius_;
  bool switch_pending_ = true;
  std::uint64_t t_ = 0;
  std::uint64_t stage_start_ = 1;
  double last_u_pool_ = 0.0;
  double last_u_cost_ = 0.0;
  std::uint64_t llm_calls_ = 0;
  std::uint64_t switches_ = 0;
  std::vector<StageRecord> history_;
};

}  // namespace semcache

#endif  // SEMCACHE_FROZEN_LEARNER_H_
