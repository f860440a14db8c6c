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

#ifndef SEMCACHE_ONLINE_LS_H_
#define SEMCACHE_ONLINE_LS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "semcache/cache.h"
#include "semcache/geometry.h"
#include "semcache/krr.h"
#include "semcache/policy.h"

namespace semcache {

struct OnlineConfig {
  std::uint64_t horizon = 5000;  // T
  double eps = 0.4;
  std::size_t k = 5;
  KernelSpec kernel;
  ConfidenceSpec conf;  // conf.delta <= 0 selects 1/T
  // Check the counter conservation laws every round instead of every
  // kInvariantStride rounds.
  bool check_every_round = false;

  double EffectiveDelta() const;
};

inline constexpr std::uint64_t kInvariantStride = 256;

// Online learner with a dynamic epsilon-net, KRR lower confidence costs and
// stage-limited cache switching.
class OnlineLsLearner : public Policy {
 public:
  explicit OnlineLsLearner(OnlineConfig config);

  std::string name() const override { return "clcb_ls_cont"; }
  RoundOutcome Step(const Embedding& x, Environment& env) override;
  const CacheState& cache() const override { return cache_; }
  nlohmann::json Diagnostics() const override;

  // Rebuilds the cache from current statistics (ŵ = N_f / max(1, t - 1),
  // LCB costs, reverse greedy). Returns the fetch payment. Exposed for
  // tests; Step calls it when a switch is due.
  double SwitchCache(Environment& env, bool* changed);

  // LCB cost at center u from the tracked probe.
  double CenterLcb(std::size_t u) const;

  // Throws ContractViolation if a conservation law fails.
  void CheckInvariants() const;

  std::uint64_t round() const { return t_; }
  const EpsilonNet& net() const { return net_; }
  const KrrModel& krr() const { return krr_; }
  const StageScheduler& stages() const { return stages_; }
  const std::vector<std::uint64_t>& cost_counts() const { return n_c_; }
  const std::vector<double>& cost_sums() const { return l_c_; }
  const OnlineConfig& config() const { return config_; }

  std::uint64_t switches() const { return switches_; }
  std::uint64_t cache_changes() const { return cache_changes_; }
  std::uint64_t new_center_switch_rounds() const { return new_center_rounds_; }
  std::uint64_t llm_calls() const { return llm_calls_; }

 private:
  OnlineConfig config_;
  ConfidenceSpec conf_;
  EpsilonNet net_;
  KrrModel krr_;
  StageScheduler stages_;
  std::vector<std::uint64_t> n_c_;
  std::vector<double> l_c_;
  CacheState cache_;
  std::uint64_t t_ = 0;
  std::uint64_t switches_ = 0;
  std::uint64_t cache_changes_ = 0;
  std::uint64_t new_center_rounds_ = 0;
  std::uint64_t llm_calls_ = 0;
};

}  // namespace semcache

#endif  // SEMCACHE_ONLINE_LS_H_
