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

#ifndef SEMCACHE_POLICY_H_
#define SEMCACHE_POLICY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "semcache/cache.h"
#include "semcache/cost_model.h"
#include "semcache/geometry.h"
#include "semcache/rng.h"

namespace semcache {

enum class ServedFrom { kCache, kLlm };

struct RoundOutcome {
  ServedFrom served_from = ServedFrom::kLlm;
  // Observed C_t on an LLM call, phi(d(x_t, M)) on a cache hit.
  double realized_cost_component = 0.0;
  // A cache rebuild ran this round (it may have reselected the same set).
  bool switched = false;
  bool cache_changed = false;
  bool new_center = false;
  double switch_payment = 0.0;
  std::size_t center = kOutside;
};

// What a policy can touch of the world: the cost oracle behind the LLM and
// the mismatch penalty. Each policy in an experiment gets its own copy with
// the same seed.
struct Environment {
  const CostField* field = nullptr;
  NoiseSpec noise;
  MismatchFn mismatch;
  Rng rng;
  std::uint64_t next_handle = 1;

  double QueryLlm(const Embedding& x) {
    return SampleCost(*field, noise, x, rng);
  }
  std::uint64_t NewHandle() { return next_handle++; }
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual RoundOutcome Step(const Embedding& x, Environment& env) = 0;
  virtual const CacheState& cache() const = 0;
  virtual nlohmann::json Diagnostics() const { return nlohmann::json::object(); }
};

// Replaces the contents of `cache` with candidates[keys]. Entries already
// cached keep their response handle; each new entry costs one LLM query,
// whose sampled cost is added to the returned payment.
double ApplyCacheSelection(CacheState& cache, std::span<const std::size_t> keys,
                           std::span<const Embedding> candidates,
                           Environment& env, bool* changed);

// Local (per center) and global stage bookkeeping for the low-switching
// learners. Only stage sizes are stored.
class StageScheduler {
 public:
  explicit StageScheduler(std::uint64_t horizon);

  void AddCenter();
  // Cost observation attributed to center u (local list of its stage).
  void RecordObservation(std::size_t u);
  // Every arrival joins the global stage list.
  void RecordArrival();

  // Advances every center whose current stage reached
  // 1 + sqrt((T / m_t) * past) and the global stage if it reached
  // 1 + sqrt(T * past). Returns true if anything advanced.
  bool Check(std::size_t m_t);

  std::size_t centers() const { return current_.size(); }
  std::uint64_t current(std::size_t u) const { return current_[u]; }
  std::uint64_t past(std::size_t u) const { return past_[u]; }
  std::uint64_t stage(std::size_t u) const { return stage_[u]; }
  std::uint64_t global_current() const { return global_current_; }
  std::uint64_t global_past() const { return global_past_; }
  std::uint64_t global_stage() const { return global_stage_; }
  std::uint64_t local_advances() const { return local_advances_; }
  std::uint64_t global_advances() const { return global_advances_; }

 private:
  double horizon_;
  std::vector<std::uint64_t> current_;
  std::vector<std::uint64_t> past_;
  std::vector<std::uint64_t> stage_;
  std::uint64_t global_current_ = 0;
  std::uint64_t global_past_ = 0;
  std::uint64_t global_stage_ = 1;
  std::uint64_t local_advances_ = 0;
  std::uint64_t global_advances_ = 0;
};

}  // namespace semcache

#endif  // SEMCACHE_POLICY_H_
