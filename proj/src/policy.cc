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

#include <algorithm>
#include <cmath>

#include "semcache/errors.h"

namespace semcache {

double ApplyCacheSelection(CacheState& cache, std::span<const std::size_t> keys,
                           std::span<const Embedding> candidates,
                           Environment& env, bool* changed) {
  if (keys.size() > cache.capacity()) {
    throw ContractViolation("selection larger than cache capacity");
  }
  CacheState next(cache.capacity());
  double payment = 0.0;
  bool any_new = false;
  for (std::size_t key : keys) {
    if (key >= candidates.size()) {
      throw ContractViolation("selected key out of range");
    }
    const Embedding& center = candidates[key];
    std::uint64_t handle = 0;
    for (const CacheEntry& e : cache.entries()) {
      if (e.key == key && e.center == center) handle = e.response_handle;
    }
    if (handle == 0) {
      payment += env.QueryLlm(center);
      handle = env.NewHandle();
      any_new = true;
    }
    next.Insert({center, handle, key});
  }
  if (changed != nullptr) *changed = any_new || next.size() != cache.size();
  cache = std::move(next);
  return payment;
}

StageScheduler::StageScheduler(std::uint64_t horizon)
    : horizon_(static_cast<double>(horizon)) {
  if (horizon == 0) throw ConfigError("horizon must be >= 1");
}

void StageScheduler::AddCenter() {
  current_.push_back(0);
  past_.push_back(0);
  stage_.push_back(1);
}

void StageScheduler::RecordObservation(std::size_t u) { current_.at(u) += 1; }

void StageScheduler::RecordArrival() { global_current_ += 1; }

bool StageScheduler::Check(std::size_t m_t) {
  bool advanced = false;
  const double per_center = horizon_ / static_cast<double>(std::max<std::size_t>(1, m_t));
  for (std::size_t u = 0; u < current_.size(); ++u) {
    const double limit =
        1.0 + std::sqrt(per_center * static_cast<double>(past_[u]));
    if (static_cast<double>(current_[u]) >= limit) {
      past_[u] += current_[u];
      current_[u] = 0;
      stage_[u] += 1;
      local_advances_ += 1;
      advanced = true;
    }
  }
  const double global_limit =
      1.0 + std::sqrt(horizon_ * static_cast<double>(global_past_));
  if (static_cast<double>(global_current_) >= global_limit) {
    global_past_ += global_current_;
    global_current_ = 0;
    global_stage_ += 1;
    global_advances_ += 1;
    advanced = true;
  }
  return advanced;
}

}  // namespace semcache
