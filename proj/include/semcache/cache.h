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

#ifndef SEMCACHE_CACHE_H_
#define SEMCACHE_CACHE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "semcache/cost_model.h"
#include "semcache/geometry.h"
#include "semcache/rng.h"

namespace semcache {

struct CacheEntry {
  Embedding center;
  std::uint64_t response_handle = 0;
  // Index of the center in the owner's candidate set, if it has one.
  std::size_t key = kOutside;
};

// At most `capacity` query-response pairs with distinct embeddings.
class CacheState {
 public:
  explicit CacheState(std::size_t capacity = 0) : capacity_(capacity) {}

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<CacheEntry>& entries() const { return entries_; }

  // Throws ContractViolation when full or when `center` is already cached.
  void Insert(CacheEntry entry);
  void Clear() { entries_.clear(); }

  bool ContainsKey(std::size_t key) const;
  std::vector<std::size_t> Keys() const;
  std::vector<Embedding> Centers() const;

  // Normalized distance to the nearest entry; infinity when empty. Writes the
  // entry index (lowest on ties) to `slot` when non-null.
  double Distance(const Embedding& x, std::size_t* slot = nullptr) const;

 private:
  std::size_t capacity_;
  std::vector<CacheEntry> entries_;
};

// Candidates with weights and (possibly confidence-adjusted) costs. Weights
// need not sum to one: the online learner feeds N_f/(t-1), which is all zero
// at t = 1.
struct DiscreteInstance {
  std::vector<Embedding> points;
  std::vector<double> weights;
  std::vector<double> costs;
  MismatchFn mismatch;

  std::size_t size() const { return points.size(); }
  // Throws ContractViolation on length mismatch or negative weights.
  void Validate() const;
};

// Precomputed phi(d(x_i, x_j)) for an instance plus costs clamped to [0, 1].
class LossTable {
 public:
  explicit LossTable(const DiscreteInstance& inst);

  std::size_t size() const { return weights_.size(); }
  double phi(std::size_t i, std::size_t j) const { return phi_[i * n_ + j]; }
  double clamped_cost(std::size_t i) const { return costs_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  // sum_i w_i * min(c_i, min_{j in cache} phi_ij), summed in index order.
  double Loss(std::span<const char> in_cache) const;

 private:
  std::size_t n_;
  std::vector<double> phi_;
  std::vector<double> costs_;
  std::vector<double> weights_;
};

// Discretized loss with costs clamped to [0, 1]; an empty cache scores
// sum_i w_i * min(c_i, 1). Throws ContractViolation on a bad index.
double DiscretizedLoss(const DiscreteInstance& inst,
                       std::span<const std::size_t> cache);

// Same loss for an arbitrary set of cached embeddings evaluated on the
// instance's points.
double LossOfCenters(const DiscreteInstance& inst,
                     std::span<const Embedding> cache);

struct GreedyResult {
  std::vector<std::size_t> removal_order;
  std::vector<std::size_t> cache;  // ascending indices
  double loss = 0.0;
};

// Reverse greedy: start from every candidate, repeatedly drop the one whose
// removal gives the smallest loss (lowest index on ties) until k remain.
//
// Tracks the best and second best phi per point so one removal evaluation is
// O(m); the result is identical to ReverseGreedyNaive.
GreedyResult ReverseGreedy(const DiscreteInstance& inst, std::size_t k);
GreedyResult ReverseGreedyNaive(const DiscreteInstance& inst, std::size_t k);

inline constexpr double kBruteForceGuard = 1e6;

struct OracleResult {
  std::vector<std::size_t> cache;
  double loss = 0.0;
};

// Exhaustive search over subsets of size min(k, m) in lexicographic order
// (adding an item never raises the loss, so smaller subsets cannot do
// better). Throws ContractViolation when C(m, k) exceeds kBruteForceGuard.
OracleResult BruteForceOracle(const DiscreteInstance& inst, std::size_t k);
double BinomialCount(std::size_t m, std::size_t k);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

using QuerySampler = std::function<Embedding(Rng&)>;

// Sample mean of min(c(x), phi(d(x, M))) over draws from `sampler`.
McEstimate MonteCarloLoss(std::span<const Embedding> cache,
                          const CostField& field, const MismatchFn& mismatch,
                          const QuerySampler& sampler, std::size_t n_samples,
                          Rng& rng);

}  // namespace semcache

#endif  // SEMCACHE_CACHE_H_
