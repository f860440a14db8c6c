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

#include "semcache/cache.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "semcache/errors.h"

namespace semcache {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// phi of an empty cache.
constexpr double kEmptyPhi = 1.0;

}  // namespace

void CacheState::Insert(CacheEntry entry) {
  if (entries_.size() >= capacity_) {
    throw ContractViolation("cache insert beyond capacity " +
                            std::to_string(capacity_));
  }
  for (const CacheEntry& e : entries_) {
    if (e.center == entry.center) {
      throw ContractViolation("duplicate cache entry");
    }
  }
  entries_.push_back(std::move(entry));
}

bool CacheState::ContainsKey(std::size_t key) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [key](const CacheEntry& e) { return e.key == key; });
}

std::vector<std::size_t> CacheState::Keys() const {
  std::vector<std::size_t> keys;
  keys.reserve(entries_.size());
  for (const CacheEntry& e : entries_) keys.push_back(e.key);
  return keys;
}

std::vector<Embedding> CacheState::Centers() const {
  std::vector<Embedding> out;
  out.reserve(entries_.size());
  for (const CacheEntry& e : entries_) out.push_back(e.center);
  return out;
}

double CacheState::Distance(const Embedding& x, std::size_t* slot) const {
  double best_sq = kInf;
  std::size_t best = kOutside;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double sq = SquaredEuclidean(entries_[i].center, x);
    if (sq < best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  if (slot != nullptr) *slot = best;
  return best == kOutside ? kInf : 0.5 * std::sqrt(best_sq);
}

void DiscreteInstance::Validate() const {
  if (weights.size() != points.size() || costs.size() != points.size()) {
    throw ContractViolation("instance sizes disagree: points " +
                            std::to_string(points.size()) + ", weights " +
                            std::to_string(weights.size()) + ", costs " +
                            std::to_string(costs.size()));
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ContractViolation("instance weights must be finite and >= 0");
    }
  }
  for (double c : costs) {
    if (std::isnan(c)) throw ContractViolation("instance cost is NaN");
  }
}

LossTable::LossTable(const DiscreteInstance& inst) : n_(inst.size()) {
  inst.Validate();
  phi_.resize(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    phi_[i * n_ + i] = inst.mismatch(0.0);
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double v =
          inst.mismatch(NormalizedDistance(inst.points[i], inst.points[j]));
      phi_[i * n_ + j] = v;
      phi_[j * n_ + i] = v;
    }
  }
  costs_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    costs_[i] = std::clamp(inst.costs[i], 0.0, 1.0);
  }
  weights_ = inst.weights;
}

double LossTable::Loss(std::span<const char> in_cache) const {
  double total = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double best = kEmptyPhi;
    for (std::size_t j = 0; j < n_; ++j) {
      if (in_cache[j] && phi(i, j) < best) best = phi(i, j);
    }
    total += weights_[i] * std::min(costs_[i], best);
  }
  return total;
}

double DiscretizedLoss(const DiscreteInstance& inst,
                       std::span<const std::size_t> cache) {
  inst.Validate();
  for (std::size_t j : cache) {
    if (j >= inst.size()) {
      throw ContractViolation("cache index " + std::to_string(j) +
                              " out of range for " +
                              std::to_string(inst.size()) + " candidates");
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    double best = kEmptyPhi;
    for (std::size_t j : cache) {
      best = std::min(
          best, inst.mismatch(NormalizedDistance(inst.points[i], inst.points[j])));
    }
    total += inst.weights[i] * std::min(std::clamp(inst.costs[i], 0.0, 1.0), best);
  }
  return total;
}

double LossOfCenters(const DiscreteInstance& inst,
                     std::span<const Embedding> cache) {
  inst.Validate();
  double total = 0.0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    double d = kInf;
    NearestIndex(cache, inst.points[i], &d);
    total += inst.weights[i] *
             std::min(std::clamp(inst.costs[i], 0.0, 1.0), inst.mismatch(d));
  }
  return total;
}

GreedyResult ReverseGreedyNaive(const DiscreteInstance& inst, std::size_t k) {
  const LossTable table(inst);
  const std::size_t m = inst.size();
  std::vector<char> mask(m, 1);
  GreedyResult result;
  for (std::size_t remaining = m; remaining > k; --remaining) {
    std::size_t best_j = kOutside;
    double best_loss = kInf;
    for (std::size_t j = 0; j < m; ++j) {
      if (!mask[j]) continue;
      mask[j] = 0;
      const double loss = table.Loss(mask);
      mask[j] = 1;
      if (loss < best_loss) {
        best_loss = loss;
        best_j = j;
      }
    }
    mask[best_j] = 0;
    result.removal_order.push_back(best_j);
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (mask[j]) result.cache.push_back(j);
  }
  result.loss = table.Loss(mask);
  return result;
}

GreedyResult ReverseGreedy(const DiscreteInstance& inst, std::size_t k) {
  const LossTable table(inst);
  const std::size_t m = inst.size();
  std::vector<char> mask(m, 1);
  std::vector<double> best1(m);
  std::vector<double> best2(m);
  std::vector<std::size_t> arg1(m);

  // best1/arg1: smallest phi over the cache (lowest index on ties); best2:
  // smallest phi over the cache without arg1. Minima are exact, so the
  // per-removal sums below reproduce LossTable::Loss bit-for-bit.
  auto refresh = [&]() {
    for (std::size_t i = 0; i < m; ++i) {
      double b1 = kEmptyPhi;
      double b2 = kEmptyPhi;
      std::size_t a1 = kOutside;
      for (std::size_t j = 0; j < m; ++j) {
        if (!mask[j]) continue;
        const double v = table.phi(i, j);
        if (a1 == kOutside || v < b1) {
          if (a1 != kOutside) b2 = std::min(b2, b1);
          b1 = std::min(v, kEmptyPhi);
          a1 = j;
        } else {
          b2 = std::min(b2, v);
        }
      }
      best1[i] = b1;
      best2[i] = b2;
      arg1[i] = a1;
    }
  };

  GreedyResult result;
  for (std::size_t remaining = m; remaining > k; --remaining) {
    refresh();
    std::size_t best_j = kOutside;
    double best_loss = kInf;
    for (std::size_t j = 0; j < m; ++j) {
      if (!mask[j]) continue;
      double loss = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double nearest = arg1[i] == j ? best2[i] : best1[i];
        loss += table.weight(i) * std::min(table.clamped_cost(i), nearest);
      }
      if (loss < best_loss) {
        best_loss = loss;
        best_j = j;
      }
    }
    mask[best_j] = 0;
    result.removal_order.push_back(best_j);
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (mask[j]) result.cache.push_back(j);
  }
  result.loss = table.Loss(mask);
  return result;
}

double BinomialCount(std::size_t m, std::size_t k) {
  if (k > m) return 0.0;
  k = std::min(k, m - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(m - k + i) / static_cast<double>(i);
  }
  return std::round(c);
}

OracleResult BruteForceOracle(const DiscreteInstance& inst, std::size_t k) {
  const std::size_t m = inst.size();
  const std::size_t size = std::min(k, m);
  const double count = BinomialCount(m, size);
  if (count > kBruteForceGuard) {
    throw ContractViolation("brute force refused: C(" + std::to_string(m) +
                            "," + std::to_string(size) + ") = " +
                            std::to_string(count) + " exceeds guard");
  }
  const LossTable table(inst);
  std::vector<char> mask(m, 0);
  std::vector<std::size_t> combo(size);
  for (std::size_t i = 0; i < size; ++i) combo[i] = i;

  OracleResult best;
  best.loss = kInf;
  while (true) {
    std::fill(mask.begin(), mask.end(), 0);
    for (std::size_t j : combo) mask[j] = 1;
    const double loss = table.Loss(mask);
    if (loss < best.loss) {
      best.loss = loss;
      best.cache = combo;
    }
    // Next combination in lexicographic order.
    std::size_t i = size;
    while (i > 0 && combo[i - 1] == m - size + (i - 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < size; ++j) combo[j] = combo[j - 1] + 1;
  }
  return best;
}

McEstimate MonteCarloLoss(std::span<const Embedding> cache,
                          const CostField& field, const MismatchFn& mismatch,
                          const QuerySampler& sampler, std::size_t n_samples,
                          Rng& rng) {
  if (n_samples == 0) throw ContractViolation("monte carlo needs samples");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Embedding x = sampler(rng);
    double d = kInf;
    NearestIndex(cache, x, &d);
    const double v = std::min(field.TrueCost(x), mismatch(d));
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var =
      n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace semcache
