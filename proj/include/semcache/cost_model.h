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

#ifndef SEMCACHE_COST_MODEL_H_
#define SEMCACHE_COST_MODEL_H_

#include <cstdint>
#include <limits>
#include <vector>

#include "semcache/geometry.h"
#include "semcache/krr.h"
#include "semcache/rng.h"

namespace semcache {

// phi(d) = min(zeta * d, 1); an infinite distance (empty cache) maps to 1.
struct MismatchFn {
  double zeta = 1.0;

  double operator()(double d) const {
    if (d == std::numeric_limits<double>::infinity()) return 1.0;
    const double v = zeta * d;
    return v < 1.0 ? v : 1.0;
  }
};

inline constexpr double kDefaultCostFloor = 0.01;

enum class CostMode { kTokenLength, kSyntheticRkhs };

// Ground-truth expected serving cost c(x) in (0, 1].
class CostField {
 public:
  // Min-max normalized token length of the nearest universe point, floored at
  // `c_min`. If all lengths are equal every cost is 0.5 and a warning is
  // logged.
  static CostField FromTokenLengths(std::vector<Embedding> universe,
                                    std::vector<std::uint32_t> token_lengths,
                                    double c_min = kDefaultCostFloor);

  // c(x) = clamp(scale * sum_j w_j k(a_j, x), c_min, 1) with the scale chosen
  // so that the largest value over the anchors is 1. Weights must be
  // nonnegative with at least one positive entry.
  static CostField SyntheticRkhs(std::vector<Embedding> anchors,
                                 std::vector<double> weights,
                                 KernelSpec kernel,
                                 double c_min = kDefaultCostFloor);

  CostMode mode() const { return mode_; }
  double c_min() const { return c_min_; }

  double TrueCost(const Embedding& x) const;
  // Token mode: cost of universe point i. Synthetic mode: cost at anchor i.
  double PointCost(std::size_t i) const;

  const std::vector<Embedding>& points() const { return points_; }
  const std::vector<double>& point_costs() const { return point_costs_; }

  // Synthetic mode only: the unclamped kernel expansion and its RKHS norm
  // scale * sqrt(w^T K w). Zero in token mode.
  double Unclamped(const Embedding& x) const;
  double rkhs_norm() const { return rkhs_norm_; }
  bool degenerate() const { return degenerate_; }

 private:
  CostField() = default;

  CostMode mode_ = CostMode::kTokenLength;
  double c_min_ = kDefaultCostFloor;
  std::vector<Embedding> points_;
  std::vector<double> point_costs_;
  std::vector<double> weights_;
  KernelSpec kernel_;
  double scale_ = 1.0;
  double rkhs_norm_ = 0.0;
  bool degenerate_ = false;
};

// Additive Normal(0, r^2) noise on observed costs, optionally clipped to
// [0, 1].
struct NoiseSpec {
  double r = 0.1;
  bool clip = true;
};

double SampleCost(const CostField& field, const NoiseSpec& noise,
                  const Embedding& x, Rng& rng);
double SampleAround(double mean, const NoiseSpec& noise, Rng& rng);

}  // namespace semcache

#endif  // SEMCACHE_COST_MODEL_H_
