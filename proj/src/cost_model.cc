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

#include "semcache/cost_model.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "semcache/errors.h"
#include "spdlog/spdlog.h"

namespace semcache {

CostField CostField::FromTokenLengths(std::vector<Embedding> universe,
                                      std::vector<std::uint32_t> token_lengths,
                                      double c_min) {
  if (universe.empty()) throw ConfigError("cost field needs a universe");
  if (universe.size() != token_lengths.size()) {
    throw ConfigError("token length count " +
                      std::to_string(token_lengths.size()) +
                      " does not match universe size " +
                      std::to_string(universe.size()));
  }
  if (!(c_min > 0.0 && c_min <= 1.0)) {
    throw ConfigError("c_min must lie in (0, 1]");
  }
  CostField f;
  f.mode_ = CostMode::kTokenLength;
  f.c_min_ = c_min;
  const auto [lo_it, hi_it] =
      std::minmax_element(token_lengths.begin(), token_lengths.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  f.point_costs_.resize(universe.size());
  if (hi == lo) {
    spdlog::warn("all token lengths equal ({}); using cost 0.5 everywhere",
                 *lo_it);
    f.degenerate_ = true;
    std::fill(f.point_costs_.begin(), f.point_costs_.end(), 0.5);
  } else {
    for (std::size_t i = 0; i < universe.size(); ++i) {
      const double c = (token_lengths[i] - lo) / (hi - lo);
      f.point_costs_[i] = std::clamp(c, c_min, 1.0);
    }
  }
  f.points_ = std::move(universe);
  return f;
}

CostField CostField::SyntheticRkhs(std::vector<Embedding> anchors,
                                   std::vector<double> weights,
                                   KernelSpec kernel, double c_min) {
  if (anchors.empty() || anchors.size() != weights.size()) {
    throw ConfigError("synthetic cost field needs matching anchors/weights");
  }
  if (!(c_min > 0.0 && c_min <= 1.0)) {
    throw ConfigError("c_min must lie in (0, 1]");
  }
  bool any_positive = false;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw ConfigError("synthetic cost weights must be nonnegative");
    }
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw ConfigError("synthetic cost weights are all zero");

  CostField f;
  f.mode_ = CostMode::kSyntheticRkhs;
  f.c_min_ = c_min;
  f.kernel_ = kernel;
  f.points_ = std::move(anchors);
  f.weights_ = std::move(weights);
  const std::size_t n = f.points_.size();
  std::vector<double> raw(n, 0.0);
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double k = kernel.Eval(f.points_[i], f.points_[j]);
      raw[i] += f.weights_[j] * k;
      quad += f.weights_[i] * f.weights_[j] * k;
    }
  }
  f.scale_ = 1.0 / *std::max_element(raw.begin(), raw.end());
  f.rkhs_norm_ = f.scale_ * std::sqrt(quad);
  f.point_costs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.point_costs_[i] = std::clamp(f.scale_ * raw[i], c_min, 1.0);
  }
  return f;
}

double CostField::Unclamped(const Embedding& x) const {
  if (mode_ != CostMode::kSyntheticRkhs) return 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < points_.size(); ++j) {
    acc += weights_[j] * kernel_.Eval(points_[j], x);
  }
  return scale_ * acc;
}

double CostField::TrueCost(const Embedding& x) const {
  if (mode_ == CostMode::kSyntheticRkhs) {
    return std::clamp(Unclamped(x), c_min_, 1.0);
  }
  return point_costs_[NearestIndex(points_, x, nullptr)];
}

double CostField::PointCost(std::size_t i) const {
  if (i >= point_costs_.size()) {
    throw ContractViolation("cost point index out of range");
  }
  return point_costs_[i];
}

double SampleAround(double mean, const NoiseSpec& noise, Rng& rng) {
  if (noise.r <= 0.0) return mean;
  std::normal_distribution<double> gauss(0.0, noise.r);
  const double y = mean + gauss(rng);
  return noise.clip ? std::clamp(y, 0.0, 1.0) : y;
}

double SampleCost(const CostField& field, const NoiseSpec& noise,
                  const Embedding& x, Rng& rng) {
  return SampleAround(field.TrueCost(x), noise, rng);
}

}  // namespace semcache
