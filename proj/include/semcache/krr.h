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

#ifndef SEMCACHE_KRR_H_
#define SEMCACHE_KRR_H_

#include <cstddef>
#include <span>
#include <vector>

#include "nlohmann/json.hpp"
#include "semcache/geometry.h"

namespace semcache {

// Unit-variance RBF kernel on raw Euclidean distance:
//   k(x, y) = exp(-||x - y||^2 / (2 * length_scale^2)).
// Cache geometry uses the halved distance; the kernel does not.
struct KernelSpec {
  double length_scale = 0.5;
  double ridge_lambda = 1.0;

  double Eval(const Embedding& a, const Embedding& b) const;
};

struct ConfidenceSpec {
  double rkhs_bound = 1.0;  // B
  double noise_r = 0.1;     // R
  double delta = 0.05;
};

inline constexpr double kCholeskyJitter = 1e-10;

struct Posterior {
  double mean = 0.0;
  double sigma = 1.0;
};

// Kernel ridge regression with an incrementally extended Cholesky factor of
// (K + ridge * I).
//
// The ridge is fixed at construction; callers pick the effective value (the
// offline learner scales lambda by the observation count, the online learners
// do not). The factor is stored as packed rows so that appending an
// observation only adds a row.
//
// Probes are query points whose posterior is kept current across appends at
// O(n) cost per append instead of O(n^2) per query; learners register their
// net centers as probes.
class KrrModel {
 public:
  KrrModel(KernelSpec kernel, double ridge);

  const KernelSpec& kernel() const { return kernel_; }
  double ridge() const { return ridge_; }
  std::size_t size() const { return inputs_.size(); }
  bool empty() const { return inputs_.empty(); }

  // Running 0.5 * log det(I + K / ridge).
  double info_gain() const { return info_gain_; }

  const std::vector<Embedding>& inputs() const { return inputs_; }
  const std::vector<double>& targets() const { return targets_; }

  // Posterior mean and standard deviation; (0, 1) with no observations.
  // Throws NumericError if a kernel value is not finite.
  Posterior Predict(const Embedding& x) const;

  // Posterior variance of `z` before the append is used to grow the
  // information gain. Throws NumericError when the factor breaks down or `y`
  // is not finite.
  void Append(const Embedding& z, double y);

  std::size_t AddProbe(const Embedding& x);
  std::size_t probe_count() const { return probes_.size(); }
  Posterior ProbePosterior(std::size_t probe) const;

  // Diagnostic dump: observation count, information gain and the posterior
  // width at each probe point supplied.
  nlohmann::json Snapshot(std::span<const Embedding> probe_grid) const;

 private:
  struct Probe {
    Embedding x;
    std::vector<double> whitened;  // L^{-1} k_x
    double mean = 0.0;
    double whitened_sq = 0.0;
  };

  // Solves L v = k against the packed factor.
  std::vector<double> ForwardSolve(std::span<const double> rhs) const;
  std::vector<double> KernelColumn(const Embedding& x) const;
  static Posterior FromWhitened(double mean, double whitened_sq);

  KernelSpec kernel_;
  double ridge_;
  std::vector<Embedding> inputs_;
  std::vector<double> targets_;
  std::vector<double> packed_chol_;
  std::vector<double> whitened_targets_;  // L^{-1} y
  double info_gain_ = 0.0;
  std::vector<Probe> probes_;
};

// (B + sqrt(log(2m/delta) / ridge)), the multiplier of the posterior width
// in the offline pessimistic bound. `ridge` is the model's effective ridge.
double OfflineRadiusMultiplier(const KrrModel& model,
                               const ConfidenceSpec& conf,
                               std::size_t net_size);

// B + R * sqrt(2 * (gamma + ln(2/delta))), with gamma from the model's
// current observation set.
double OnlineBeta(const KrrModel& model, const ConfidenceSpec& conf);

// mean + offline radius. With no observations returns min(B, 1).
double PessimisticCost(const KrrModel& model, const ConfidenceSpec& conf,
                       const Posterior& posterior, std::size_t net_size);
double PessimisticCost(const KrrModel& model, const ConfidenceSpec& conf,
                       const Embedding& x, std::size_t net_size);

// mean - beta * sigma; -B * sigma with no observations. Not clamped.
double OptimisticCost(const KrrModel& model, const ConfidenceSpec& conf,
                      const Posterior& posterior);
double OptimisticCost(const KrrModel& model, const ConfidenceSpec& conf,
                      const Embedding& x);

}  // namespace semcache

#endif  // SEMCACHE_KRR_H_
