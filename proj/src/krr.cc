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

#include "semcache/krr.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "Eigen/Core"
#include "semcache/errors.h"

namespace semcache {
namespace {

double Dot(const double* a, const double* b, std::size_t n) {
  if (n == 0) return 0.0;
  using Vec = Eigen::Map<const Eigen::VectorXd>;
  return Vec(a, static_cast<Eigen::Index>(n))
      .dot(Vec(b, static_cast<Eigen::Index>(n)));
}

}  // namespace

double KernelSpec::Eval(const Embedding& a, const Embedding& b) const {
  return std::exp(-SquaredEuclidean(a, b) /
                  (2.0 * length_scale * length_scale));
}

KrrModel::KrrModel(KernelSpec kernel, double ridge)
    : kernel_(kernel), ridge_(ridge) {
  if (!(kernel.length_scale > 0.0)) {
    throw ConfigError("kernel length scale must be positive");
  }
  if (!(ridge > 0.0) || !std::isfinite(ridge)) {
    throw ConfigError("ridge must be positive, got " + std::to_string(ridge));
  }
}

std::vector<double> KrrModel::KernelColumn(const Embedding& x) const {
  std::vector<double> k(inputs_.size());
  for (std::size_t j = 0; j < inputs_.size(); ++j) {
    k[j] = kernel_.Eval(inputs_[j], x);
    if (!std::isfinite(k[j])) {
      throw NumericError("non-finite kernel value against observation " +
                         std::to_string(j));
    }
  }
  return k;
}

std::vector<double> KrrModel::ForwardSolve(std::span<const double> rhs) const {
  const std::size_t n = rhs.size();
  std::vector<double> v(n);
  const double* row = packed_chol_.data();
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = (rhs[i] - Dot(row, v.data(), i)) / row[i];
    row += i + 1;
  }
  return v;
}

Posterior KrrModel::FromWhitened(double mean, double whitened_sq) {
  const double var = std::clamp(1.0 - whitened_sq, 0.0, 1.0);
  return {mean, std::sqrt(var)};
}

Posterior KrrModel::Predict(const Embedding& x) const {
  if (inputs_.empty()) return {};
  const std::vector<double> v = ForwardSolve(KernelColumn(x));
  return FromWhitened(Dot(v.data(), whitened_targets_.data(), v.size()),
                      Dot(v.data(), v.data(), v.size()));
}

void KrrModel::Append(const Embedding& z, double y) {
  if (!std::isfinite(y)) throw NumericError("observation target not finite");
  const std::vector<double> k = KernelColumn(z);
  const std::vector<double> l = ForwardSolve(k);
  const double l_sq = Dot(l.data(), l.data(), l.size());
  const double l_dot_w = Dot(l.data(), whitened_targets_.data(), l.size());
  const double self = kernel_.Eval(z, z);
  const double diag_sq = self + ridge_ + kCholeskyJitter - l_sq;
  if (!(diag_sq > 0.0) || !std::isfinite(diag_sq)) {
    throw NumericError("Cholesky extension broke down at observation " +
                       std::to_string(inputs_.size()) + " (pivot " +
                       std::to_string(diag_sq) + ")");
  }
  const double diag = std::sqrt(diag_sq);
  const double var_before = std::max(0.0, self - l_sq);
  info_gain_ += 0.5 * std::log1p(var_before / ridge_);

  packed_chol_.insert(packed_chol_.end(), l.begin(), l.end());
  packed_chol_.push_back(diag);
  const double w_new = (y - l_dot_w) / diag;
  whitened_targets_.push_back(w_new);

  for (Probe& p : probes_) {
    const double dot = Dot(l.data(), p.whitened.data(), l.size());
    const double v_new = (kernel_.Eval(z, p.x) - dot) / diag;
    p.whitened.push_back(v_new);
    p.mean += v_new * w_new;
    p.whitened_sq += v_new * v_new;
  }

  inputs_.push_back(z);
  targets_.push_back(y);
}

std::size_t KrrModel::AddProbe(const Embedding& x) {
  Probe p{x, {}, 0.0, 0.0};
  if (!inputs_.empty()) {
    p.whitened = ForwardSolve(KernelColumn(x));
    const std::size_t n = p.whitened.size();
    p.mean = Dot(p.whitened.data(), whitened_targets_.data(), n);
    p.whitened_sq = Dot(p.whitened.data(), p.whitened.data(), n);
  }
  probes_.push_back(std::move(p));
  return probes_.size() - 1;
}

Posterior KrrModel::ProbePosterior(std::size_t probe) const {
  if (probe >= probes_.size()) throw ContractViolation("probe index out of range");
  const Probe& p = probes_[probe];
  if (inputs_.empty()) return {};
  return FromWhitened(p.mean, p.whitened_sq);
}

nlohmann::json KrrModel::Snapshot(std::span<const Embedding> probe_grid) const {
  nlohmann::json sigmas = nlohmann::json::array();
  for (const Embedding& x : probe_grid) sigmas.push_back(Predict(x).sigma);
  return {{"observations", size()},
          {"info_gain", info_gain_},
          {"ridge", ridge_},
          {"length_scale", kernel_.length_scale},
          {"probe_sigma", sigmas}};
}

double OfflineRadiusMultiplier(const KrrModel& model,
                               const ConfidenceSpec& conf,
                               std::size_t net_size) {
  const double m = static_cast<double>(std::max<std::size_t>(1, net_size));
  return conf.rkhs_bound +
         std::sqrt(std::log(2.0 * m / conf.delta) / model.ridge());
}

double OnlineBeta(const KrrModel& model, const ConfidenceSpec& conf) {
  return conf.rkhs_bound +
         conf.noise_r *
             std::sqrt(2.0 * (model.info_gain() + std::log(2.0 / conf.delta)));
}

double PessimisticCost(const KrrModel& model, const ConfidenceSpec& conf,
                       const Posterior& posterior, std::size_t net_size) {
  if (model.empty()) return std::min(conf.rkhs_bound, 1.0);
  return posterior.mean +
         OfflineRadiusMultiplier(model, conf, net_size) * posterior.sigma;
}

double PessimisticCost(const KrrModel& model, const ConfidenceSpec& conf,
                       const Embedding& x, std::size_t net_size) {
  return PessimisticCost(model, conf, model.Predict(x), net_size);
}

double OptimisticCost(const KrrModel& model, const ConfidenceSpec& conf,
                      const Posterior& posterior) {
  if (model.empty()) return -conf.rkhs_bound * posterior.sigma;
  return posterior.mean - OnlineBeta(model, conf) * posterior.sigma;
}

double OptimisticCost(const KrrModel& model, const ConfidenceSpec& conf,
                      const Embedding& x) {
  return OptimisticCost(model, conf, model.Predict(x));
}

}  // namespace semcache
