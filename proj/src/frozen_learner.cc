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

#include "semcache/frozen_learner.h"

#include <cmath>
#include <numeric>
#include <string>

#include "semcache/errors.h"

namespace semcache {

double FrozenConfig::EffectiveDelta() const {
  return conf.delta > 0.0 ? conf.delta : 1.0 / static_cast<double>(horizon);
}

double StageTolerance(int s) {
  if (s < 1 || s > kMaxStage) {
    throw NumericError("stage index " + std::to_string(s) +
                       " outside the representable tolerance range");
  }
  return std::exp2(-std::exp2(static_cast<double>(s)));
}

double StageRadius(int s, double lipschitz_g) {
  return StageTolerance(s) / (2.0 * lipschitz_g);
}

double PoolUncertainty(std::size_t m_s, std::uint64_t t, std::uint64_t n,
                       double delta, double pool_constant) {
  if (n == 0) throw ContractViolation("pool uncertainty needs n >= 1");
  const double td = static_cast<double>(t);
  const double numer = static_cast<double>(m_s) * std::log(2.0) +
                       std::log(2.0 * td * td / delta);
  return pool_constant * std::sqrt(numer / static_cast<double>(n));
}

double CostUncertainty(const KrrModel& model, const ConfidenceSpec& conf,
                       std::uint64_t t) {
  return OnlineBeta(model, conf) *
         std::sqrt(2.0 * model.info_gain() / static_cast<double>(t));
}

FrozenLearner::FrozenLearner(FrozenConfig config)
    : config_(config),
      conf_(config.conf),
      krr_(config.kernel, config.kernel.ridge_lambda),
      cache_(config.k),
      tolerance_(StageTolerance(1)),
      radius_(StageRadius(1, config.lipschitz_g)) {
  conf_.delta = config_.EffectiveDelta();
  if (!(conf_.delta > 0.0 && conf_.delta < 1.0)) {
    throw ConfigError("delta must lie in (0, 1)");
  }
  if (!(config.lipschitz_g > 0.0) || !(config.pool_constant > 0.0)) {
    throw ConfigError("L_g and C_p must be positive");
  }
}

double FrozenLearner::Refresh(Environment& env, bool* changed) {
  const std::size_t old_size = pool_.size();
  pool_ = all_seen_;
  const std::size_t m = pool_.size();

  // Old members keep their stage frequencies; the mass that fell outside
  // every frozen cell is spread evenly over the members added now.
  const double n = static_cast<double>(std::max<std::uint64_t>(1, n_));
  std::vector<double> w(m, 0.0);
  for (std::size_t i = 0; i < old_size; ++i) w[i] = counts_[i] / n;
  if (m > old_size) {
    const double share = bottom_count_ / n / static_cast<double>(m - old_size);
    for (std::size_t i = old_size; i < m; ++i) w[i] = share;
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v = total > 0.0 ? v / total : 1.0 / m;

  DiscreteInstance inst;
  inst.points = pool_;
  inst.weights = std::move(w);
  inst.mismatch = env.mismatch;
  inst.costs.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    inst.costs[i] = OptimisticCost(krr_, conf_, pool_[i]);
  }
  const GreedyResult pick = ReverseGreedy(inst, config_.k);
  const double payment =
      ApplyCacheSelection(cache_, pick.cache, pool_, env, changed);

  history_.push_back({stage_, tolerance_, radius_, stage_start_, n_, old_size});
  ++stage_;
  tolerance_ = StageTolerance(stage_);
  radius_ = StageRadius(stage_, config_.lipschitz_g);
  n_ = 0;
  counts_.assign(m, 0);
  bottom_count_ = 0;
  stage_start_ = t_ + 1;
  ++switches_;
  return payment;
}

RoundOutcome FrozenLearner::Step(const Embedding& x, Environment& env) {
  ++t_;
  RoundOutcome out;
  bool seen = false;
  for (const Embedding& e : all_seen_) {
    if (e == x) {
      seen = true;
      break;
    }
  }
  if (!seen) all_seen_.push_back(x);

  ++n_;
  const std::size_t z = AssignCell(pool_, x, radius_);
  if (z == kOutside) {
    ++bottom_count_;
  } else {
    ++counts_[z];
  }
  out.center = z;
  last_u_pool_ = PoolUncertainty(pool_.size() + 1, t_, n_, conf_.delta,
                                 config_.pool_constant);
  last_u_cost_ = CostUncertainty(krr_, conf_, t_);
  if (last_u_cost_ <= tolerance_ && last_u_pool_ <= tolerance_) {
    switch_pending_ = true;
  }
  if (switch_pending_) {
    bool changed = false;
    out.switch_payment = Refresh(env, &changed);
    out.switched = true;
    out.cache_changed = changed;
    switch_pending_ = false;
  }

  const double lcb = OptimisticCost(krr_, conf_, x);
  const double hit_penalty = env.mismatch(cache_.Distance(x));
  if (lcb <= hit_penalty) {
    const double y = env.QueryLlm(x);
    krr_.Append(x, y);
    out.served_from = ServedFrom::kLlm;
    out.realized_cost_component = y;
    ++llm_calls_;
  } else {
    out.served_from = ServedFrom::kCache;
    out.realized_cost_component = hit_penalty;
  }
  std::uint64_t assigned = bottom_count_;
  for (std::uint64_t c : counts_) assigned += c;
  if (assigned != n_) {
    throw ContractViolation("frozen counts do not sum to the stage length");
  }
  return out;
}

std::vector<StageRecord> FrozenLearner::StageHistory() const {
  std::vector<StageRecord> all = history_;
  all.push_back({stage_, tolerance_, radius_, stage_start_, n_, pool_.size()});
  return all;
}

nlohmann::json FrozenLearner::Diagnostics() const {
  nlohmann::json stages = nlohmann::json::array();
  for (const StageRecord& r : StageHistory()) {
    stages.push_back({{"stage", r.stage},
                      {"tolerance", r.tolerance},
                      {"radius", r.radius},
                      {"start_round", r.start_round},
                      {"length", r.length},
                      {"pool_size", r.pool_size}});
  }
  return {{"rounds", t_},
          {"stages_executed", stage_count()},
          {"switches", switches_},
          {"llm_calls", llm_calls_},
          {"pool_size", pool_.size()},
          {"last_pool_uncertainty", last_u_pool_},
          {"last_cost_uncertainty", last_u_cost_},
          {"stages", stages}};
}

}  // namespace semcache
