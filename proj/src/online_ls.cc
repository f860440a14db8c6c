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

#include "semcache/online_ls.h"

#include <cmath>
#include <numeric>
#include <string>

#include "semcache/errors.h"

namespace semcache {

double OnlineConfig::EffectiveDelta() const {
  return conf.delta > 0.0 ? conf.delta : 1.0 / static_cast<double>(horizon);
}

OnlineLsLearner::OnlineLsLearner(OnlineConfig config)
    : config_(config),
      conf_(config.conf),
      net_(config.eps),
      krr_(config.kernel, config.kernel.ridge_lambda),
      stages_(config.horizon),
      cache_(config.k) {
  conf_.delta = config_.EffectiveDelta();
  if (!(conf_.delta > 0.0 && conf_.delta < 1.0)) {
    throw ConfigError("delta must lie in (0, 1)");
  }
}

double OnlineLsLearner::CenterLcb(std::size_t u) const {
  return OptimisticCost(krr_, conf_, krr_.ProbePosterior(u));
}

double OnlineLsLearner::SwitchCache(Environment& env, bool* changed) {
  const std::size_t m = net_.size();
  const double denom =
      static_cast<double>(std::max<std::uint64_t>(1, t_ == 0 ? 0 : t_ - 1));
  DiscreteInstance inst;
  inst.points = net_.centers();
  inst.mismatch = env.mismatch;
  inst.weights.resize(m);
  inst.costs.resize(m);
  for (std::size_t u = 0; u < m; ++u) {
    inst.weights[u] = static_cast<double>(net_.arrival_counts()[u]) / denom;
    inst.costs[u] = CenterLcb(u);
  }
  const GreedyResult pick = ReverseGreedy(inst, config_.k);
  return ApplyCacheSelection(cache_, pick.cache, net_.centers(), env, changed);
}

RoundOutcome OnlineLsLearner::Step(const Embedding& x, Environment& env) {
  ++t_;
  RoundOutcome out;
  bool do_switch = false;

  const EpsilonNet::InsertResult ins = net_.Insert(x);
  const std::size_t u = ins.index;
  if (ins.is_new_center) {
    krr_.AddProbe(net_.center(u));
    n_c_.push_back(0);
    l_c_.push_back(0.0);
    stages_.AddCenter();
    out.new_center = true;
    do_switch = true;
    ++new_center_rounds_;
  }
  if (stages_.Check(net_.size())) do_switch = true;

  if (do_switch) {
    bool changed = false;
    out.switch_payment = SwitchCache(env, &changed);
    out.switched = true;
    out.cache_changed = changed;
    ++switches_;
    if (changed) ++cache_changes_;
  }

  out.center = u;
  const double lcb = CenterLcb(u);
  const double hit_penalty = env.mismatch(cache_.Distance(x));
  if (lcb <= hit_penalty) {
    const double y = env.QueryLlm(x);
    krr_.Append(x, y);
    n_c_[u] += 1;
    l_c_[u] += y;
    stages_.RecordObservation(u);
    out.served_from = ServedFrom::kLlm;
    out.realized_cost_component = y;
    ++llm_calls_;
  } else {
    out.served_from = ServedFrom::kCache;
    out.realized_cost_component = hit_penalty;
  }
  net_.RecordArrival(u);
  stages_.RecordArrival();

  if (config_.check_every_round || t_ % kInvariantStride == 0 ||
      t_ == config_.horizon) {
    CheckInvariants();
  }
  return out;
}

void OnlineLsLearner::CheckInvariants() const {
  auto fail = [this](const std::string& what) {
    throw ContractViolation("online invariant violated at t=" +
                            std::to_string(t_) + ": " + what);
  };
  if (net_.total_arrivals() != t_) fail("sum of N_f != t");
  const auto counts = net_.arrival_counts();
  if (std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) != t_) {
    fail("arrival counts do not sum to t");
  }
  if (stages_.global_current() + stages_.global_past() != t_) {
    fail("global stage sizes do not sum to t");
  }
  std::uint64_t ell = 0;
  for (std::size_t u = 0; u < n_c_.size(); ++u) {
    if (stages_.current(u) + stages_.past(u) != n_c_[u]) {
      fail("local stage sizes of center " + std::to_string(u) + " != N_c");
    }
    ell += n_c_[u];
  }
  if (ell != krr_.size()) fail("sum of N_c != observation count");
  if (cache_.size() > config_.k) fail("cache over capacity");
}

nlohmann::json OnlineLsLearner::Diagnostics() const {
  return {{"rounds", t_},
          {"centers", net_.size()},
          {"switches", switches_},
          {"cache_changes", cache_changes_},
          {"new_center_rounds", new_center_rounds_},
          {"local_stage_advances", stages_.local_advances()},
          {"global_stage_advances", stages_.global_advances()},
          {"llm_calls", llm_calls_},
          {"observations", krr_.size()},
          {"info_gain", krr_.info_gain()}};
}

}  // namespace semcache
