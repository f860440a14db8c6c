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

#include "semcache/baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "semcache/errors.h"

namespace semcache {
namespace {

// Indices of the k largest positive scores, descending, lowest index first
// among equal scores.
std::vector<std::size_t> TopK(const std::vector<double>& score, std::size_t k) {
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return score[a] > score[b];
  });
  std::vector<std::size_t> keys;
  for (std::size_t i : order) {
    if (keys.size() == k || !(score[i] > 0.0)) break;
    keys.push_back(i);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

double MeanOrZero(double sum, std::uint64_t n) {
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

void RequireArms(const BaselineConfig& config) {
  if (config.arms.empty()) {
    throw ConfigError(BaselineName(config.kind) + " needs a fixed arm set");
  }
}

}  // namespace

BaselineKind ParseBaselineKind(std::string_view name) {
  if (name == "lfu") return BaselineKind::kLfu;
  if (name == "greedy") return BaselineKind::kGreedy;
  if (name == "eps_greedy") return BaselineKind::kEpsGreedy;
  if (name == "discrete_cucb") return BaselineKind::kDiscreteCucb;
  if (name == "discrete_clcb_ls") return BaselineKind::kDiscreteClcbLs;
  throw ConfigError("unknown baseline kind '" + std::string(name) + "'");
}

std::string BaselineName(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kLfu:
      return "lfu";
    case BaselineKind::kGreedy:
      return "greedy";
    case BaselineKind::kEpsGreedy:
      return "eps_greedy";
    case BaselineKind::kDiscreteCucb:
      return "discrete_cucb";
    case BaselineKind::kDiscreteClcbLs:
      return "discrete_clcb_ls";
  }
  return "unknown";
}

std::unique_ptr<Policy> MakeBaseline(const BaselineConfig& config) {
  if (config.recompute_period == 0) {
    throw ConfigError("recompute_period must be >= 1");
  }
  if (!(config.epsilon_explore >= 0.0 && config.epsilon_explore <= 1.0)) {
    throw ConfigError("epsilon_explore must lie in [0, 1]");
  }
  switch (config.kind) {
    case BaselineKind::kLfu:
    case BaselineKind::kGreedy:
    case BaselineKind::kEpsGreedy:
      return std::make_unique<FrequencyBaseline>(config);
    case BaselineKind::kDiscreteCucb:
    case BaselineKind::kDiscreteClcbLs:
      return std::make_unique<DiscreteBaseline>(config);
  }
  throw ConfigError("unknown baseline kind");
}

FrequencyBaseline::FrequencyBaseline(BaselineConfig config)
    : config_(std::move(config)),
      net_(config_.eps),
      cache_(config_.k),
      explore_rng_(MakeRng(config_.policy_seed, "explore")) {}

std::vector<std::size_t> FrequencyBaseline::SelectKeys() const {
  const auto counts = net_.arrival_counts();
  std::vector<double> score(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    score[i] = static_cast<double>(counts[i]);
    if (config_.kind != BaselineKind::kLfu) {
      score[i] *= MeanOrZero(obs_sum_[i], obs_count_[i]);
    }
  }
  return TopK(score, config_.k);
}

RoundOutcome FrequencyBaseline::Step(const Embedding& x, Environment& env) {
  ++t_;
  RoundOutcome out;
  const EpsilonNet::InsertResult ins = net_.Insert(x);
  const std::size_t u = ins.index;
  if (ins.is_new_center) {
    obs_count_.push_back(0);
    obs_sum_.push_back(0.0);
    out.new_center = true;
  }
  if ((t_ - 1) % config_.recompute_period == 0) {
    const auto keys = SelectKeys();
    bool changed = false;
    out.switch_payment =
        ApplyCacheSelection(cache_, keys, net_.centers(), env, &changed);
    out.switched = changed;
    out.cache_changed = changed;
    if (changed) ++switches_;
  }
  out.center = u;

  bool explore = false;
  if (config_.kind == BaselineKind::kEpsGreedy) {
    explore = std::bernoulli_distribution(config_.epsilon_explore)(explore_rng_);
  }
  const double d = cache_.Distance(x);
  if (!explore && d <= config_.EffectiveServeRadius()) {
    out.served_from = ServedFrom::kCache;
    out.realized_cost_component = env.mismatch(d);
  } else {
    const double y = env.QueryLlm(x);
    obs_count_[u] += 1;
    obs_sum_[u] += y;
    out.served_from = ServedFrom::kLlm;
    out.realized_cost_component = y;
    ++llm_calls_;
  }
  net_.RecordArrival(u);
  return out;
}

nlohmann::json FrequencyBaseline::Diagnostics() const {
  return {{"rounds", t_},
          {"cells", net_.size()},
          {"switches", switches_},
          {"llm_calls", llm_calls_}};
}

DiscreteBaseline::DiscreteBaseline(BaselineConfig config)
    : config_(std::move(config)),
      stages_(config_.horizon),
      cache_(config_.k) {
  RequireArms(config_);
  const std::size_t m = config_.arms.size();
  arrivals_.assign(m, 0);
  obs_count_.assign(m, 0);
  obs_sum_.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) stages_.AddCenter();
}

double DiscreteBaseline::Mean(std::size_t arm) const {
  return MeanOrZero(obs_sum_.at(arm), obs_count_.at(arm));
}

double DiscreteBaseline::Radius(std::size_t arm) const {
  if (obs_count_.at(arm) == 0) return std::numeric_limits<double>::infinity();
  const double t = static_cast<double>(std::max<std::uint64_t>(1, t_));
  return std::sqrt(2.0 * std::log(t) / static_cast<double>(obs_count_[arm]));
}

double DiscreteBaseline::Rebuild(Environment& env, bool upper, bool* changed) {
  const std::size_t m = config_.arms.size();
  const double denom =
      static_cast<double>(std::max<std::uint64_t>(1, t_ == 0 ? 0 : t_ - 1));
  DiscreteInstance inst;
  inst.points = config_.arms;
  inst.mismatch = env.mismatch;
  inst.weights.resize(m);
  inst.costs.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    inst.weights[i] = static_cast<double>(arrivals_[i]) / denom;
    const double r = Radius(i);
    if (obs_count_[i] == 0) {
      inst.costs[i] = upper ? 1.0 : -1.0;
    } else {
      inst.costs[i] = upper ? std::min(1.0, Mean(i) + r) : Mean(i) - r;
    }
  }
  const GreedyResult pick = ReverseGreedy(inst, config_.k);
  return ApplyCacheSelection(cache_, pick.cache, config_.arms, env, changed);
}

RoundOutcome DiscreteBaseline::Step(const Embedding& x, Environment& env) {
  ++t_;
  RoundOutcome out;
  const std::size_t u = NearestIndex(config_.arms, x, nullptr);
  out.center = u;
  const bool ls = config_.kind == BaselineKind::kDiscreteClcbLs;

  bool rebuild = false;
  if (ls) {
    rebuild = stages_.Check(config_.arms.size()) || t_ == 1;
  } else {
    rebuild = (t_ - 1) % config_.recompute_period == 0;
  }
  if (rebuild) {
    bool changed = false;
    out.switch_payment = Rebuild(env, /*upper=*/!ls, &changed);
    out.switched = ls ? true : changed;
    out.cache_changed = changed;
    if (out.switched) ++switches_;
  }

  const double d = cache_.Distance(x);
  bool to_llm = false;
  if (ls) {
    const double lcb = obs_count_[u] == 0 ? -1.0 : Mean(u) - Radius(u);
    to_llm = lcb <= env.mismatch(d);
  } else {
    to_llm = d > config_.EffectiveServeRadius();
  }
  if (to_llm) {
    const double y = env.QueryLlm(x);
    obs_count_[u] += 1;
    obs_sum_[u] += y;
    if (ls) stages_.RecordObservation(u);
    out.served_from = ServedFrom::kLlm;
    out.realized_cost_component = y;
    ++llm_calls_;
  } else {
    out.served_from = ServedFrom::kCache;
    out.realized_cost_component = env.mismatch(d);
  }
  arrivals_[u] += 1;
  if (ls) stages_.RecordArrival();
  return out;
}

nlohmann::json DiscreteBaseline::Diagnostics() const {
  return {{"rounds", t_},
          {"arms", config_.arms.size()},
          {"switches", switches_},
          {"llm_calls", llm_calls_}};
}

std::vector<Embedding> OfflineBaselineCache(const BaselineConfig& config,
                                            const OfflineDataset& data,
                                            const MismatchFn& mismatch) {
  if (data.records.empty()) throw ConfigError("offline dataset is empty");
  std::vector<Embedding> queries;
  queries.reserve(data.size());
  for (const OfflineRecord& r : data.records) queries.push_back(r.query);

  switch (config.kind) {
    case BaselineKind::kLfu:
    case BaselineKind::kGreedy: {
      const EpsilonNet net = BuildStaticNet(queries, config.eps);
      std::vector<std::uint64_t> n_obs(net.size(), 0);
      std::vector<double> sums(net.size(), 0.0);
      for (const OfflineRecord& r : data.records) {
        if (!r.cost) continue;
        const std::size_t cell = net.Nearest(r.query);
        n_obs[cell] += 1;
        sums[cell] += *r.cost;
      }
      std::vector<double> score(net.size());
      for (std::size_t i = 0; i < net.size(); ++i) {
        score[i] = static_cast<double>(net.arrival_counts()[i]);
        if (config.kind == BaselineKind::kGreedy) {
          score[i] *= MeanOrZero(sums[i], n_obs[i]);
        }
      }
      std::vector<Embedding> out;
      for (std::size_t key : TopK(score, config.k)) {
        out.push_back(net.center(key));
      }
      return out;
    }
    case BaselineKind::kDiscreteCucb: {
      RequireArms(config);
      const std::size_t m = config.arms.size();
      std::vector<double> w(m, 0.0);
      std::vector<std::uint64_t> n_obs(m, 0);
      std::vector<double> sums(m, 0.0);
      for (const OfflineRecord& r : data.records) {
        const std::size_t arm = NearestIndex(config.arms, r.query, nullptr);
        w[arm] += 1.0 / static_cast<double>(data.size());
        if (r.cost) {
          n_obs[arm] += 1;
          sums[arm] += *r.cost;
        }
      }
      const double log_n = std::log(static_cast<double>(data.size()));
      std::vector<double> costs(m, 1.0);
      for (std::size_t i = 0; i < m; ++i) {
        if (n_obs[i] > 0) {
          costs[i] = std::min(1.0, sums[i] / n_obs[i] +
                                       std::sqrt(2.0 * log_n / n_obs[i]));
        }
      }
      DiscreteInstance inst{config.arms, std::move(w), std::move(costs),
                            mismatch};
      std::vector<Embedding> out;
      for (std::size_t key : ReverseGreedy(inst, config.k).cache) {
        out.push_back(config.arms[key]);
      }
      return out;
    }
    case BaselineKind::kEpsGreedy:
    case BaselineKind::kDiscreteClcbLs:
      break;
  }
  throw ConfigError(BaselineName(config.kind) + " has no offline form");
}

}  // namespace semcache
