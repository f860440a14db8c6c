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

#include "semcache/offline_learner.h"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "semcache/errors.h"
#include "spdlog/spdlog.h"

namespace semcache {

std::size_t OfflineDataset::cost_observations() const {
  std::size_t n = 0;
  for (const OfflineRecord& r : records) n += r.cost.has_value();
  return n;
}

double LoggingPolicy::PropensityFor(std::size_t universe_index) const {
  if (universe_index < per_point_nu.size()) return per_point_nu[universe_index];
  return nu;
}

std::string LoggingPolicy::Tag() const {
  std::ostringstream os;
  os << "bernoulli_nu=" << nu;
  if (!per_point_nu.empty()) os << "+overrides";
  return os.str();
}

OfflineDataset LogDataset(std::span<const Query> queries,
                          const CostField& field, const NoiseSpec& noise,
                          const LoggingPolicy& logging, Rng& rng) {
  OfflineDataset data;
  data.logging_policy_tag = logging.Tag();
  data.records.reserve(queries.size());
  for (const Query& q : queries) {
    const double nu = logging.PropensityFor(q.universe_index);
    if (!(nu >= 0.0 && nu <= 1.0)) {
      throw ConfigError("logging propensity must lie in [0, 1]");
    }
    OfflineRecord rec{q.x, std::nullopt, q.universe_index};
    if (std::bernoulli_distribution(nu)(rng)) {
      rec.cost = SampleCost(field, noise, q.x, rng);
    }
    data.records.push_back(std::move(rec));
  }
  return data;
}

OfflineDataset ReadDatasetLog(const std::filesystem::path& path,
                              std::span<const Embedding> universe) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset log " + path.string());
  OfflineDataset data;
  data.logging_policy_tag = "file:" + path.filename().string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (!j.contains("query_index") || !j["query_index"].is_number_unsigned()) {
      throw ConfigError(where + ": missing unsigned query_index");
    }
    const auto idx = j["query_index"].get<std::size_t>();
    if (idx >= universe.size()) {
      throw ConfigError(where + ": query_index out of range");
    }
    OfflineRecord rec{universe[idx], std::nullopt, idx};
    if (j.contains("cost") && !j["cost"].is_null()) {
      if (!j["cost"].is_number()) throw ConfigError(where + ": bad cost");
      const double c = j["cost"].get<double>();
      if (!(c >= 0.0 && c <= 1.0)) {
        throw ConfigError(where + ": cost outside [0, 1]");
      }
      rec.cost = c;
    }
    data.records.push_back(std::move(rec));
  }
  return data;
}

void WriteDatasetLog(const std::filesystem::path& path,
                     const OfflineDataset& data) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (const OfflineRecord& r : data.records) {
    if (r.universe_index == kOutside) {
      throw ContractViolation("dataset log needs universe indices");
    }
    nlohmann::json j = {{"query_index", r.universe_index}};
    j["cost"] = r.cost ? nlohmann::json(*r.cost) : nlohmann::json(nullptr);
    out << j.dump() << "\n";
  }
}

OfflineResult RunOffline(const OfflineDataset& data,
                         const OfflineConfig& config, const FetchFn& fetch) {
  if (data.records.empty()) throw ConfigError("offline dataset is empty");
  std::vector<Embedding> queries;
  queries.reserve(data.size());
  for (const OfflineRecord& r : data.records) queries.push_back(r.query);

  OfflineResult res;
  res.net = BuildStaticNet(queries, config.eps);
  const std::size_t m = res.net.size();
  res.weights = res.net.EmpiricalWeights();

  res.cost_observations = data.cost_observations();
  const double ell = static_cast<double>(res.cost_observations);
  if (res.cost_observations == 0) {
    spdlog::warn("offline dataset has no cost observations; using the prior");
  }
  res.ridge = config.kernel.ridge_lambda * std::max(1.0, ell);
  KrrModel model(config.kernel, res.ridge);
  res.cell_observations.assign(m, 0);
  for (const OfflineRecord& r : data.records) {
    if (!r.cost) continue;
    model.Append(r.query, *r.cost);
    res.cell_observations[res.net.Nearest(r.query)] += 1;
  }
  res.propensities.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto arrivals = res.net.arrival_counts()[i];
    res.propensities[i] =
        arrivals == 0 ? 0.0
                      : static_cast<double>(res.cell_observations[i]) / arrivals;
  }

  res.posterior_means.resize(m);
  res.pessimistic_costs.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Posterior post = model.Predict(res.net.center(i));
    res.posterior_means[i] = post.mean;
    res.pessimistic_costs[i] = PessimisticCost(model, config.conf, post, m);
  }

  DiscreteInstance inst{res.net.centers(), res.weights, res.pessimistic_costs,
                        config.mismatch};
  res.greedy = ReverseGreedy(inst, config.k);
  res.cache = CacheState(config.k);
  std::uint64_t handle = 1;
  for (std::size_t key : res.greedy.cache) {
    const Embedding& center = res.net.center(key);
    res.build_cost += fetch ? fetch(center)
                            : std::clamp(res.posterior_means[key], 0.0, 1.0);
    res.cache.Insert({center, handle++, key});
  }
  return res;
}

nlohmann::json OfflineResult::ToJson() const {
  return {{"net_size", net.size()},
          {"eps", net.radius()},
          {"weights", weights},
          {"posterior_means", posterior_means},
          {"pessimistic_costs", pessimistic_costs},
          {"cache", greedy.cache},
          {"removal_order", greedy.removal_order},
          {"surrogate_loss", greedy.loss},
          {"cell_observations", cell_observations},
          {"propensities", propensities},
          {"cost_observations", cost_observations},
          {"ridge", ridge},
          {"build_cost", build_cost}};
}

double OptimalEps(std::uint64_t n, int d_e, int p, double scale) {
  if (n == 0 || d_e < 1 || p < 1) {
    throw ConfigError("optimal eps needs n >= 1, d_e >= 1, p >= 1");
  }
  const double exponent =
      p >= d_e - 2 ? -1.0 / (d_e + 2.0) : -1.0 / (2.0 * d_e + p);
  return scale * std::pow(static_cast<double>(n), exponent);
}

}  // namespace semcache
