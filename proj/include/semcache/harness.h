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

#ifndef SEMCACHE_HARNESS_H_
#define SEMCACHE_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "semcache/cache.h"
#include "semcache/config.h"
#include "semcache/cost_model.h"
#include "semcache/rng.h"
#include "semcache/workload.h"

namespace semcache {

// Universe and cost field shared by every seed of an experiment.
struct World {
  Universe universe;
  std::optional<CostField> field;
  // Trace workloads only.
  std::vector<double> popularity;
  std::size_t source_count = 1;
  std::optional<TraceSpec> trace;
};

World BuildWorld(const ExperimentSpec& spec);

// The seeded arrival sequence every policy of a (cell, seed) pair sees.
std::vector<Query> GenerateArrivals(const ExperimentSpec& spec,
                                    const World& world, std::uint64_t seed,
                                    std::size_t count);

// True instance over `centers`: Voronoi weights under the arrival law
// (Monte Carlo for synthetic streams, exact for traces) and true costs.
struct EvalInstance {
  DiscreteInstance inst;
  std::vector<double> weight_std_errors;
};
EvalInstance BuildEvalInstance(const ExperimentSpec& spec, const World& world,
                               std::span<const Embedding> centers,
                               std::uint64_t seed);

struct Comparator {
  std::vector<std::size_t> cache;
  double loss = 0.0;
  double std_error = 0.0;
  bool exact = false;  // brute force rather than reverse greedy
};

// Brute force when C(m, k) is within the guard, reverse greedy otherwise.
// The standard error propagates the weight estimates.
Comparator ComputeComparator(const EvalInstance& eval, std::size_t k);

// Discretized true loss of `cache` minus alpha times the comparator loss.
double ComputeSuboptimality(const DiscreteInstance& eval,
                            std::span<const Embedding> cache,
                            double comparator_loss, double alpha);

// Cumulative regret: sum over rounds of (loss_t - alpha * comparator) plus
// switch payments. Throws ContractViolation on length mismatch.
std::vector<double> ComputeRegretSeries(std::span<const double> round_losses,
                                        std::span<const double> payments,
                                        double comparator_loss, double alpha);

struct OfflinePolicyMetrics {
  std::string policy;
  double gap = 0.0;
  double loss = 0.0;
  std::size_t cache_size = 0;
  std::size_t net_size = 0;
  double build_cost = 0.0;
  double runtime_ms = 0.0;
};

struct OfflineSeedResult {
  std::uint64_t seed = 0;
  Comparator comparator;
  std::uint64_t arrival_checksum = 0;
  std::vector<OfflinePolicyMetrics> policies;
};

OfflineSeedResult RunOfflineSeed(const ExperimentSpec& spec, const World& world,
                                 const Cell& cell, std::uint64_t seed);

struct OnlinePolicyMetrics {
  std::string policy;
  std::vector<double> cumulative_regret;  // length T
  double final_avg_regret = 0.0;
  std::uint64_t switches = 0;
  std::uint64_t cache_changes = 0;
  std::uint64_t llm_calls = 0;
  double switch_payment = 0.0;
  std::size_t centers = 0;
  double runtime_ms = 0.0;
  nlohmann::json diagnostics;
};

struct OnlineSeedResult {
  std::uint64_t seed = 0;
  Comparator comparator;
  std::size_t eval_net_size = 0;
  std::uint64_t arrival_checksum = 0;
  std::vector<OnlinePolicyMetrics> policies;
  // Per-round JSON lines for the first policy when trace emission is on.
  std::vector<nlohmann::json> trace;
};

OnlineSeedResult RunOnlineSeed(const ExperimentSpec& spec, const World& world,
                               const Cell& cell, std::uint64_t seed);

struct ExperimentOutcome {
  std::size_t run_rows = 0;
  std::size_t aggregate_rows = 0;
  std::vector<std::string> failures;
};

// Runs every (cell, seed) pair, writing runs.csv, aggregates.csv,
// runtime.csv, summary.json and manifests.json (plus regret_series.csv and,
// if enabled, trace.jsonl for online specs) into `out_dir`. A failing pair
// is recorded and skipped. Seeds are shifted by `seed_offset`.
ExperimentOutcome RunExperiment(const ExperimentSpec& spec,
                                const std::filesystem::path& out_dir,
                                std::int64_t seed_offset = 0);

// Reverse greedy against brute force on small random instances: m uniform
// on [2, max_points], k uniform on [1, min(max_k, m)], unit points in
// `dim` dimensions, flat-Dirichlet weights and costs uniform on [0, 1].
struct OracleCheckRow {
  std::size_t index = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  double greedy_loss = 0.0;
  double optimal_loss = 0.0;
  double ratio = 1.0;
};
struct OracleCheckSpec {
  std::size_t instances = 100;
  std::size_t max_points = 8;
  std::size_t max_k = 3;
  std::size_t dim = 2;
  std::uint64_t seed = 1;
};
DiscreteInstance RandomOracleInstance(std::size_t m, std::size_t dim, Rng& rng);
std::vector<OracleCheckRow> RunOracleCheck(const OracleCheckSpec& spec);

// Fixed-precision number formatting used in every CSV.
std::string FormatNumber(double v);

}  // namespace semcache

#endif  // SEMCACHE_HARNESS_H_
