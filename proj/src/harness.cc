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

#include "semcache/harness.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <random>

#include "semcache/baselines.h"
#include "semcache/embedding_file.h"
#include "semcache/errors.h"
#include "semcache/frozen_learner.h"
#include "semcache/offline_learner.h"
#include "semcache/online_ls.h"
#include "semcache/policy.h"
#include "spdlog/spdlog.h"

namespace semcache {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ElapsedMs(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

std::vector<std::size_t> Indices(std::span<const Query> arrivals) {
  std::vector<std::size_t> out;
  out.reserve(arrivals.size());
  for (const Query& q : arrivals) out.push_back(q.universe_index);
  return out;
}

std::vector<Embedding> Points(std::span<const Query> arrivals) {
  std::vector<Embedding> out;
  out.reserve(arrivals.size());
  for (const Query& q : arrivals) out.push_back(q.x);
  return out;
}

// Arm set for the discrete baselines.
std::vector<Embedding> DiscreteArms(const ExperimentSpec& spec,
                                    const World& world,
                                    std::span<const Query> arrivals,
                                    double eps) {
  if (spec.workload.kind == WorkloadKind::kSynthetic) {
    return world.universe.points;
  }
  const std::size_t w = std::min(spec.workload.warmup, arrivals.size());
  const auto prefix = Points(arrivals.subspan(0, w));
  return BuildStaticNet(prefix, eps).centers();
}

Environment MakeEnvironment(const ExperimentSpec& spec, const World& world,
                            std::uint64_t seed) {
  Environment env;
  env.field = &*world.field;
  env.noise = spec.cost.noise;
  env.mismatch = spec.mismatch;
  env.rng = MakeRng(seed, "costs");
  return env;
}

struct Stats {
  double mean = 0.0;
  double std = 0.0;
  double se = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Stats Summarize(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  double sum = 0.0;
  s.min = v.front();
  s.max = v.front();
  for (double x : v) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum / v.size();
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (v.size() - 1));
    s.se = s.std / std::sqrt(static_cast<double>(v.size()));
  }
  return s;
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string FormatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

DiscreteInstance RandomOracleInstance(std::size_t m, std::size_t dim,
                                      Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  DiscreteInstance inst;
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> v(dim);
    for (double& c : v) c = gauss(rng);
    inst.points.push_back(Embedding::Normalized(std::move(v)));
    inst.weights.push_back(expo(rng));
    total += inst.weights.back();
    inst.costs.push_back(unit(rng));
  }
  for (double& w : inst.weights) w /= total;
  return inst;
}

std::vector<OracleCheckRow> RunOracleCheck(const OracleCheckSpec& spec) {
  if (spec.max_points < 2 || spec.max_k < 1 || spec.dim < 1) {
    throw ConfigError("oracle check needs max_points >= 2, max_k >= 1, dim >= 1");
  }
  Rng rng = MakeRng(spec.seed, "oracle_check");
  std::vector<OracleCheckRow> rows;
  for (std::size_t i = 0; i < spec.instances; ++i) {
    OracleCheckRow row;
    row.index = i;
    row.m = std::uniform_int_distribution<std::size_t>(2, spec.max_points)(rng);
    row.k = std::uniform_int_distribution<std::size_t>(
        1, std::min(spec.max_k, row.m))(rng);
    const DiscreteInstance inst = RandomOracleInstance(row.m, spec.dim, rng);
    row.greedy_loss = ReverseGreedy(inst, row.k).loss;
    row.optimal_loss = BruteForceOracle(inst, row.k).loss;
    row.ratio = row.optimal_loss > 0.0 ? row.greedy_loss / row.optimal_loss
                                       : (row.greedy_loss > 0.0
                                              ? std::numeric_limits<double>::infinity()
                                              : 1.0);
    rows.push_back(row);
  }
  return rows;
}

World BuildWorld(const ExperimentSpec& spec) {
  World world;
  if (spec.workload.kind == WorkloadKind::kSynthetic) {
    world.universe = GenSyntheticUniverse(spec.workload.synthetic);
  } else {
    TraceSpec trace;
    trace.burst_min = spec.workload.burst_min;
    trace.burst_max = spec.workload.burst_max;
    for (const TraceSourceSpec& s : spec.workload.trace_sources) {
      trace.sources.push_back({ReadEmbeddingFile(s.path), s.popularity_seed});
    }
    TraceStream probe(trace);
    world.universe = probe.universe();
    world.popularity = probe.popularity();
    world.source_count = probe.source_count();
    world.trace = std::move(trace);
  }
  if (spec.cost.mode == CostMode::kTokenLength) {
    world.field = CostField::FromTokenLengths(
        world.universe.points, world.universe.token_lengths, spec.cost.c_min);
  } else {
    const std::size_t n =
        std::min(spec.cost.rkhs_anchors, world.universe.points.size());
    if (n == 0) throw ConfigError("cost.rkhs_anchors must be >= 1");
    std::vector<Embedding> anchors(world.universe.points.begin(),
                                   world.universe.points.begin() + n);
    Rng rng = MakeRng(spec.cost.rkhs_seed, "rkhs_weights");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> weights(n);
    for (double& w : weights) w = unit(rng);
    KernelSpec kernel{spec.cost.rkhs_length_scale, 1.0};
    world.field = CostField::SyntheticRkhs(std::move(anchors), std::move(weights),
                                           kernel, spec.cost.c_min);
  }
  return world;
}

std::vector<Query> GenerateArrivals(const ExperimentSpec& spec,
                                    const World& world, std::uint64_t seed,
                                    std::size_t count) {
  std::vector<Query> out;
  out.reserve(count);
  if (spec.workload.kind == WorkloadKind::kSynthetic) {
    SyntheticSpec syn = spec.workload.synthetic;
    syn.stream_seed = seed;
    SyntheticStream stream(syn, world.universe);
    for (std::size_t t = 0; t < count; ++t) out.push_back(stream.Next());
  } else {
    TraceSpec trace = *world.trace;
    trace.stream_seed = seed;
    TraceStream stream(trace);
    for (std::size_t t = 0; t < count; ++t) out.push_back(stream.Next());
  }
  return out;
}

EvalInstance BuildEvalInstance(const ExperimentSpec& spec, const World& world,
                               std::span<const Embedding> centers,
                               std::uint64_t seed) {
  EvalInstance eval;
  ArrivalTruth truth;
  if (spec.workload.kind == WorkloadKind::kSynthetic) {
    Rng rng = MakeRng(seed, "truth");
    truth = SyntheticTrueWeights(centers, world.universe,
                                 spec.workload.synthetic.EffectiveJitter(),
                                 spec.truth_samples, rng);
  } else {
    truth = TraceTrueWeights(centers, world.universe, world.popularity,
                             world.source_count);
  }
  eval.inst.points.assign(centers.begin(), centers.end());
  eval.inst.weights = std::move(truth.weights);
  eval.weight_std_errors = std::move(truth.std_errors);
  eval.inst.mismatch = spec.mismatch;
  eval.inst.costs.reserve(centers.size());
  for (const Embedding& c : centers) {
    eval.inst.costs.push_back(world.field->TrueCost(c));
  }
  // Sample size behind the weights, for the comparator standard error.
  double se0 = 0.0;
  for (double s : eval.weight_std_errors) se0 = std::max(se0, s);
  if (se0 == 0.0) eval.weight_std_errors.clear();
  return eval;
}

Comparator ComputeComparator(const EvalInstance& eval, std::size_t k) {
  Comparator comp;
  const std::size_t m = eval.inst.size();
  if (BinomialCount(m, std::min(k, m)) <= kBruteForceGuard) {
    const OracleResult r = BruteForceOracle(eval.inst, k);
    comp.cache = r.cache;
    comp.loss = r.loss;
    comp.exact = true;
  } else {
    const GreedyResult r = ReverseGreedy(eval.inst, k);
    comp.cache = r.cache;
    comp.loss = r.loss;
  }
  if (!eval.weight_std_errors.empty()) {
    // Weights are multinomial frequencies; recover n from any nonzero cell
    // and use Var(L_hat) = (sum_i w_i a_i^2 - L^2) / n.
    double n = 0.0;
    for (std::size_t i = 0; i < m && n == 0.0; ++i) {
      const double w = eval.inst.weights[i];
      const double s = eval.weight_std_errors[i];
      if (s > 0.0) n = w * (1.0 - w) / (s * s);
    }
    std::vector<Embedding> cached;
    for (std::size_t j : comp.cache) cached.push_back(eval.inst.points[j]);
    double second = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double d = 0.0;
      NearestIndex(cached, eval.inst.points[i], &d);
      const double a = std::min(std::clamp(eval.inst.costs[i], 0.0, 1.0),
                                eval.inst.mismatch(d));
      second += eval.inst.weights[i] * a * a;
    }
    if (n > 0.0) {
      comp.std_error =
          std::sqrt(std::max(0.0, second - comp.loss * comp.loss) / n);
    }
  }
  return comp;
}

double ComputeSuboptimality(const DiscreteInstance& eval,
                            std::span<const Embedding> cache,
                            double comparator_loss, double alpha) {
  return LossOfCenters(eval, cache) - alpha * comparator_loss;
}

std::vector<double> ComputeRegretSeries(std::span<const double> round_losses,
                                        std::span<const double> payments,
                                        double comparator_loss, double alpha) {
  if (round_losses.size() != payments.size()) {
    throw ContractViolation("regret series: loss and payment lengths differ");
  }
  std::vector<double> cum(round_losses.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < round_losses.size(); ++t) {
    acc += round_losses[t] - alpha * comparator_loss + payments[t];
    cum[t] = acc;
  }
  return cum;
}

OfflineSeedResult RunOfflineSeed(const ExperimentSpec& spec, const World& world,
                                 const Cell& cell, std::uint64_t seed) {
  OfflineSeedResult res;
  res.seed = seed;
  const auto arrivals = GenerateArrivals(spec, world, seed, cell.n);
  res.arrival_checksum = ArrivalChecksum(Indices(arrivals));
  Rng log_rng = MakeRng(seed, "logging");
  const OfflineDataset data = LogDataset(arrivals, *world.field,
                                         spec.cost.noise, spec.logging, log_rng);

  // Synthetic: evaluate on the universe points, whose cells carry the
  // arrival mass. Trace: a static net over the pool at the cell's radius.
  std::vector<Embedding> eval_centers =
      spec.workload.kind == WorkloadKind::kSynthetic
          ? world.universe.points
          : BuildStaticNet(world.universe.points, cell.eps).centers();
  const EvalInstance eval = BuildEvalInstance(
      spec, world, eval_centers, spec.workload.synthetic.universe_seed);
  res.comparator = ComputeComparator(eval, cell.k);

  for (const std::string& learner : spec.learners) {
    if (learner != kOfflineLearner) continue;
    const auto start = Clock::now();
    Environment env = MakeEnvironment(spec, world, seed);
    OfflineConfig oc{cell.eps, cell.k, spec.kernel, spec.conf, spec.mismatch};
    const OfflineResult r = RunOffline(
        data, oc, [&env](const Embedding& x) { return env.QueryLlm(x); });
    OfflinePolicyMetrics m;
    m.policy = learner;
    m.runtime_ms = ElapsedMs(start);
    const auto centers = r.cache.Centers();
    m.loss = LossOfCenters(eval.inst, centers);
    m.gap = m.loss - spec.alpha * res.comparator.loss;
    m.cache_size = centers.size();
    m.net_size = r.net.size();
    m.build_cost = r.build_cost;
    res.policies.push_back(m);
  }
  for (BaselineKind kind : spec.baselines) {
    const auto start = Clock::now();
    BaselineConfig bc;
    bc.kind = kind;
    bc.eps = cell.eps;
    bc.k = cell.k;
    bc.epsilon_explore = spec.epsilon_explore;
    bc.recompute_period = spec.recompute_period;
    bc.serve_radius = spec.serve_radius;
    if (kind == BaselineKind::kDiscreteCucb) {
      bc.arms = DiscreteArms(spec, world, arrivals, cell.eps);
    }
    const auto centers = OfflineBaselineCache(bc, data, spec.mismatch);
    OfflinePolicyMetrics m;
    m.policy = BaselineName(kind);
    m.runtime_ms = ElapsedMs(start);
    m.loss = LossOfCenters(eval.inst, centers);
    m.gap = m.loss - spec.alpha * res.comparator.loss;
    m.cache_size = centers.size();
    res.policies.push_back(m);
  }
  return res;
}

OnlineSeedResult RunOnlineSeed(const ExperimentSpec& spec, const World& world,
                               const Cell& cell, std::uint64_t seed) {
  OnlineSeedResult res;
  res.seed = seed;
  const std::uint64_t horizon = cell.horizon;
  const auto arrivals = GenerateArrivals(spec, world, seed, horizon);
  res.arrival_checksum = ArrivalChecksum(Indices(arrivals));

  // The treatment's final net: the dynamic insertion rule over the arrival
  // sequence yields exactly the greedy static centers.
  const auto eval_centers = BuildStaticNet(Points(arrivals), cell.eps).centers();
  res.eval_net_size = eval_centers.size();
  const EvalInstance eval = BuildEvalInstance(spec, world, eval_centers, seed);
  res.comparator = ComputeComparator(eval, cell.k);

  const double delta = spec.delta_given ? spec.conf.delta : 1.0 / horizon;
  std::vector<std::unique_ptr<Policy>> policies;
  for (const std::string& learner : spec.learners) {
    ConfidenceSpec conf = spec.conf;
    conf.delta = delta;
    if (learner == kOnlineLearner) {
      OnlineConfig oc;
      oc.horizon = horizon;
      oc.eps = cell.eps;
      oc.k = cell.k;
      oc.kernel = spec.kernel;
      oc.conf = conf;
      policies.push_back(std::make_unique<OnlineLsLearner>(oc));
    } else if (learner == kFrozenLearner) {
      FrozenConfig fc;
      fc.horizon = horizon;
      fc.k = cell.k;
      fc.kernel = spec.kernel;
      fc.conf = conf;
      fc.lipschitz_g = spec.lipschitz_g;
      fc.pool_constant = spec.pool_constant;
      policies.push_back(std::make_unique<FrozenLearner>(fc));
    } else {
      throw ConfigError("unknown online learner '" + learner + "'");
    }
  }
  for (BaselineKind kind : spec.baselines) {
    BaselineConfig bc;
    bc.kind = kind;
    bc.eps = cell.eps;
    bc.k = cell.k;
    bc.horizon = horizon;
    bc.epsilon_explore = spec.epsilon_explore;
    bc.recompute_period = spec.recompute_period;
    bc.serve_radius = spec.serve_radius;
    bc.policy_seed = SubstreamSeed(seed, BaselineName(kind));
    if (kind == BaselineKind::kDiscreteCucb ||
        kind == BaselineKind::kDiscreteClcbLs) {
      bc.arms = DiscreteArms(spec, world, arrivals, cell.eps);
    }
    policies.push_back(MakeBaseline(bc));
  }

  for (std::size_t p = 0; p < policies.size(); ++p) {
    Policy& policy = *policies[p];
    Environment env = MakeEnvironment(spec, world, seed);
    std::vector<double> payments(horizon, 0.0);
    std::vector<std::size_t> snapshot_of_round(horizon);
    std::vector<std::vector<Embedding>> snapshots = {{}};
    OnlinePolicyMetrics m;
    m.policy = policy.name();
    const auto start = Clock::now();
    for (std::uint64_t t = 0; t < horizon; ++t) {
      const RoundOutcome out = policy.Step(arrivals[t].x, env);
      payments[t] = out.switch_payment;
      m.switch_payment += out.switch_payment;
      m.switches += out.switched;
      m.cache_changes += out.cache_changed;
      m.llm_calls += out.served_from == ServedFrom::kLlm;
      if (out.cache_changed) snapshots.push_back(policy.cache().Centers());
      snapshot_of_round[t] = snapshots.size() - 1;
      if (spec.emit_trace && p == 0) {
        res.trace.push_back(
            {{"t", t + 1},
             {"center", out.center == kOutside ? json(nullptr) : json(out.center)},
             {"action", out.served_from == ServedFrom::kLlm ? "llm" : "cache"},
             {"cost_component", out.realized_cost_component},
             {"switch", out.switched},
             {"payment", out.switch_payment}});
      }
    }
    m.runtime_ms = ElapsedMs(start);
    std::vector<double> snapshot_loss(snapshots.size());
    for (std::size_t s = 0; s < snapshots.size(); ++s) {
      snapshot_loss[s] = LossOfCenters(eval.inst, snapshots[s]);
    }
    std::vector<double> losses(horizon);
    for (std::uint64_t t = 0; t < horizon; ++t) {
      losses[t] = snapshot_loss[snapshot_of_round[t]];
    }
    m.cumulative_regret =
        ComputeRegretSeries(losses, payments, res.comparator.loss, spec.alpha);
    m.final_avg_regret = m.cumulative_regret.back() / horizon;
    m.diagnostics = policy.Diagnostics();
    if (m.diagnostics.contains("centers")) {
      m.centers = m.diagnostics["centers"].get<std::size_t>();
    } else if (m.diagnostics.contains("cells")) {
      m.centers = m.diagnostics["cells"].get<std::size_t>();
    } else if (m.diagnostics.contains("arms")) {
      m.centers = m.diagnostics["arms"].get<std::size_t>();
    } else if (m.diagnostics.contains("pool_size")) {
      m.centers = m.diagnostics["pool_size"].get<std::size_t>();
    }
    res.policies.push_back(std::move(m));
  }
  return res;
}

ExperimentOutcome RunExperiment(const ExperimentSpec& spec,
                                const std::filesystem::path& out_dir,
                                std::int64_t seed_offset) {
  if (spec.seeds.empty()) throw ConfigError("seed list is empty");
  std::filesystem::create_directories(out_dir);
  const World world = BuildWorld(spec);
  const std::vector<Cell> cells = ExpandGrid(spec);
  const bool offline = spec.setting == Setting::kOffline;

  ExperimentOutcome outcome;
  auto runs = OpenOut(out_dir / "runs.csv");
  auto runtime = OpenOut(out_dir / "runtime.csv");
  runtime << "cell,seed,policy,runtime_ms\n";
  std::ofstream series;
  std::ofstream trace;
  if (offline) {
    runs << "cell,eps,n,k,seed,policy,gap,loss,comparator_loss,"
            "comparator_se,comparator_exact,net_size,cache_size,build_cost\n";
  } else {
    runs << "cell,eps,k,T,seed,policy,final_avg_regret,regret_T,regret_half,"
            "switches,cache_changes,llm_fraction,switch_payment,centers,"
            "eval_net_size,comparator_loss,comparator_se\n";
    series = OpenOut(out_dir / "regret_series.csv");
    series << "cell,seed,policy,t,cumulative_regret,average_regret\n";
    if (spec.emit_trace) trace = OpenOut(out_dir / "trace.jsonl");
  }

  // (cell, policy) -> metric values in run order.
  std::map<std::pair<std::size_t, std::string>, std::vector<double>> agg;
  std::vector<std::pair<std::size_t, std::string>> agg_order;
  auto add_agg = [&](std::size_t cell, const std::string& policy, double v) {
    auto key = std::make_pair(cell, policy);
    if (!agg.count(key)) agg_order.push_back(key);
    agg[key].push_back(v);
  };
  json manifests = json::array();

  for (const Cell& cell : cells) {
    for (std::uint64_t base_seed : spec.seeds) {
      const auto seed = static_cast<std::uint64_t>(
          static_cast<std::int64_t>(base_seed) + seed_offset);
      const std::string cell_prefix = std::to_string(cell.index) + ",";
      try {
        if (offline) {
          const OfflineSeedResult r = RunOfflineSeed(spec, world, cell, seed);
          for (const auto& m : r.policies) {
            runs << cell.index << "," << FormatNumber(cell.eps) << "," << cell.n
                 << "," << cell.k << "," << seed << "," << m.policy << ","
                 << FormatNumber(m.gap) << "," << FormatNumber(m.loss) << ","
                 << FormatNumber(r.comparator.loss) << ","
                 << FormatNumber(r.comparator.std_error) << ","
                 << (r.comparator.exact ? 1 : 0) << "," << m.net_size << ","
                 << m.cache_size << "," << FormatNumber(m.build_cost) << "\n";
            runtime << cell_prefix << seed << "," << m.policy << ","
                    << FormatNumber(m.runtime_ms) << "\n";
            add_agg(cell.index, m.policy, m.gap);
            ++outcome.run_rows;
          }
          manifests.push_back({{"cell", cell.index},
                               {"seed", seed},
                               {"arrivals", cell.n},
                               {"arrival_checksum", r.arrival_checksum}});
        } else {
          const OnlineSeedResult r = RunOnlineSeed(spec, world, cell, seed);
          const std::uint64_t horizon = cell.horizon;
          for (const auto& m : r.policies) {
            const double half = m.cumulative_regret[horizon / 2 - 1];
            runs << cell.index << "," << FormatNumber(cell.eps) << "," << cell.k
                 << "," << horizon << "," << seed << "," << m.policy << ","
                 << FormatNumber(m.final_avg_regret) << ","
                 << FormatNumber(m.cumulative_regret.back()) << ","
                 << FormatNumber(half) << "," << m.switches << ","
                 << m.cache_changes << ","
                 << FormatNumber(static_cast<double>(m.llm_calls) / horizon)
                 << "," << FormatNumber(m.switch_payment) << "," << m.centers
                 << "," << r.eval_net_size << ","
                 << FormatNumber(r.comparator.loss) << ","
                 << FormatNumber(r.comparator.std_error) << "\n";
            runtime << cell_prefix << seed << "," << m.policy << ","
                    << FormatNumber(m.runtime_ms) << "\n";
            for (std::uint64_t t = spec.series_stride; t <= horizon;
                 t += spec.series_stride) {
              const double c = m.cumulative_regret[t - 1];
              series << cell.index << "," << seed << "," << m.policy << "," << t
                     << "," << FormatNumber(c) << "," << FormatNumber(c / t)
                     << "\n";
            }
            add_agg(cell.index, m.policy, m.final_avg_regret);
            ++outcome.run_rows;
          }
          for (const json& line : r.trace) {
            trace << json{{"cell", cell.index}, {"seed", seed}, {"round", line}}
                         .dump()
                  << "\n";
          }
          manifests.push_back({{"cell", cell.index},
                               {"seed", seed},
                               {"arrivals", horizon},
                               {"arrival_checksum", r.arrival_checksum}});
        }
      } catch (const std::exception& e) {
        const std::string msg = "cell " + std::to_string(cell.index) +
                                " seed " + std::to_string(seed) + ": " +
                                e.what();
        spdlog::error("run failed: {}", msg);
        outcome.failures.push_back(msg);
      }
    }
  }

  auto aggregates = OpenOut(out_dir / "aggregates.csv");
  aggregates << "cell,eps," << (offline ? "n" : "T")
             << ",k,policy,metric,runs,mean,std,std_error,min,max\n";
  json agg_json = json::array();
  for (const auto& key : agg_order) {
    const Cell& cell = cells[key.first];
    const Stats s = Summarize(agg[key]);
    const std::string metric = offline ? "gap" : "final_avg_regret";
    aggregates << cell.index << "," << FormatNumber(cell.eps) << ","
               << (offline ? cell.n : cell.horizon) << "," << cell.k << ","
               << key.second << "," << metric << "," << agg[key].size() << ","
               << FormatNumber(s.mean) << "," << FormatNumber(s.std) << ","
               << FormatNumber(s.se) << "," << FormatNumber(s.min) << ","
               << FormatNumber(s.max) << "\n";
    agg_json.push_back({{"cell", cell.index},
                        {"policy", key.second},
                        {"metric", metric},
                        {"runs", agg[key].size()},
                        {"mean", s.mean},
                        {"std_error", s.se}});
    ++outcome.aggregate_rows;
  }
  {
    auto summary = OpenOut(out_dir / "summary.json");
    summary << json{{"spec", spec.ToJson()},
                    {"cells", cells.size()},
                    {"run_rows", outcome.run_rows},
                    {"aggregates", agg_json},
                    {"failures", outcome.failures}}
                   .dump(2)
            << "\n";
  }
  {
    auto out = OpenOut(out_dir / "manifests.json");
    out << manifests.dump(2) << "\n";
  }
  return outcome;
}

}  // namespace semcache
