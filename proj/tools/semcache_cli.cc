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

// Command-line driver for experiments and diagnostics.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "semcache/config.h"
#include "semcache/embedding_file.h"
#include "semcache/errors.h"
#include "semcache/geometry.h"
#include "semcache/harness.h"
#include "spdlog/spdlog.h"

namespace {

using nlohmann::json;
using namespace semcache;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;

struct CommonArgs {
  std::string config;
  std::string out = "out";
  std::int64_t seed_offset = 0;
};

void AddCommon(CLI::App* cmd, CommonArgs* args, bool config_required) {
  auto* opt = cmd->add_option("--config", args->config, "JSON config file");
  if (config_required) opt->required();
  cmd->add_option("--out", args->out, "output directory");
  cmd->add_option("--seed-offset", args->seed_offset,
                  "added to every configured seed");
}

std::ofstream Open(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

int RunExperimentCommand(const CommonArgs& args, Setting want) {
  const ExperimentSpec spec = LoadExperimentSpec(args.config);
  if (spec.setting != want) {
    throw ConfigError(std::string("config setting must be '") +
                      (want == Setting::kOffline ? "offline" : "online") + "'");
  }
  const ExperimentOutcome outcome =
      RunExperiment(spec, args.out, args.seed_offset);
  std::cout << "wrote " << outcome.run_rows << " run rows and "
            << outcome.aggregate_rows << " aggregate rows to " << args.out
            << "\n";
  if (!outcome.failures.empty()) {
    std::cerr << outcome.failures.size() << " run(s) failed\n";
    return kExitRun;
  }
  return kExitOk;
}

std::size_t StreamLength(const ExperimentSpec& spec) {
  return spec.setting == Setting::kOffline ? spec.grid_n.front()
                                           : spec.grid_t.front();
}

int WorkloadGen(const CommonArgs& args) {
  const ExperimentSpec spec = LoadExperimentSpec(args.config);
  const World world = BuildWorld(spec);
  const std::filesystem::path out_dir(args.out);
  std::filesystem::create_directories(out_dir);

  EmbeddingSet set;
  set.embeddings = world.universe.points;
  set.token_lengths = world.universe.token_lengths;
  set.source_tags = world.universe.source_tags;
  WriteEmbeddingBinary(out_dir / "universe.semc", set);

  const std::size_t count = StreamLength(spec);
  json manifest = json::array();
  auto stream = Open(out_dir / "stream.csv");
  stream << "seed,t,universe_index,source\n";
  for (std::uint64_t base : spec.seeds) {
    const auto seed =
        static_cast<std::uint64_t>(static_cast<std::int64_t>(base) + args.seed_offset);
    const auto arrivals = GenerateArrivals(spec, world, seed, count);
    std::vector<std::size_t> idx;
    for (std::size_t t = 0; t < arrivals.size(); ++t) {
      stream << seed << "," << t + 1 << "," << arrivals[t].universe_index << ","
             << arrivals[t].source << "\n";
      idx.push_back(arrivals[t].universe_index);
    }
    json entry;
    if (spec.workload.kind == WorkloadKind::kSynthetic) {
      SyntheticSpec syn = spec.workload.synthetic;
      syn.stream_seed = seed;
      entry = SyntheticManifest(syn, idx);
    } else {
      entry = {{"kind", "trace"},
               {"stream_seed", seed},
               {"universe_size", world.universe.points.size()},
               {"sources", world.source_count},
               {"arrival_checksum", ArrivalChecksum(idx)}};
    }
    entry["arrivals"] = count;
    manifest.push_back(entry);
  }
  Open(out_dir / "manifest.json") << manifest.dump(2) << "\n";
  std::cout << "wrote universe of " << set.size() << " and "
            << spec.seeds.size() << " stream(s) of " << count << " to "
            << args.out << "\n";
  return kExitOk;
}

json QuantilesJson(const QuantileList& q) {
  json out = json::array();
  for (const auto& [p, v] : q) out.push_back({{"q", p}, {"value", v}});
  return out;
}

int DiagnoseDistances(const CommonArgs& args) {
  const ExperimentSpec spec = LoadExperimentSpec(args.config);
  const World world = BuildWorld(spec);
  const std::filesystem::path out_dir(args.out);
  std::filesystem::create_directories(out_dir);
  const auto seed = static_cast<std::uint64_t>(
      static_cast<std::int64_t>(spec.seeds.front()) + args.seed_offset);
  const auto arrivals = GenerateArrivals(spec, world, seed, StreamLength(spec));
  std::vector<Embedding> points;
  for (const Query& q : arrivals) points.push_back(q.x);
  const DistanceStats stats = DistanceDiagnostics(points, world.universe.points);

  json out = {{"seed", seed},
              {"queries", points.size()},
              {"universe_size", world.universe.points.size()},
              {"pairwise", QuantilesJson(stats.pairwise)},
              {"nearest_neighbor", QuantilesJson(stats.nearest_neighbor)},
              {"to_universe", QuantilesJson(stats.to_universe)}};
  Open(out_dir / "distances.json") << out.dump(2) << "\n";
  auto csv = Open(out_dir / "distances.csv");
  csv << "distribution,quantile,value\n";
  const std::pair<const char*, const QuantileList*> lists[] = {
      {"pairwise", &stats.pairwise},
      {"nearest_neighbor", &stats.nearest_neighbor},
      {"to_universe", &stats.to_universe}};
  for (const auto& [name, q] : lists) {
    for (const auto& [p, v] : *q) {
      csv << name << "," << FormatNumber(p) << "," << FormatNumber(v) << "\n";
    }
  }
  std::cout << "median nearest-neighbor distance "
            << (stats.nearest_neighbor.empty()
                    ? std::string("n/a")
                    : FormatNumber(stats.nearest_neighbor[2].second))
            << "\n";
  return kExitOk;
}

int OracleCheck(const CommonArgs& args) {
  OracleCheckSpec spec;
  if (!args.config.empty()) {
    const json j = LoadJsonFile(args.config);
    CheckKeys(j, {"instances", "max_points", "max_k", "dim", "seed"}, "config");
    try {
      spec.instances = j.value("instances", spec.instances);
      spec.max_points = j.value("max_points", spec.max_points);
      spec.max_k = j.value("max_k", spec.max_k);
      spec.dim = j.value("dim", spec.dim);
      spec.seed = j.value("seed", spec.seed);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("oracle-check config: ") + e.what());
    }
  }
  spec.seed = static_cast<std::uint64_t>(static_cast<std::int64_t>(spec.seed) +
                                         args.seed_offset);
  const auto rows = RunOracleCheck(spec);
  const std::filesystem::path out_dir(args.out);
  std::filesystem::create_directories(out_dir);
  auto csv = Open(out_dir / "oracle_ratios.csv");
  csv << "instance,m,k,greedy_loss,optimal_loss,ratio\n";
  std::size_t within = 0;
  for (const auto& r : rows) {
    csv << r.index << "," << r.m << "," << r.k << ","
        << FormatNumber(r.greedy_loss) << "," << FormatNumber(r.optimal_loss)
        << "," << FormatNumber(r.ratio) << "\n";
    within += r.ratio <= 1.05;
  }
  std::cout << within << "/" << rows.size()
            << " instances within ratio 1.05 of the optimum\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic cache learners and experiment harness"};
  app.require_subcommand(1);
  CommonArgs args;
  auto* offline = app.add_subcommand("offline-ablation", "run an offline grid");
  auto* online = app.add_subcommand("online-run", "run an online grid");
  auto* gen = app.add_subcommand("workload-gen", "write universe and streams");
  auto* diag =
      app.add_subcommand("diagnose-distances", "distance quantiles of a stream");
  auto* oracle = app.add_subcommand(
      "oracle-check", "reverse greedy against brute force on random instances");
  for (auto* cmd : {offline, online, gen, diag}) AddCommon(cmd, &args, true);
  AddCommon(oracle, &args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*offline) return RunExperimentCommand(args, Setting::kOffline);
    if (*online) return RunExperimentCommand(args, Setting::kOnline);
    if (*gen) return WorkloadGen(args);
    if (*diag) return DiagnoseDistances(args);
    if (*oracle) return OracleCheck(args);
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("run failed: {}", e.what());
    return kExitRun;
  }
  return kExitConfig;
}
