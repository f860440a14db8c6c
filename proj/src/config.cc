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

#include "semcache/config.h"

#include <algorithm>
#include <fstream>

#include "semcache/errors.h"

namespace semcache {
namespace {

using nlohmann::json;

template <typename T>
T Get(const json& obj, const std::string& key, T fallback,
      const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

const json& Section(const json& root, const std::string& key) {
  static const json kEmpty = json::object();
  if (!root.contains(key)) return kEmpty;
  const json& s = root.at(key);
  if (!s.is_object()) throw ConfigError("'" + key + "' must be an object");
  return s;
}

template <typename T>
std::vector<T> GetList(const json& obj, const std::string& key,
                       std::vector<T> fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  std::vector<T> out;
  try {
    if (v.is_array()) {
      out = v.get<std::vector<T>>();
    } else {
      out.push_back(v.get<T>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
  if (out.empty()) throw ConfigError(where + "." + key + " must be nonempty");
  return out;
}

void Require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void CheckKeys(const json& obj, const std::vector<std::string>& allowed,
               const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

json LoadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ExperimentSpec ParseExperimentSpec(const json& j) {
  CheckKeys(j,
            {"name", "setting", "workload", "cost", "mismatch", "kernel",
             "confidence", "learners", "baselines", "baseline", "frozen",
             "logging", "grid", "seeds", "alpha", "truth_samples",
             "emit_trace", "series_stride"},
            "config");
  ExperimentSpec spec;
  spec.name = Get<std::string>(j, "name", spec.name, "config");
  const auto setting = Get<std::string>(j, "setting", "online", "config");
  if (setting == "offline") {
    spec.setting = Setting::kOffline;
  } else if (setting == "online") {
    spec.setting = Setting::kOnline;
  } else {
    throw ConfigError("setting must be 'offline' or 'online'");
  }

  const json& w = Section(j, "workload");
  CheckKeys(w,
            {"kind", "universe_size", "dim", "jitter_sigma", "token_lengths",
             "universe_seed", "sources", "burst_min", "burst_max", "warmup"},
            "workload");
  const auto kind = Get<std::string>(w, "kind", "synthetic", "workload");
  auto& syn = spec.workload.synthetic;
  if (kind == "synthetic") {
    spec.workload.kind = WorkloadKind::kSynthetic;
  } else if (kind == "trace") {
    spec.workload.kind = WorkloadKind::kTrace;
  } else {
    throw ConfigError("workload.kind must be 'synthetic' or 'trace'");
  }
  syn.universe_size =
      Get<std::size_t>(w, "universe_size", syn.universe_size, "workload");
  syn.dim = Get<std::size_t>(w, "dim", syn.dim, "workload");
  syn.jitter_sigma = Get<double>(w, "jitter_sigma", syn.jitter_sigma, "workload");
  syn.universe_seed =
      Get<std::uint64_t>(w, "universe_seed", syn.universe_seed, "workload");
  if (w.contains("token_lengths")) {
    const json& t = w.at("token_lengths");
    CheckKeys(t, {"lo1", "hi1", "lo2", "hi2", "mix"}, "workload.token_lengths");
    auto& law = syn.token_lengths;
    law.lo1 = Get<std::uint32_t>(t, "lo1", law.lo1, "token_lengths");
    law.hi1 = Get<std::uint32_t>(t, "hi1", law.hi1, "token_lengths");
    law.lo2 = Get<std::uint32_t>(t, "lo2", law.lo2, "token_lengths");
    law.hi2 = Get<std::uint32_t>(t, "hi2", law.hi2, "token_lengths");
    law.mix = Get<double>(t, "mix", law.mix, "token_lengths");
  }
  spec.workload.burst_min =
      Get<std::uint32_t>(w, "burst_min", spec.workload.burst_min, "workload");
  spec.workload.burst_max =
      Get<std::uint32_t>(w, "burst_max", spec.workload.burst_max, "workload");
  spec.workload.warmup =
      Get<std::size_t>(w, "warmup", spec.workload.warmup, "workload");
  if (w.contains("sources")) {
    Require(w.at("sources").is_array(), "workload.sources must be an array");
    for (const json& s : w.at("sources")) {
      CheckKeys(s, {"path", "popularity_seed"}, "workload.sources[]");
      TraceSourceSpec src;
      src.path = Get<std::string>(s, "path", "", "workload.sources[]");
      src.popularity_seed =
          Get<std::uint64_t>(s, "popularity_seed", 1, "workload.sources[]");
      Require(!src.path.empty(), "trace source needs a path");
      spec.workload.trace_sources.push_back(src);
    }
  }
  if (spec.workload.kind == WorkloadKind::kTrace) {
    Require(!spec.workload.trace_sources.empty(),
            "trace workload needs at least one source");
    Require(spec.workload.burst_min >= 1 &&
                spec.workload.burst_min <= spec.workload.burst_max,
            "burst law must satisfy 1 <= burst_min <= burst_max");
  }
  Require(syn.universe_size >= 1 && syn.dim >= 1,
          "universe_size and dim must be >= 1");

  const json& c = Section(j, "cost");
  CheckKeys(c,
            {"mode", "c_min", "noise_r", "clip", "rkhs_anchors",
             "rkhs_length_scale", "rkhs_seed"},
            "cost");
  const auto mode = Get<std::string>(c, "mode", "token_length", "cost");
  if (mode == "token_length") {
    spec.cost.mode = CostMode::kTokenLength;
  } else if (mode == "synthetic_rkhs") {
    spec.cost.mode = CostMode::kSyntheticRkhs;
  } else {
    throw ConfigError("cost.mode must be 'token_length' or 'synthetic_rkhs'");
  }
  spec.cost.c_min = Get<double>(c, "c_min", spec.cost.c_min, "cost");
  spec.cost.noise.r = Get<double>(c, "noise_r", spec.cost.noise.r, "cost");
  spec.cost.noise.clip = Get<bool>(c, "clip", spec.cost.noise.clip, "cost");
  spec.cost.rkhs_anchors =
      Get<std::size_t>(c, "rkhs_anchors", spec.cost.rkhs_anchors, "cost");
  spec.cost.rkhs_length_scale = Get<double>(
      c, "rkhs_length_scale", spec.cost.rkhs_length_scale, "cost");
  spec.cost.rkhs_seed =
      Get<std::uint64_t>(c, "rkhs_seed", spec.cost.rkhs_seed, "cost");
  Require(spec.cost.c_min > 0.0 && spec.cost.c_min <= 1.0,
          "cost.c_min must lie in (0, 1]");
  Require(spec.cost.noise.r >= 0.0, "cost.noise_r must be >= 0");

  const json& mm = Section(j, "mismatch");
  CheckKeys(mm, {"zeta"}, "mismatch");
  spec.mismatch.zeta = Get<double>(mm, "zeta", spec.mismatch.zeta, "mismatch");
  Require(spec.mismatch.zeta > 0.0, "mismatch.zeta must be > 0");

  const json& kr = Section(j, "kernel");
  CheckKeys(kr, {"length_scale", "lambda"}, "kernel");
  spec.kernel.length_scale =
      Get<double>(kr, "length_scale", spec.kernel.length_scale, "kernel");
  spec.kernel.ridge_lambda =
      Get<double>(kr, "lambda", spec.kernel.ridge_lambda, "kernel");
  Require(spec.kernel.length_scale > 0.0 && spec.kernel.ridge_lambda > 0.0,
          "kernel length_scale and lambda must be > 0");

  const json& cf = Section(j, "confidence");
  CheckKeys(cf, {"B", "R", "delta"}, "confidence");
  spec.conf.rkhs_bound = Get<double>(cf, "B", spec.conf.rkhs_bound, "confidence");
  spec.conf.noise_r = Get<double>(cf, "R", spec.conf.noise_r, "confidence");
  spec.delta_given = cf.contains("delta");
  spec.conf.delta = Get<double>(cf, "delta", spec.conf.delta, "confidence");
  Require(spec.conf.rkhs_bound > 0.0 && spec.conf.noise_r >= 0.0,
          "confidence B must be > 0 and R >= 0");
  Require(spec.conf.delta > 0.0 && spec.conf.delta < 1.0,
          "confidence.delta must lie in (0, 1)");

  const std::string default_learner =
      spec.setting == Setting::kOffline ? kOfflineLearner : kOnlineLearner;
  spec.learners = GetList<std::string>(j, "learners", {default_learner}, "config");
  for (const std::string& l : spec.learners) {
    if (spec.setting == Setting::kOffline) {
      Require(l == kOfflineLearner, "unknown offline learner '" + l + "'");
    } else {
      Require(l == kOnlineLearner || l == kFrozenLearner,
              "unknown online learner '" + l + "'");
    }
  }
  if (j.contains("baselines")) {
    for (const auto& name : GetList<std::string>(j, "baselines", {}, "config")) {
      const BaselineKind kind = ParseBaselineKind(name);
      Require(spec.setting == Setting::kOnline ||
                  kind == BaselineKind::kLfu || kind == BaselineKind::kGreedy ||
                  kind == BaselineKind::kDiscreteCucb,
              "baseline '" + name + "' has no offline form");
      spec.baselines.push_back(kind);
    }
  }
  const json& b = Section(j, "baseline");
  CheckKeys(b, {"epsilon_explore", "recompute_period", "serve_radius"},
            "baseline");
  spec.epsilon_explore =
      Get<double>(b, "epsilon_explore", spec.epsilon_explore, "baseline");
  spec.recompute_period = Get<std::uint64_t>(b, "recompute_period",
                                             spec.recompute_period, "baseline");
  spec.serve_radius = Get<double>(b, "serve_radius", spec.serve_radius, "baseline");
  Require(spec.epsilon_explore >= 0.0 && spec.epsilon_explore <= 1.0,
          "baseline.epsilon_explore must lie in [0, 1]");
  Require(spec.recompute_period >= 1, "baseline.recompute_period must be >= 1");

  const json& fz = Section(j, "frozen");
  CheckKeys(fz, {"lipschitz_g", "pool_constant"}, "frozen");
  spec.lipschitz_g = Get<double>(fz, "lipschitz_g", spec.lipschitz_g, "frozen");
  spec.pool_constant =
      Get<double>(fz, "pool_constant", spec.pool_constant, "frozen");
  Require(spec.lipschitz_g > 0.0 && spec.pool_constant > 0.0,
          "frozen constants must be > 0");

  const json& lg = Section(j, "logging");
  CheckKeys(lg, {"nu"}, "logging");
  spec.logging.nu = Get<double>(lg, "nu", spec.logging.nu, "logging");
  Require(spec.logging.nu >= 0.0 && spec.logging.nu <= 1.0,
          "logging.nu must lie in [0, 1]");

  const json& g = Section(j, "grid");
  CheckKeys(g, {"eps", "n", "k", "T"}, "grid");
  spec.grid_eps = GetList<double>(g, "eps", spec.grid_eps, "grid");
  spec.grid_n = GetList<std::uint64_t>(g, "n", spec.grid_n, "grid");
  spec.grid_k = GetList<std::size_t>(g, "k", spec.grid_k, "grid");
  spec.grid_t = GetList<std::uint64_t>(g, "T", spec.grid_t, "grid");
  for (double e : spec.grid_eps) {
    Require(e > 0.0 && e <= 1.0, "grid.eps values must lie in (0, 1]");
  }
  for (auto n : spec.grid_n) Require(n >= 1, "grid.n values must be >= 1");
  for (auto t : spec.grid_t) Require(t >= 2, "grid.T values must be >= 2");

  if (!j.contains("seeds")) throw ConfigError("config needs a 'seeds' list");
  if (!j.at("seeds").is_array()) throw ConfigError("'seeds' must be an array");
  try {
    spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("seeds: ") + e.what());
  }
  Require(!spec.seeds.empty(), "seed list is empty");

  spec.alpha = Get<double>(j, "alpha", spec.alpha, "config");
  Require(spec.alpha >= 1.0, "alpha must be >= 1");
  spec.truth_samples =
      Get<std::size_t>(j, "truth_samples", spec.truth_samples, "config");
  Require(spec.truth_samples >= 1, "truth_samples must be >= 1");
  spec.emit_trace = Get<bool>(j, "emit_trace", spec.emit_trace, "config");
  spec.series_stride =
      Get<std::size_t>(j, "series_stride", spec.series_stride, "config");
  Require(spec.series_stride >= 1, "series_stride must be >= 1");
  return spec;
}

ExperimentSpec LoadExperimentSpec(const std::filesystem::path& path) {
  ExperimentSpec spec = ParseExperimentSpec(LoadJsonFile(path));
  // Relative trace paths are taken from the config's directory.
  for (TraceSourceSpec& src : spec.workload.trace_sources) {
    if (src.path.is_relative()) src.path = path.parent_path() / src.path;
  }
  return spec;
}

std::vector<Cell> ExpandGrid(const ExperimentSpec& spec) {
  const bool offline = spec.setting == Setting::kOffline;
  const std::vector<std::uint64_t> ns =
      offline ? spec.grid_n : std::vector<std::uint64_t>{0};
  const std::vector<std::uint64_t> ts =
      offline ? std::vector<std::uint64_t>{0} : spec.grid_t;
  std::vector<Cell> cells;
  for (double eps : spec.grid_eps) {
    for (std::uint64_t n : ns) {
      for (std::size_t k : spec.grid_k) {
        for (std::uint64_t t : ts) {
          cells.push_back({cells.size(), eps, n, k, t});
        }
      }
    }
  }
  return cells;
}

nlohmann::json ExperimentSpec::ToJson() const {
  json baselines_json = json::array();
  for (BaselineKind b : baselines) baselines_json.push_back(BaselineName(b));
  json sources = json::array();
  for (const auto& s : workload.trace_sources) {
    sources.push_back({{"path", s.path.string()},
                       {"popularity_seed", s.popularity_seed}});
  }
  const auto& syn = workload.synthetic;
  return {
      {"name", name},
      {"setting", setting == Setting::kOffline ? "offline" : "online"},
      {"workload",
       {{"kind", workload.kind == WorkloadKind::kSynthetic ? "synthetic" : "trace"},
        {"universe_size", syn.universe_size},
        {"dim", syn.dim},
        {"jitter_sigma", syn.EffectiveJitter()},
        {"universe_seed", syn.universe_seed},
        {"token_lengths",
         {{"lo1", syn.token_lengths.lo1},
          {"hi1", syn.token_lengths.hi1},
          {"lo2", syn.token_lengths.lo2},
          {"hi2", syn.token_lengths.hi2},
          {"mix", syn.token_lengths.mix}}},
        {"sources", sources},
        {"burst_min", workload.burst_min},
        {"burst_max", workload.burst_max},
        {"warmup", workload.warmup}}},
      {"cost",
       {{"mode", cost.mode == CostMode::kTokenLength ? "token_length"
                                                     : "synthetic_rkhs"},
        {"c_min", cost.c_min},
        {"noise_r", cost.noise.r},
        {"clip", cost.noise.clip},
        {"rkhs_anchors", cost.rkhs_anchors},
        {"rkhs_length_scale", cost.rkhs_length_scale},
        {"rkhs_seed", cost.rkhs_seed}}},
      {"mismatch", {{"zeta", mismatch.zeta}}},
      {"kernel", {{"length_scale", kernel.length_scale},
                  {"lambda", kernel.ridge_lambda}}},
      {"confidence", {{"B", conf.rkhs_bound},
                      {"R", conf.noise_r},
                      {"delta", delta_given ? json(conf.delta) : json("1/T")}}},
      {"learners", learners},
      {"baselines", baselines_json},
      {"baseline", {{"epsilon_explore", epsilon_explore},
                    {"recompute_period", recompute_period},
                    {"serve_radius", serve_radius}}},
      {"frozen", {{"lipschitz_g", lipschitz_g}, {"pool_constant", pool_constant}}},
      {"logging", {{"nu", logging.nu}}},
      {"grid", {{"eps", grid_eps}, {"n", grid_n}, {"k", grid_k}, {"T", grid_t}}},
      {"seeds", seeds},
      {"alpha", alpha},
      {"truth_samples", truth_samples},
      {"emit_trace", emit_trace},
      {"series_stride", series_stride}};
}

}  // namespace semcache
