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

#include "semcache/workload.h"

#include <cmath>
#include <random>
#include <string>

#include "semcache/errors.h"

namespace semcache {

double DefaultJitterSigma(std::size_t dim) {
  return kJitterScale / std::sqrt(static_cast<double>(dim));
}

double SyntheticSpec::EffectiveJitter() const {
  return jitter_sigma < 0.0 ? DefaultJitterSigma(dim) : jitter_sigma;
}

std::uint32_t DrawTokenLength(const TokenLengthLaw& law, Rng& rng) {
  std::bernoulli_distribution first(law.mix);
  if (first(rng)) {
    return std::uniform_int_distribution<std::uint32_t>(law.lo1, law.hi1)(rng);
  }
  return std::uniform_int_distribution<std::uint32_t>(law.lo2, law.hi2)(rng);
}

Universe GenSyntheticUniverse(const SyntheticSpec& spec) {
  if (spec.universe_size == 0) throw ConfigError("universe size must be >= 1");
  if (spec.dim == 0) throw ConfigError("embedding dimension must be >= 1");
  const auto& law = spec.token_lengths;
  if (law.lo1 > law.hi1 || law.lo2 > law.hi2 || law.mix < 0.0 ||
      law.mix > 1.0) {
    throw ConfigError("malformed token length law");
  }
  Rng rng = MakeRng(spec.universe_seed, "universe");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Universe u;
  u.points.reserve(spec.universe_size);
  for (std::size_t i = 0; i < spec.universe_size; ++i) {
    std::vector<double> v(spec.dim);
    for (double& c : v) c = gauss(rng);
    u.points.push_back(Embedding::Normalized(std::move(v)));
  }
  Rng len_rng = MakeRng(spec.universe_seed, "token_lengths");
  for (std::size_t i = 0; i < spec.universe_size; ++i) {
    u.token_lengths.push_back(DrawTokenLength(law, len_rng));
  }
  u.source_tags.assign(spec.universe_size, 0);
  return u;
}

Query SampleSyntheticQuery(const Universe& universe, double sigma, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, universe.points.size() - 1);
  const std::size_t i = pick(rng);
  const Embedding& base = universe.points[i];
  if (sigma == 0.0) return {base, i, 0};
  std::normal_distribution<double> gauss(0.0, sigma);
  std::vector<double> v(base.coords().begin(), base.coords().end());
  for (double& c : v) c += gauss(rng);
  return {Embedding::Normalized(std::move(v)), i, 0};
}

SyntheticStream::SyntheticStream(const SyntheticSpec& spec,
                                 const Universe& universe)
    : universe_(&universe),
      sigma_(spec.EffectiveJitter()),
      rng_(MakeRng(spec.stream_seed, "arrivals")) {
  if (universe.points.empty()) throw ConfigError("empty universe");
  if (sigma_ < 0.0) throw ConfigError("jitter sigma must be >= 0");
}

Query SyntheticStream::Next() {
  return SampleSyntheticQuery(*universe_, sigma_, rng_);
}

std::vector<double> DrawPopularity(std::size_t pool_size, double mu,
                                   double sigma, std::uint64_t seed) {
  Rng rng = MakeRng(seed, "popularity");
  std::lognormal_distribution<double> law(mu, sigma);
  std::vector<double> p(pool_size);
  double total = 0.0;
  for (double& v : p) {
    v = law(rng);
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

TraceStream::TraceStream(const TraceSpec& spec)
    : burst_min_(spec.burst_min),
      burst_max_(spec.burst_max),
      rng_(MakeRng(spec.stream_seed, "trace_arrivals")) {
  if (spec.sources.empty()) throw ConfigError("trace needs at least one source");
  if (spec.burst_min == 0 || spec.burst_min > spec.burst_max) {
    throw ConfigError("burst length law must satisfy 1 <= min <= max");
  }
  for (std::size_t s = 0; s < spec.sources.size(); ++s) {
    const EmbeddingSet& pool = spec.sources[s].pool;
    if (pool.size() == 0) {
      throw ConfigError("trace source " + std::to_string(s) + " is empty");
    }
    if (!universe_.points.empty() && pool.dim() != universe_.points[0].dim()) {
      throw ConfigError("trace sources disagree on dimension");
    }
    offsets_.push_back(universe_.points.size());
    const auto p = DrawPopularity(pool.size(), spec.lognormal_mu,
                                  spec.lognormal_sigma,
                                  spec.sources[s].popularity_seed);
    pickers_.emplace_back(p.begin(), p.end());
    popularity_.insert(popularity_.end(), p.begin(), p.end());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      universe_.points.push_back(pool.embeddings[i]);
      universe_.token_lengths.push_back(pool.token_lengths[i]);
      universe_.source_tags.push_back(static_cast<std::uint32_t>(s));
    }
  }
}

void TraceStream::StartBurst() {
  burst_left_ =
      std::uniform_int_distribution<std::uint32_t>(burst_min_, burst_max_)(rng_);
}

Query TraceStream::Next() {
  if (!started_) {
    started_ = true;
    StartBurst();
  } else if (burst_left_ == 0) {
    source_ = static_cast<std::uint32_t>((source_ + 1) % offsets_.size());
    StartBurst();
  }
  --burst_left_;
  const std::size_t local = pickers_[source_](rng_);
  const std::size_t index = offsets_[source_] + local;
  return {universe_.points[index], index, source_};
}

ArrivalTruth SyntheticTrueWeights(std::span<const Embedding> centers,
                                  const Universe& universe, double sigma,
                                  std::size_t n_samples, Rng& rng) {
  ArrivalTruth truth;
  truth.weights.assign(centers.size(), 0.0);
  truth.std_errors.assign(centers.size(), 0.0);
  if (centers.empty()) return truth;
  const double m = static_cast<double>(universe.points.size());
  if (sigma == 0.0) {
    for (const Embedding& p : universe.points) {
      truth.weights[NearestIndex(centers, p, nullptr)] += 1.0 / m;
    }
    return truth;
  }
  if (n_samples == 0) throw ContractViolation("true weights need samples");
  std::vector<std::uint64_t> counts(centers.size(), 0);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Query q = SampleSyntheticQuery(universe, sigma, rng);
    counts[NearestIndex(centers, q.x, nullptr)] += 1;
  }
  const double n = static_cast<double>(n_samples);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double w = static_cast<double>(counts[i]) / n;
    truth.weights[i] = w;
    truth.std_errors[i] = std::sqrt(w * (1.0 - w) / n);
  }
  return truth;
}

ArrivalTruth TraceTrueWeights(std::span<const Embedding> centers,
                              const Universe& universe,
                              std::span<const double> popularity,
                              std::size_t source_count) {
  if (popularity.size() != universe.points.size() || source_count == 0) {
    throw ContractViolation("popularity does not match trace universe");
  }
  ArrivalTruth truth;
  truth.weights.assign(centers.size(), 0.0);
  truth.std_errors.assign(centers.size(), 0.0);
  if (centers.empty()) return truth;
  for (std::size_t i = 0; i < universe.points.size(); ++i) {
    truth.weights[NearestIndex(centers, universe.points[i], nullptr)] +=
        popularity[i] / static_cast<double>(source_count);
  }
  return truth;
}

std::uint64_t ArrivalChecksum(std::span<const std::size_t> indices) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t idx : indices) {
    for (int b = 0; b < 8; ++b) {
      h ^= (static_cast<std::uint64_t>(idx) >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

nlohmann::json SyntheticManifest(const SyntheticSpec& spec,
                                 std::span<const std::size_t> indices) {
  return {{"universe_size", spec.universe_size},
          {"dim", spec.dim},
          {"jitter_sigma", spec.EffectiveJitter()},
          {"universe_seed", spec.universe_seed},
          {"stream_seed", spec.stream_seed},
          {"arrivals", indices.size()},
          {"arrival_checksum", ArrivalChecksum(indices)}};
}

}  // namespace semcache
