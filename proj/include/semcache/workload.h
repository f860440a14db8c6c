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

#ifndef SEMCACHE_WORKLOAD_H_
#define SEMCACHE_WORKLOAD_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nlohmann/json.hpp"
#include "semcache/embedding_file.h"
#include "semcache/geometry.h"
#include "semcache/rng.h"

namespace semcache {

// Per-coordinate jitter is kJitterScale / sqrt(d_e). The constant was
// calibrated so that the median nearest-neighbor distance within a stream
// of 1000 queries over a 50-point universe is about 0.074 in normalized
// units, independent of d_e.
inline constexpr double kJitterScale = 0.136;
double DefaultJitterSigma(std::size_t dim);

struct TokenLengthLaw {
  std::uint32_t lo1 = 3;
  std::uint32_t hi1 = 15;
  std::uint32_t lo2 = 25;
  std::uint32_t hi2 = 40;
  double mix = 0.5;  // probability of the first range
};

struct SyntheticSpec {
  std::size_t universe_size = 50;
  std::size_t dim = 384;
  double jitter_sigma = -1.0;  // negative selects DefaultJitterSigma(dim)
  TokenLengthLaw token_lengths;
  std::uint64_t universe_seed = 1;
  std::uint64_t stream_seed = 1;

  double EffectiveJitter() const;
};

struct Universe {
  std::vector<Embedding> points;
  std::vector<std::uint32_t> token_lengths;
  std::vector<std::uint32_t> source_tags;
};

struct Query {
  Embedding x;
  std::size_t universe_index = 0;
  std::uint32_t source = 0;
};

Universe GenSyntheticUniverse(const SyntheticSpec& spec);
std::uint32_t DrawTokenLength(const TokenLengthLaw& law, Rng& rng);

// Uniform universe point plus N(0, sigma^2) per coordinate, renormalized.
Query SampleSyntheticQuery(const Universe& universe, double sigma, Rng& rng);

class SyntheticStream {
 public:
  SyntheticStream(const SyntheticSpec& spec, const Universe& universe);
  Query Next();

 private:
  const Universe* universe_;
  double sigma_;
  Rng rng_;
};

struct TraceSource {
  EmbeddingSet pool;
  std::uint64_t popularity_seed = 1;
};

struct TraceSpec {
  std::vector<TraceSource> sources;
  std::uint32_t burst_min = 20;
  std::uint32_t burst_max = 100;
  double lognormal_mu = 0.0;
  double lognormal_sigma = 1.0;
  std::uint64_t stream_seed = 1;
};

// Per-source popularity p_i = s_i / sum_j s_j with s_i ~ Lognormal(mu, sigma).
std::vector<double> DrawPopularity(std::size_t pool_size, double mu,
                                   double sigma, std::uint64_t seed);

// Bursty round-robin over sources; within a burst, queries are drawn with
// replacement from the active source by popularity. Universe indices refer
// to the concatenation of all source pools in order.
class TraceStream {
 public:
  explicit TraceStream(const TraceSpec& spec);

  Query Next();
  const Universe& universe() const { return universe_; }
  // Popularity over the concatenated universe, each source's block summing
  // to one.
  const std::vector<double>& popularity() const { return popularity_; }
  std::size_t source_count() const { return offsets_.size(); }
  std::uint32_t current_source() const { return source_; }

 private:
  void StartBurst();

  Universe universe_;
  std::vector<double> popularity_;
  std::vector<std::size_t> offsets_;
  std::vector<std::discrete_distribution<std::size_t>> pickers_;
  std::uint32_t burst_min_;
  std::uint32_t burst_max_;
  Rng rng_;
  std::uint32_t source_ = 0;
  std::uint32_t burst_left_ = 0;
  bool started_ = false;
};

struct ArrivalTruth {
  std::vector<double> weights;
  std::vector<double> std_errors;  // zero for exact modes
};

// Monte Carlo Voronoi weights of `centers` under the synthetic arrival law.
// With sigma = 0 the weights are exact.
ArrivalTruth SyntheticTrueWeights(std::span<const Embedding> centers,
                                  const Universe& universe, double sigma,
                                  std::size_t n_samples, Rng& rng);

// Exact: sum of popularity / source_count over pool points in each cell.
ArrivalTruth TraceTrueWeights(std::span<const Embedding> centers,
                              const Universe& universe,
                              std::span<const double> popularity,
                              std::size_t source_count);

// FNV-1a over the arrival index sequence; used to check pairing across
// policies and recorded in stream manifests.
std::uint64_t ArrivalChecksum(std::span<const std::size_t> indices);

nlohmann::json SyntheticManifest(const SyntheticSpec& spec,
                                 std::span<const std::size_t> indices);

}  // namespace semcache

#endif  // SEMCACHE_WORKLOAD_H_
