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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtest/gtest.h"
#include "semcache/errors.h"
#include "test_util.h"

namespace semcache {
namespace {

using testing::RandomUnits;

double MedianNearestNeighbor(const std::vector<Embedding>& pts) {
  std::vector<double> nn;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i != j) best = std::min(best, NormalizedDistance(pts[i], pts[j]));
    }
    nn.push_back(best);
  }
  std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
  return nn[nn.size() / 2];
}

TEST(Synthetic, JitterDefault) {
  EXPECT_DOUBLE_EQ(DefaultJitterSigma(384), 0.136 / std::sqrt(384.0));
  SyntheticSpec s;
  s.dim = 32;
  EXPECT_DOUBLE_EQ(s.EffectiveJitter(), 0.136 / std::sqrt(32.0));
  s.jitter_sigma = 0.0;
  EXPECT_EQ(s.EffectiveJitter(), 0.0);
}

TEST(Synthetic, UniverseDeterministicAndValid) {
  SyntheticSpec s;
  s.dim = 16;
  s.universe_seed = 3;
  const Universe a = GenSyntheticUniverse(s);
  const Universe b = GenSyntheticUniverse(s);
  ASSERT_EQ(a.points.size(), 50u);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.token_lengths, b.token_lengths);
  for (const auto& p : a.points) EXPECT_NEAR(p.Norm(), 1.0, 1e-12);
  for (auto len : a.token_lengths) {
    EXPECT_TRUE((len >= 3 && len <= 15) || (len >= 25 && len <= 40)) << len;
  }
  s.universe_seed = 4;
  EXPECT_NE(GenSyntheticUniverse(s).points, a.points);
  s.universe_size = 0;
  EXPECT_THROW(GenSyntheticUniverse(s), ConfigError);
}

TEST(Synthetic, TokenLengthMixture) {
  Rng rng(8);
  TokenLengthLaw law;
  int short_count = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) short_count += DrawTokenLength(law, rng) <= 15;
  EXPECT_NEAR(short_count / double(n), 0.5, 4 * std::sqrt(0.25 / n));
}

// The jitter constant targets a median within-stream nearest-neighbor
// distance near 0.074 regardless of dimension.
TEST(Synthetic, JitterCalibration) {
  for (std::size_t dim : {32u, 384u}) {
    SyntheticSpec s;
    s.dim = dim;
    const Universe u = GenSyntheticUniverse(s);
    SyntheticStream stream(s, u);
    std::vector<Embedding> pts;
    for (int t = 0; t < 1000; ++t) pts.push_back(stream.Next().x);
    const double med = MedianNearestNeighbor(pts);
    EXPECT_GE(med, 0.05) << dim;
    EXPECT_LE(med, 0.10) << dim;
  }
}

TEST(Synthetic, UniformOverUniverse) {
  SyntheticSpec s;
  s.dim = 8;
  const Universe u = GenSyntheticUniverse(s);
  SyntheticStream stream(s, u);
  const int n = 20000;
  std::vector<int> counts(50, 0);
  for (int t = 0; t < n; ++t) counts[stream.Next().universe_index]++;
  double chi2 = 0;
  const double e = n / 50.0;
  for (int c : counts) chi2 += (c - e) * (c - e) / e;
  EXPECT_LT(chi2, 85.35);  // chi-square(49) upper 0.001 point
}

TEST(Synthetic, ZeroJitterWeightsExact) {
  SyntheticSpec s;
  s.dim = 8;
  s.universe_size = 10;
  const Universe u = GenSyntheticUniverse(s);
  Rng rng(1);
  const ArrivalTruth t = SyntheticTrueWeights(u.points, u, 0.0, 1000, rng);
  for (double w : t.weights) EXPECT_DOUBLE_EQ(w, 0.1);
  for (double se : t.std_errors) EXPECT_EQ(se, 0.0);
  const ArrivalTruth mc = SyntheticTrueWeights(u.points, u, 0.02, 5000, rng);
  EXPECT_NEAR(std::accumulate(mc.weights.begin(), mc.weights.end(), 0.0), 1.0,
              1e-12);
}

TraceSpec TwoSourceTrace(Rng& rng) {
  TraceSpec spec;
  for (int s = 0; s < 2; ++s) {
    EmbeddingSet pool;
    pool.embeddings = RandomUnits(30 + 10 * s, 8, rng);
    pool.token_lengths.assign(pool.embeddings.size(), 10 + s);
    spec.sources.push_back({pool, static_cast<std::uint64_t>(s + 1)});
  }
  spec.stream_seed = 5;
  return spec;
}

TEST(Trace, BurstsRoundRobin) {
  Rng rng(2);
  TraceStream stream(TwoSourceTrace(rng));
  EXPECT_EQ(stream.universe().points.size(), 70u);
  EXPECT_EQ(stream.source_count(), 2u);
  std::vector<std::pair<std::uint32_t, int>> runs;
  for (int t = 0; t < 5000; ++t) {
    const Query q = stream.Next();
    const std::size_t lo = q.source == 0 ? 0 : 30;
    const std::size_t hi = q.source == 0 ? 30 : 70;
    ASSERT_GE(q.universe_index, lo);
    ASSERT_LT(q.universe_index, hi);
    ASSERT_EQ(stream.universe().points[q.universe_index], q.x);
    if (runs.empty() || runs.back().first != q.source) {
      runs.push_back({q.source, 0});
    }
    runs.back().second++;
  }
  ASSERT_GT(runs.size(), 10u);
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    EXPECT_GE(runs[i].second, 20);
    EXPECT_LE(runs[i].second, 100);
    EXPECT_NE(runs[i].first, runs[i + 1].first);
  }
}

TEST(Trace, PopularityAndTruth) {
  const auto p = DrawPopularity(100, 0.0, 1.0, 9);
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  EXPECT_EQ(p, DrawPopularity(100, 0.0, 1.0, 9));
  Rng rng(2);
  TraceStream stream(TwoSourceTrace(rng));
  const auto& pop = stream.popularity();
  EXPECT_NEAR(std::accumulate(pop.begin(), pop.begin() + 30, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(std::accumulate(pop.begin() + 30, pop.end(), 0.0), 1.0, 1e-12);
  const ArrivalTruth t = TraceTrueWeights(stream.universe().points,
                                          stream.universe(), pop, 2);
  EXPECT_NEAR(std::accumulate(t.weights.begin(), t.weights.end(), 0.0), 1.0,
              1e-12);
  EXPECT_NEAR(t.weights[0], pop[0] / 2, 1e-15);
}

TEST(Checksum, FnvOverIndexBytes) {
  EXPECT_EQ(ArrivalChecksum({}), 0xcbf29ce484222325ULL);
  // Independent FNV-1a over the little-endian bytes of {1, 2}.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint64_t v : {1ULL, 2ULL}) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  const std::vector<std::size_t> idx = {1, 2};
  EXPECT_EQ(ArrivalChecksum(idx), h);
  const auto m = SyntheticManifest(SyntheticSpec{}, idx);
  EXPECT_EQ(m.at("arrival_checksum").get<std::uint64_t>(), h);
}

TEST(Rng, SubstreamsDiffer) {
  EXPECT_NE(SubstreamSeed(1, "a"), SubstreamSeed(1, "b"));
  EXPECT_NE(SubstreamSeed(1, "a"), SubstreamSeed(2, "a"));
  EXPECT_EQ(SubstreamSeed(7, "costs"), SubstreamSeed(7, "costs"));
}

}  // namespace
}  // namespace semcache
