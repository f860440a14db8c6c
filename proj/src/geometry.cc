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

#include "semcache/geometry.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "semcache/errors.h"

namespace semcache {

Embedding Embedding::Normalized(std::vector<double> coords) {
  if (coords.empty()) throw ConfigError("embedding has zero dimension");
  double sq = 0.0;
  for (double v : coords) sq += v * v;
  if (!(sq > 0.0) || !std::isfinite(sq)) {
    throw ConfigError("cannot normalize a zero or non-finite embedding");
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : coords) v *= inv;
  return Embedding(std::move(coords));
}

double Embedding::Norm() const {
  double sq = 0.0;
  for (double v : coords_) sq += v * v;
  return std::sqrt(sq);
}

double SquaredEuclidean(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw ConfigError("embedding dimension mismatch: " +
                      std::to_string(a.dim()) + " vs " +
                      std::to_string(b.dim()));
  }
  const auto x = a.coords();
  const auto y = b.coords();
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sq += d * d;
  }
  return sq;
}

double NormalizedDistance(const Embedding& a, const Embedding& b) {
  return 0.5 * std::sqrt(SquaredEuclidean(a, b));
}

std::size_t NearestIndex(std::span<const Embedding> centers,
                         const Embedding& x, double* distance) {
  std::size_t best = kOutside;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double sq = SquaredEuclidean(centers[i], x);
    if (sq < best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  if (distance != nullptr) {
    *distance = best == kOutside ? std::numeric_limits<double>::infinity()
                                 : 0.5 * std::sqrt(best_sq);
  }
  return best;
}

EpsilonNet::EpsilonNet(double radius) : radius_(radius) {
  if (!(radius > 0.0 && radius <= 1.0)) {
    throw ConfigError("net radius must lie in (0, 1], got " +
                      std::to_string(radius));
  }
}

EpsilonNet::InsertResult EpsilonNet::Insert(const Embedding& x) {
  double dist = 0.0;
  const std::size_t nearest = Nearest(x, &dist);
  if (nearest == kOutside || dist > radius_) {
    return {AddCenter(x), true, dist};
  }
  return {nearest, false, dist};
}

std::size_t EpsilonNet::AddCenter(const Embedding& x) {
  if (!centers_.empty() && centers_.front().dim() != x.dim()) {
    throw ConfigError("embedding dimension mismatch in net");
  }
  centers_.push_back(x);
  counts_.push_back(0);
  return centers_.size() - 1;
}

void EpsilonNet::RecordArrival(std::size_t cell) {
  if (cell >= counts_.size()) throw ContractViolation("arrival for unknown cell");
  counts_[cell] += 1;
  total_ += 1;
}

std::vector<double> EpsilonNet::EmpiricalWeights() const {
  const double denom = static_cast<double>(std::max<std::uint64_t>(1, total_));
  std::vector<double> w(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    w[i] = static_cast<double>(counts_[i]) / denom;
  }
  return w;
}

EpsilonNet BuildStaticNet(std::span<const Embedding> points, double eps) {
  EpsilonNet net(eps);
  for (const Embedding& p : points) net.Insert(p);
  for (std::size_t cell : VoronoiAssign(net, points)) net.RecordArrival(cell);
  return net;
}

std::vector<std::size_t> VoronoiAssign(const EpsilonNet& net,
                                       std::span<const Embedding> points) {
  std::vector<std::size_t> cells;
  cells.reserve(points.size());
  for (const Embedding& p : points) cells.push_back(net.Nearest(p));
  return cells;
}

std::size_t AssignCell(const EpsilonNet& net, const Embedding& x,
                       std::optional<double> membership_radius) {
  return AssignCell(net.centers(), x, membership_radius);
}

std::size_t AssignCell(std::span<const Embedding> centers, const Embedding& x,
                       std::optional<double> membership_radius) {
  double dist = 0.0;
  const std::size_t nearest = NearestIndex(centers, x, &dist);
  if (nearest == kOutside) return kOutside;
  if (membership_radius && dist > *membership_radius) return kOutside;
  return nearest;
}

QuantileList ExactQuantiles(std::vector<double> values) {
  QuantileList out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  const double last = static_cast<double>(values.size() - 1);
  for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double pos = q * last;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(values.size() - 1, lo + 1);
    const double frac = pos - static_cast<double>(lo);
    out.emplace_back(q, values[lo] + frac * (values[hi] - values[lo]));
  }
  return out;
}

DistanceStats DistanceDiagnostics(std::span<const Embedding> points,
                                  std::span<const Embedding> universe) {
  if (points.empty()) throw ConfigError("distance diagnostics need points");
  DistanceStats stats;
  const std::size_t n = points.size();
  std::vector<double> pairwise;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  if (n >= 2) pairwise.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = NormalizedDistance(points[i], points[j]);
      pairwise.push_back(d);
      nearest[i] = std::min(nearest[i], d);
      nearest[j] = std::min(nearest[j], d);
    }
  }
  stats.pairwise_empty = n < 2;
  stats.pairwise = ExactQuantiles(std::move(pairwise));
  if (n >= 2) stats.nearest_neighbor = ExactQuantiles(nearest);

  if (!universe.empty()) {
    std::vector<double> to_universe;
    to_universe.reserve(n);
    for (const Embedding& p : points) {
      double d = 0.0;
      NearestIndex(universe, p, &d);
      to_universe.push_back(d);
    }
    stats.to_universe = ExactQuantiles(std::move(to_universe));
  }
  return stats;
}

}  // namespace semcache
