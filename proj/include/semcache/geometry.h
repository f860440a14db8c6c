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

#ifndef SEMCACHE_GEOMETRY_H_
#define SEMCACHE_GEOMETRY_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace semcache {

// A point of the query-embedding space. Coordinates are stored as given;
// use Embedding::Normalized to project onto the unit sphere.
class Embedding {
 public:
  Embedding() = default;
  explicit Embedding(std::vector<double> coords) : coords_(std::move(coords)) {}

  // L2-normalizes `coords`. Throws ConfigError on an empty or zero vector.
  static Embedding Normalized(std::vector<double> coords);

  std::span<const double> coords() const { return coords_; }
  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double Norm() const;

  bool operator==(const Embedding& other) const = default;

 private:
  std::vector<double> coords_;
};

// Raw squared Euclidean distance. Throws ConfigError on dimension mismatch.
double SquaredEuclidean(const Embedding& a, const Embedding& b);

// ||a - b||_2 / 2, which lies in [0, 1] for unit vectors.
double NormalizedDistance(const Embedding& a, const Embedding& b);

inline constexpr std::size_t kOutside = std::numeric_limits<std::size_t>::max();

// Index of the closest point in `centers` (lowest index on ties), or
// kOutside when `centers` is empty. Writes the normalized distance to
// `distance` when non-null (infinity for an empty set).
std::size_t NearestIndex(std::span<const Embedding> centers,
                         const Embedding& x, double* distance = nullptr);

// Greedy epsilon-net with per-cell arrival counters.
//
// Centers are kept pairwise more than `radius` apart. Arrival counting is
// separate from insertion: the online learner decides when an arrival is
// attributed to a cell.
class EpsilonNet {
 public:
  // Throws ConfigError unless radius is in (0, 1].
  explicit EpsilonNet(double radius);

  double radius() const { return radius_; }
  std::size_t size() const { return centers_.size(); }
  bool empty() const { return centers_.empty(); }
  const std::vector<Embedding>& centers() const { return centers_; }
  const Embedding& center(std::size_t i) const { return centers_.at(i); }
  std::span<const std::uint64_t> arrival_counts() const { return counts_; }
  std::uint64_t total_arrivals() const { return total_; }

  struct InsertResult {
    std::size_t index;   // new center, or nearest existing center
    bool is_new_center;
    double distance;     // to the nearest pre-existing center (inf if none)
  };

  // Dynamic rule: `x` becomes a center (with zeroed counter) iff the net is
  // empty or every existing center is farther than the radius.
  InsertResult Insert(const Embedding& x);

  // Appends `x` as a center unconditionally. Used by the static builder.
  std::size_t AddCenter(const Embedding& x);

  std::size_t Nearest(const Embedding& x, double* distance = nullptr) const {
    return NearestIndex(centers_, x, distance);
  }

  void RecordArrival(std::size_t cell);

  // counts[i] / max(1, total).
  std::vector<double> EmpiricalWeights() const;

 private:
  double radius_;
  std::vector<Embedding> centers_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// Scans `points` in order and keeps a point as a center iff it is farther
// than `eps` from every center kept so far. Arrival counters are then filled
// by Voronoi assignment of every input point to the final center set.
EpsilonNet BuildStaticNet(std::span<const Embedding> points, double eps);

// Voronoi cell of each point against the net's centers.
std::vector<std::size_t> VoronoiAssign(const EpsilonNet& net,
                                       std::span<const Embedding> points);

// Nearest center, or kOutside when the net is empty or, if a membership
// radius is supplied, when the nearest center is farther than it.
std::size_t AssignCell(const EpsilonNet& net, const Embedding& x,
                       std::optional<double> membership_radius = {});
std::size_t AssignCell(std::span<const Embedding> centers, const Embedding& x,
                       std::optional<double> membership_radius = {});

// (quantile, value) pairs at quantiles 0, .25, .5, .75, 1.
using QuantileList = std::vector<std::pair<double, double>>;

struct DistanceStats {
  QuantileList pairwise;
  QuantileList nearest_neighbor;
  QuantileList to_universe;
  bool pairwise_empty = false;  // fewer than two points
};

// Exact quantiles (linear interpolation between order statistics).
QuantileList ExactQuantiles(std::vector<double> values);

// Brute-force distance distributions: all pairs within `points`, each
// point's nearest other point, and each point's nearest `universe` member.
// Throws ConfigError when `points` is empty.
DistanceStats DistanceDiagnostics(std::span<const Embedding> points,
                                  std::span<const Embedding> universe);

}  // namespace semcache

#endif  // SEMCACHE_GEOMETRY_H_
