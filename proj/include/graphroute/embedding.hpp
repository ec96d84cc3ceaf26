/** Copyright 2026 The graphroute Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * 	http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "graphroute/landmark.hpp"
#include "graphroute/simplex.hpp"

namespace graphroute {

// |d_graph - d_euclid| / d_graph. Throws PreconditionError unless d_graph > 0.
double relative_error(double d_graph, double d_euclid);

enum class ErrorAggregation {
  kSumSquared,  // sum of squared relative errors (default)
  kSum,         // plain sum of relative errors
};

struct EmbedConfig {
  std::size_t dimensions = 10;
  ErrorAggregation aggregation = ErrorAggregation::kSumSquared;
  std::uint64_t seed = 1;

  // Landmark embedding: random restarts, each followed by up to
  // `landmark_polish_rounds` re-runs from the best vertex with a fresh
  // simplex while the objective keeps dropping.
  std::size_t landmark_restarts = 3;
  std::size_t landmark_polish_rounds = 6;
  SimplexConfig landmark_simplex{.tolerance = 1e-4,
                                 .max_iterations = 1000000,
                                 .max_evaluations = 60000,
                                 .initial_step = 1.0};

  SimplexConfig node_simplex{.tolerance = 1e-2,
                             .max_iterations = 4000,
                             .max_evaluations = 0,
                             .initial_step = 0.5};
  // Half-width of the uniform noise added to the 3-nearest-landmark centroid.
  double node_init_noise = 0.25;

  // Worker threads for per-node embedding; 0 = hardware concurrency.
  std::size_t threads = 0;
};

// Pairs of landmarks with a usable reference distance (0 < d < unreachable).
struct LandmarkPair {
  std::uint32_t a;
  std::uint32_t b;
  double hops;
};
std::vector<LandmarkPair> usable_pairs(std::span<const Hops> matrix,
                                       std::size_t landmark_count,
                                       Hops unreachable);

// Aggregate relative error of `coords` (L x D row-major) over `pairs`.
double landmark_objective(std::span<const LandmarkPair> pairs,
                          std::span<const double> coords, std::size_t dimensions,
                          ErrorAggregation aggregation);

// Mean (not aggregate) relative error over usable landmark pairs.
double mean_landmark_error(std::span<const Hops> matrix, std::size_t landmark_count,
                           Hops unreachable, std::span<const double> coords,
                           std::size_t dimensions);

// Coordinates (L x D, row-major) minimizing the aggregate pairwise relative
// error. A single landmark sits at the origin. Throws EmbeddingError when
// |L| >= 2 and no pair is reachable.
std::vector<double> embed_landmarks(std::span<const Hops> matrix,
                                    std::size_t landmark_count, Hops unreachable,
                                    const EmbedConfig& config);

struct NodePlacement {
  std::vector<double> coords;
  bool flagged = false;  // no reachable landmark; coords are a seeded guess
};

// Places one node against fixed landmark coordinates. Pure: the same inputs
// and seed give bit-identical coordinates.
NodePlacement embed_node(std::span<const Hops> landmark_distances, Hops unreachable,
                         std::span<const double> landmark_coords,
                         std::size_t dimensions, std::uint64_t seed,
                         const EmbedConfig& config);

// D coordinates per node plus the landmark coordinates they were fit to.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;

  static EmbeddingTable build(const Graph& graph, const LandmarkIndex& landmarks,
                              const EmbedConfig& config);

  std::size_t dimensions() const noexcept { return dims_; }
  std::size_t node_count() const noexcept { return rows_.size(); }
  std::size_t flagged_count() const noexcept;

  std::optional<std::span<const double>> coords_of(NodeId id) const;
  std::span<const double> landmark_coords() const { return landmark_coords_; }
  // Axis-aligned bounds of the landmark coordinates (lo, hi per dimension).
  std::pair<std::vector<double>, std::vector<double>> landmark_bounds() const;

  // Re-places the rows refreshed by LandmarkIndex::refresh_after_update
  // (call that first) and drops rows of deleted nodes.
  void refresh_after_update(const Graph& graph, const LandmarkIndex& landmarks,
                            const RefreshStats& refreshed);

  std::size_t bytes() const noexcept;

  // Snapshot: versioned header, D, node count, row-major float64 rows.
  void save(const std::filesystem::path& path) const;
  static EmbeddingTable load(const std::filesystem::path& path);

  // Compares coordinates and rows; the build config is not part of equality.
  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b);

 private:
  void place_rows(const LandmarkIndex& landmarks, std::span<const Slot> slots,
                  std::span<const NodeId> ids);

  std::size_t dims_ = 0;
  EmbedConfig config_;
  std::vector<double> landmark_coords_;
  std::vector<NodeId> ids_;        // row -> node id
  std::vector<double> coords_;     // row-major
  std::vector<std::uint8_t> flagged_;
  std::unordered_map<NodeId, std::uint32_t> rows_;
};

}  // namespace graphroute
