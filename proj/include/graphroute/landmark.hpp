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
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "graphroute/graph.hpp"

namespace graphroute {

using Hops = std::uint32_t;

inline constexpr Hops kNoDepthLimit = std::numeric_limits<Hops>::max();

// Exact hop distances from `source` over the bi-directed view of the graph.
// Unreachable nodes are absent. Throws PreconditionError for a missing source.
std::unordered_map<NodeId, Hops> bfs_distances(const Graph& graph,
                                               NodeId source);

// Slot-indexed BFS over the bi-directed view. Unvisited slots hold
// `unreachable`. Stops expanding at `max_depth`.
std::vector<Hops> bfs_slot_distances(const Graph& graph, Slot source,
                                     Hops unreachable,
                                     Hops max_depth = kNoDepthLimit);

// Slots within `radius` hops of any source (bi-directed), sources included.
std::vector<Slot> bfs_ball(const Graph& graph, std::span<const Slot> sources,
                           Hops radius);

struct LandmarkSet {
  std::vector<NodeId> landmarks;
  Hops separation_threshold = 3;
  std::size_t target_count = 96;
};

// Scans nodes by descending total degree (ties: ascending id) and keeps a
// candidate only if it is at least `separation_threshold` hops from every
// landmark accepted so far.
LandmarkSet select_landmarks(const Graph& graph, std::size_t target_count = 96,
                             Hops separation_threshold = 3);

// node x landmark hop distances, row-major by graph slot. Unreachable entries
// hold the sentinel (the graph's node count at build time).
class LandmarkDistanceTable {
 public:
  LandmarkDistanceTable() = default;
  static LandmarkDistanceTable build(const Graph& graph,
                                     const LandmarkSet& landmarks);

  std::size_t landmark_count() const noexcept { return landmark_slots_.size(); }
  std::size_t row_count() const noexcept { return rows_; }
  Hops unreachable() const noexcept { return unreachable_; }

  Hops at(Slot s, std::size_t l) const { return dist_[s * landmark_count() + l]; }
  std::span<const Hops> row(Slot s) const {
    return {dist_.data() + s * landmark_count(), landmark_count()};
  }
  std::span<Hops> mutable_row(Slot s) {
    return {dist_.data() + s * landmark_count(), landmark_count()};
  }
  Slot landmark_slot(std::size_t l) const { return landmark_slots_[l]; }

  // |L| x |L| row-major matrix of landmark-to-landmark distances.
  std::vector<Hops> landmark_matrix() const;

  // Appends unreachable rows up to `rows`.
  void grow(std::size_t rows);
  std::size_t bytes() const noexcept { return dist_.size() * sizeof(Hops); }

  std::span<const Hops> data() const { return dist_; }

 private:
  friend class LandmarkIndex;
  std::vector<Slot> landmark_slots_;
  std::vector<Hops> dist_;
  std::size_t rows_ = 0;
  Hops unreachable_ = 0;
};

struct PivotAssignment {
  std::vector<std::size_t> pivot_of_processor;     // processor -> landmark
  std::vector<std::size_t> processor_of_landmark;  // landmark -> processor
  std::size_t num_processors = 0;
};

// Greedy farthest-point pivots over a |L| x |L| distance matrix; remaining
// landmarks join their closest pivot (ties: lowest processor index).
// Throws ConfigError when |L| < P or P == 0.
PivotAssignment assign_pivots(std::span<const Hops> landmark_distances,
                              std::size_t landmark_count,
                              std::size_t num_processors);

// d(u,p) = min over landmarks l assigned to p of dist(u,l); O(nP) storage.
class NodeProcessorTable {
 public:
  NodeProcessorTable() = default;
  static NodeProcessorTable build(const LandmarkDistanceTable& dist,
                                  const PivotAssignment& assignment);

  std::size_t processor_count() const noexcept { return processors_; }
  std::size_t row_count() const noexcept { return rows_; }
  Hops at(Slot s, std::size_t p) const { return d_[s * processors_ + p]; }
  std::span<const Hops> row(Slot s) const {
    return {d_.data() + s * processors_, processors_};
  }

  void refresh_row(Slot s, const LandmarkDistanceTable& dist,
                   const PivotAssignment& assignment);
  void grow(std::size_t rows, Hops unreachable);
  std::size_t bytes() const noexcept { return d_.size() * sizeof(Hops); }

 private:
  std::vector<Hops> d_;
  std::size_t rows_ = 0;
  std::size_t processors_ = 0;
};

struct LandmarkConfig {
  std::size_t target_count = 96;
  Hops separation_threshold = 3;
  Hops refresh_radius = 2;
  // Updates after which needs_rebuild() reports true; 0 disables.
  std::size_t rebuild_after_updates = 0;
};

struct RefreshStats {
  std::vector<Slot> refreshed;  // rows recomputed in this refresh
  std::vector<NodeId> dropped;  // rows removed with their nodes
  std::size_t rows_recomputed = 0;
  std::size_t rows_added = 0;
  std::size_t rows_dropped = 0;
};

// Router-side landmark state: landmark set, distance table, and (once a
// processor count is known) pivot assignment plus the d(u,p) table.
class LandmarkIndex {
 public:
  LandmarkIndex() = default;

  static LandmarkIndex build(const Graph& graph, const LandmarkConfig& config);

  // (Re)builds pivots and d(u,p) for P processors.
  void assign_processors(std::size_t num_processors);
  bool has_assignment() const noexcept { return assignment_.num_processors > 0; }

  const LandmarkSet& landmarks() const noexcept { return set_; }
  const LandmarkDistanceTable& distances() const noexcept { return dist_; }
  const PivotAssignment& assignment() const noexcept { return assignment_; }
  const NodeProcessorTable& node_processor() const noexcept { return table_; }
  const LandmarkConfig& config() const noexcept { return config_; }

  std::optional<Slot> row_of(NodeId id) const;
  std::size_t node_count() const noexcept { return rows_.size(); }

  // Local refresh: recomputes landmark distances and d(u,p) for every
  // affected node and all nodes within `radius` hops of one (current graph),
  // by shortest-path relaxation seeded from the unchanged rows around the
  // region. Rows outside the region are left untouched.
  RefreshStats refresh_after_update(const Graph& graph,
                                    const UpdateReceipt& receipt,
                                    std::optional<Hops> radius = std::nullopt);

  std::size_t updates_since_rebuild() const noexcept { return updates_; }
  bool needs_rebuild() const noexcept {
    return config_.rebuild_after_updates > 0 &&
           updates_ >= config_.rebuild_after_updates;
  }

  // Byte accounting of router-side tables (distance rows, d(u,p), id map).
  std::size_t bytes() const noexcept;

  void save(const std::filesystem::path& path) const;
  static LandmarkIndex load(const std::filesystem::path& path);

  friend bool operator==(const LandmarkIndex& a, const LandmarkIndex& b);

 private:
  LandmarkConfig config_;
  LandmarkSet set_;
  LandmarkDistanceTable dist_;
  PivotAssignment assignment_;
  NodeProcessorTable table_;
  std::unordered_map<NodeId, Slot> rows_;
  std::vector<NodeId> row_ids_;
  std::size_t updates_ = 0;
};

}  // namespace graphroute
