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

#include "graphroute/landmark.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "binio.hpp"

namespace graphroute {

namespace {

template <class F>
void for_each_bidirected(const Graph& g, Slot s, F&& f) {
  for (Slot t : g.out_slots(s)) f(t);
  for (Slot t : g.in_slots(s)) f(t);
}

Hops sentinel_for(const Graph& g) {
  return static_cast<Hops>(std::max<std::size_t>(g.node_count(), 1));
}

}  // namespace

std::vector<Hops> bfs_slot_distances(const Graph& graph, Slot source,
                                     Hops unreachable, Hops max_depth) {
  std::vector<Hops> dist(graph.slot_count(), unreachable);
  std::vector<Slot> frontier{source};
  std::vector<Slot> next;
  dist[source] = 0;
  for (Hops depth = 0; !frontier.empty() && depth < max_depth; ++depth) {
    next.clear();
    for (Slot s : frontier) {
      for_each_bidirected(graph, s, [&](Slot t) {
        if (dist[t] == unreachable) {
          dist[t] = depth + 1;
          next.push_back(t);
        }
      });
    }
    frontier.swap(next);
  }
  return dist;
}

std::unordered_map<NodeId, Hops> bfs_distances(const Graph& graph,
                                               NodeId source) {
  auto src = graph.slot_of(source);
  if (!src) {
    throw PreconditionError("bfs source not in graph: " + std::to_string(source));
  }
  constexpr Hops kUnseen = std::numeric_limits<Hops>::max();
  const auto dist = bfs_slot_distances(graph, *src, kUnseen);
  std::unordered_map<NodeId, Hops> out;
  for (Slot s = 0; s < dist.size(); ++s) {
    if (dist[s] != kUnseen) out.emplace(graph.id_at(s), dist[s]);
  }
  return out;
}

std::vector<Slot> bfs_ball(const Graph& graph, std::span<const Slot> sources,
                           Hops radius) {
  std::vector<Slot> visited;
  std::unordered_map<Slot, Hops> depth;
  std::vector<Slot> frontier;
  for (Slot s : sources) {
    if (depth.emplace(s, 0).second) {
      visited.push_back(s);
      frontier.push_back(s);
    }
  }
  std::vector<Slot> next;
  for (Hops d = 0; d < radius && !frontier.empty(); ++d) {
    next.clear();
    for (Slot s : frontier) {
      for_each_bidirected(graph, s, [&](Slot t) {
        if (depth.emplace(t, d + 1).second) {
          visited.push_back(t);
          next.push_back(t);
        }
      });
    }
    frontier.swap(next);
  }
  return visited;
}

LandmarkSet select_landmarks(const Graph& graph, std::size_t target_count,
                             Hops separation_threshold) {
  if (graph.node_count() == 0) {
    throw PreconditionError("cannot select landmarks on an empty graph");
  }
  std::vector<Slot> order;
  order.reserve(graph.node_count());
  for (Slot s = 0; s < graph.slot_count(); ++s) {
    if (graph.alive(s)) order.push_back(s);
  }
  std::sort(order.begin(), order.end(), [&](Slot a, Slot b) {
    const auto da = graph.degree(a);
    const auto db = graph.degree(b);
    if (da != db) return da > db;
    return graph.id_at(a) < graph.id_at(b);
  });

  // A slot is blocked once it lies within (threshold - 1) hops of an accepted
  // landmark; on the bi-directed view this is the same test as a truncated
  // BFS from the candidate.
  std::vector<bool> blocked(graph.slot_count(), false);
  const Hops block_depth = separation_threshold == 0 ? 0 : separation_threshold - 1;
  LandmarkSet set;
  set.separation_threshold = separation_threshold;
  set.target_count = target_count;
  for (Slot cand : order) {
    if (set.landmarks.size() >= target_count) break;
    if (blocked[cand]) continue;
    set.landmarks.push_back(graph.id_at(cand));
    const Slot src[] = {cand};
    for (Slot s : bfs_ball(graph, src, block_depth)) blocked[s] = true;
  }
  return set;
}

// ---------------------------------------------------------------------------

LandmarkDistanceTable LandmarkDistanceTable::build(const Graph& graph,
                                                   const LandmarkSet& landmarks) {
  LandmarkDistanceTable t;
  t.unreachable_ = sentinel_for(graph);
  t.rows_ = graph.slot_count();
  const std::size_t L = landmarks.landmarks.size();
  for (NodeId id : landmarks.landmarks) {
    auto s = graph.slot_of(id);
    if (!s) throw PreconditionError("landmark not in graph: " + std::to_string(id));
    t.landmark_slots_.push_back(*s);
  }
  t.dist_.assign(t.rows_ * L, t.unreachable_);
  for (std::size_t l = 0; l < L; ++l) {
    const auto col = bfs_slot_distances(graph, t.landmark_slots_[l], t.unreachable_);
    for (std::size_t s = 0; s < t.rows_; ++s) t.dist_[s * L + l] = col[s];
  }
  return t;
}

std::vector<Hops> LandmarkDistanceTable::landmark_matrix() const {
  const std::size_t L = landmark_count();
  std::vector<Hops> m(L * L);
  for (std::size_t a = 0; a < L; ++a) {
    for (std::size_t b = 0; b < L; ++b) m[a * L + b] = at(landmark_slots_[a], b);
  }
  return m;
}

void LandmarkDistanceTable::grow(std::size_t rows) {
  if (rows <= rows_) return;
  dist_.resize(rows * landmark_count(), unreachable_);
  rows_ = rows;
}

// ---------------------------------------------------------------------------

PivotAssignment assign_pivots(std::span<const Hops> d, std::size_t L,
                              std::size_t P) {
  if (P == 0) throw ConfigError("processor count must be >= 1");
  if (L < P) {
    throw ConfigError("need at least as many landmarks as processors (|L|=" +
                      std::to_string(L) + ", P=" + std::to_string(P) + ")");
  }
  if (d.size() != L * L) throw ConfigError("landmark matrix has wrong size");

  PivotAssignment a;
  a.num_processors = P;
  std::vector<bool> is_pivot(L, false);

  // First two pivots: the farthest pair (ties: lexicographically smallest).
  std::size_t first = 0, second = L > 1 ? 1 : 0;
  if (L > 1) {
    Hops best = 0;
    bool found = false;
    for (std::size_t i = 0; i < L; ++i) {
      for (std::size_t j = i + 1; j < L; ++j) {
        if (!found || d[i * L + j] > best) {
          best = d[i * L + j];
          first = i;
          second = j;
          found = true;
        }
      }
    }
  }
  a.pivot_of_processor.push_back(first);
  is_pivot[first] = true;
  if (P > 1) {
    a.pivot_of_processor.push_back(second);
    is_pivot[second] = true;
  }

  // min distance from each landmark to the chosen pivots
  std::vector<Hops> to_pivots(L, std::numeric_limits<Hops>::max());
  auto absorb = [&](std::size_t pivot) {
    for (std::size_t l = 0; l < L; ++l) to_pivots[l] = std::min(to_pivots[l], d[l * L + pivot]);
  };
  for (auto p : a.pivot_of_processor) absorb(p);

  while (a.pivot_of_processor.size() < P) {
    std::size_t pick = L;
    for (std::size_t l = 0; l < L; ++l) {
      if (is_pivot[l]) continue;
      if (pick == L || to_pivots[l] > to_pivots[pick]) pick = l;
    }
    a.pivot_of_processor.push_back(pick);
    is_pivot[pick] = true;
    absorb(pick);
  }

  a.processor_of_landmark.assign(L, 0);
  for (std::size_t p = 0; p < P; ++p) a.processor_of_landmark[a.pivot_of_processor[p]] = p;
  for (std::size_t l = 0; l < L; ++l) {
    if (is_pivot[l]) continue;
    std::size_t best_p = 0;
    for (std::size_t p = 1; p < P; ++p) {
      if (d[l * L + a.pivot_of_processor[p]] < d[l * L + a.pivot_of_processor[best_p]]) {
        best_p = p;
      }
    }
    a.processor_of_landmark[l] = best_p;
  }
  return a;
}

// ---------------------------------------------------------------------------

NodeProcessorTable NodeProcessorTable::build(const LandmarkDistanceTable& dist,
                                             const PivotAssignment& assignment) {
  NodeProcessorTable t;
  t.processors_ = assignment.num_processors;
  t.rows_ = dist.row_count();
  t.d_.assign(t.rows_ * t.processors_, dist.unreachable());
  for (Slot s = 0; s < t.rows_; ++s) t.refresh_row(s, dist, assignment);
  return t;
}

void NodeProcessorTable::refresh_row(Slot s, const LandmarkDistanceTable& dist,
                                     const PivotAssignment& assignment) {
  Hops* row = d_.data() + s * processors_;
  std::fill(row, row + processors_, dist.unreachable());
  const auto drow = dist.row(s);
  for (std::size_t l = 0; l < drow.size(); ++l) {
    auto& cell = row[assignment.processor_of_landmark[l]];
    cell = std::min(cell, drow[l]);
  }
}

void NodeProcessorTable::grow(std::size_t rows, Hops unreachable) {
  if (rows <= rows_) return;
  d_.resize(rows * processors_, unreachable);
  rows_ = rows;
}

// ---------------------------------------------------------------------------

LandmarkIndex LandmarkIndex::build(const Graph& graph, const LandmarkConfig& config) {
  LandmarkIndex idx;
  idx.config_ = config;
  idx.set_ = select_landmarks(graph, config.target_count, config.separation_threshold);
  idx.dist_ = LandmarkDistanceTable::build(graph, idx.set_);
  idx.row_ids_.resize(graph.slot_count());
  for (Slot s = 0; s < graph.slot_count(); ++s) {
    idx.row_ids_[s] = graph.id_at(s);
    if (graph.alive(s)) idx.rows_.emplace(graph.id_at(s), s);
  }
  return idx;
}

void LandmarkIndex::assign_processors(std::size_t num_processors) {
  assignment_ = assign_pivots(dist_.landmark_matrix(), dist_.landmark_count(),
                              num_processors);
  table_ = NodeProcessorTable::build(dist_, assignment_);
}

std::optional<Slot> LandmarkIndex::row_of(NodeId id) const {
  auto it = rows_.find(id);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

RefreshStats LandmarkIndex::refresh_after_update(const Graph& graph,
                                                 const UpdateReceipt& receipt,
                                                 std::optional<Hops> radius) {
  RefreshStats stats;
  ++updates_;
  const Hops r = radius.value_or(config_.refresh_radius);
  const Hops inf = dist_.unreachable();
  const std::size_t L = dist_.landmark_count();

  // Rows follow graph slots; new slots get fresh rows.
  const std::size_t old_rows = dist_.row_count();
  dist_.grow(graph.slot_count());
  if (has_assignment()) table_.grow(graph.slot_count(), inf);
  row_ids_.resize(graph.slot_count());
  for (Slot s = static_cast<Slot>(old_rows); s < graph.slot_count(); ++s) {
    row_ids_[s] = graph.id_at(s);
    if (graph.alive(s)) {
      rows_.emplace(graph.id_at(s), s);
      ++stats.rows_added;
    }
  }
  std::vector<Slot> dropped;
  for (NodeId id : receipt.removed) {
    auto it = rows_.find(id);
    if (it == rows_.end()) continue;
    auto row = dist_.mutable_row(it->second);
    std::fill(row.begin(), row.end(), inf);
    dropped.push_back(it->second);
    stats.dropped.push_back(id);
    rows_.erase(it);
    ++stats.rows_dropped;
  }
  if (has_assignment()) {
    for (Slot s : dropped) table_.refresh_row(s, dist_, assignment_);
  }

  std::vector<Slot> seeds;
  for (NodeId id : receipt.affected) {
    if (auto s = graph.slot_of(id)) seeds.push_back(*s);
  }
  if (seeds.empty()) return stats;
  const auto region = bfs_ball(graph, seeds, r);

  std::vector<std::int32_t> pos(graph.slot_count(), -1);
  for (std::size_t i = 0; i < region.size(); ++i) pos[region[i]] = static_cast<std::int32_t>(i);

  std::vector<Hops> best(region.size());
  using Item = std::pair<Hops, std::uint32_t>;
  for (std::size_t l = 0; l < L; ++l) {
    const Slot ls = dist_.landmark_slot(l);
    const bool landmark_alive = graph.alive(ls);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (std::size_t i = 0; i < region.size(); ++i) {
      const Slot w = region[i];
      Hops b = (landmark_alive && w == ls) ? 0 : inf;
      for_each_bidirected(graph, w, [&](Slot y) {
        if (pos[y] >= 0) return;
        const Hops dy = dist_.at(y, l);
        if (dy < inf && dy + 1 < b) b = dy + 1;
      });
      best[i] = b;
      if (b < inf) pq.emplace(b, static_cast<std::uint32_t>(i));
    }
    while (!pq.empty()) {
      auto [d, i] = pq.top();
      pq.pop();
      if (d > best[i]) continue;
      for_each_bidirected(graph, region[i], [&](Slot y) {
        const auto j = pos[y];
        if (j >= 0 && d + 1 < best[j]) {
          best[j] = d + 1;
          pq.emplace(d + 1, static_cast<std::uint32_t>(j));
        }
      });
    }
    for (std::size_t i = 0; i < region.size(); ++i) {
      dist_.mutable_row(region[i])[l] = std::min(best[i], inf);
    }
  }
  stats.rows_recomputed = region.size();
  stats.refreshed = region;

  if (has_assignment()) {
    for (Slot s : region) table_.refresh_row(s, dist_, assignment_);
  }
  return stats;
}

std::size_t LandmarkIndex::bytes() const noexcept {
  // unordered_map node: key + value + next pointer + cached hash, plus bucket.
  constexpr std::size_t kMapEntry = sizeof(NodeId) + sizeof(Slot) + 2 * sizeof(void*) + sizeof(void*);
  return dist_.bytes() + table_.bytes() + rows_.size() * kMapEntry +
         row_ids_.size() * sizeof(NodeId);
}

// ---------------------------------------------------------------------------
// Snapshot: "GRLMIDX1" magic, u32 version, then sizes and row-major tables,
// all little-endian.

namespace {
constexpr std::string_view kLandmarkMagic = "GRLMIDX1";
constexpr std::uint32_t kLandmarkVersion = 1;
}  // namespace

void LandmarkIndex::save(const std::filesystem::path& path) const {
  binio::Writer w(path);
  w.put_bytes(kLandmarkMagic);
  w.put<std::uint32_t>(kLandmarkVersion);
  const std::uint64_t rows = dist_.row_count();
  const auto L = static_cast<std::uint32_t>(dist_.landmark_count());
  const auto P = static_cast<std::uint32_t>(assignment_.num_processors);
  w.put<std::uint64_t>(rows);
  w.put<std::uint32_t>(L);
  w.put<std::uint32_t>(P);
  w.put<std::uint32_t>(dist_.unreachable());
  w.put<std::uint64_t>(config_.target_count);
  w.put<std::uint32_t>(config_.separation_threshold);
  w.put<std::uint32_t>(config_.refresh_radius);
  w.put<std::uint64_t>(config_.rebuild_after_updates);
  w.put<std::uint64_t>(updates_);
  w.put_span(std::span<const NodeId>(set_.landmarks));
  w.put_span(std::span<const Slot>(dist_.landmark_slots_));
  w.put_span(std::span<const NodeId>(row_ids_));
  std::vector<std::uint8_t> alive(rows, 0);
  for (Slot s = 0; s < rows; ++s) {
    auto it = rows_.find(row_ids_[s]);
    alive[s] = (it != rows_.end() && it->second == s) ? 1 : 0;
  }
  w.put_span(std::span<const std::uint8_t>(alive));
  w.put_span(dist_.data());
  if (P > 0) {
    std::vector<std::uint32_t> piv(assignment_.pivot_of_processor.begin(),
                                   assignment_.pivot_of_processor.end());
    std::vector<std::uint32_t> owner(assignment_.processor_of_landmark.begin(),
                                     assignment_.processor_of_landmark.end());
    w.put_span(std::span<const std::uint32_t>(piv));
    w.put_span(std::span<const std::uint32_t>(owner));
    std::vector<Hops> d(rows * P);
    for (Slot s = 0; s < rows; ++s) {
      auto row = table_.row(s);
      std::copy(row.begin(), row.end(), d.begin() + s * P);
    }
    w.put_span(std::span<const Hops>(d));
  }
  w.finish();
}

LandmarkIndex LandmarkIndex::load(const std::filesystem::path& path) {
  binio::Reader r(path);
  r.expect_magic(kLandmarkMagic);
  if (r.get<std::uint32_t>() != kLandmarkVersion) {
    throw Error(path.string() + ": unsupported landmark snapshot version");
  }
  LandmarkIndex idx;
  const auto rows = r.get<std::uint64_t>();
  const auto L = r.get<std::uint32_t>();
  const auto P = r.get<std::uint32_t>();
  idx.dist_.unreachable_ = r.get<std::uint32_t>();
  idx.config_.target_count = r.get<std::uint64_t>();
  idx.config_.separation_threshold = r.get<std::uint32_t>();
  idx.config_.refresh_radius = r.get<std::uint32_t>();
  idx.config_.rebuild_after_updates = r.get<std::uint64_t>();
  idx.updates_ = r.get<std::uint64_t>();
  idx.set_.landmarks = r.get_vector<NodeId>(L);
  idx.set_.target_count = idx.config_.target_count;
  idx.set_.separation_threshold = idx.config_.separation_threshold;
  idx.dist_.landmark_slots_ = r.get_vector<Slot>(L);
  idx.row_ids_ = r.get_vector<NodeId>(rows);
  const auto alive = r.get_vector<std::uint8_t>(rows);
  for (Slot s = 0; s < rows; ++s) {
    if (alive[s]) idx.rows_.emplace(idx.row_ids_[s], s);
  }
  idx.dist_.dist_ = r.get_vector<Hops>(rows * L);
  idx.dist_.rows_ = rows;
  if (P > 0) {
    const auto piv = r.get_vector<std::uint32_t>(P);
    const auto owner = r.get_vector<std::uint32_t>(L);
    idx.assignment_.num_processors = P;
    idx.assignment_.pivot_of_processor.assign(piv.begin(), piv.end());
    idx.assignment_.processor_of_landmark.assign(owner.begin(), owner.end());
    idx.table_ = NodeProcessorTable::build(idx.dist_, idx.assignment_);
    const auto d = r.get_vector<Hops>(rows * P);
    for (Slot s = 0; s < rows; ++s) {
      for (std::size_t p = 0; p < P; ++p) {
        if (idx.table_.at(s, p) != d[s * P + p]) {
          throw Error(path.string() + ": d(u,p) table inconsistent with distances");
        }
      }
    }
  }
  return idx;
}

bool operator==(const LandmarkIndex& a, const LandmarkIndex& b) {
  auto same_table = [](const NodeProcessorTable& x, const NodeProcessorTable& y) {
    if (x.row_count() != y.row_count() || x.processor_count() != y.processor_count()) return false;
    for (Slot s = 0; s < x.row_count(); ++s) {
      auto rx = x.row(s);
      auto ry = y.row(s);
      if (!std::equal(rx.begin(), rx.end(), ry.begin())) return false;
    }
    return true;
  };
  return a.set_.landmarks == b.set_.landmarks && a.rows_ == b.rows_ &&
         a.dist_.unreachable() == b.dist_.unreachable() &&
         std::ranges::equal(a.dist_.data(), b.dist_.data()) &&
         a.assignment_.pivot_of_processor == b.assignment_.pivot_of_processor &&
         a.assignment_.processor_of_landmark == b.assignment_.processor_of_landmark &&
         same_table(a.table_, b.table_);
}

}  // namespace graphroute
