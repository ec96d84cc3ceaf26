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

#include "graphroute/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "binio.hpp"

namespace graphroute {

double relative_error(double d_graph, double d_euclid) {
  if (!(d_graph > 0.0)) {
    throw PreconditionError("relative_error needs a positive graph distance");
  }
  return std::abs(d_graph - d_euclid) / d_graph;
}

namespace {

double euclid(const double* a, const double* b, std::size_t dims) {
  double s = 0.0;
  for (std::size_t i = 0; i < dims; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double aggregate(double err, ErrorAggregation mode) {
  return mode == ErrorAggregation::kSumSquared ? err * err : err;
}

}  // namespace

std::vector<LandmarkPair> usable_pairs(std::span<const Hops> m, std::size_t L,
                                       Hops unreachable) {
  std::vector<LandmarkPair> pairs;
  for (std::uint32_t a = 0; a < L; ++a) {
    for (std::uint32_t b = a + 1; b < L; ++b) {
      const Hops d = m[a * L + b];
      if (d > 0 && d < unreachable) pairs.push_back({a, b, static_cast<double>(d)});
    }
  }
  return pairs;
}

double landmark_objective(std::span<const LandmarkPair> pairs,
                          std::span<const double> coords, std::size_t dims,
                          ErrorAggregation mode) {
  double total = 0.0;
  for (const auto& p : pairs) {
    const double e = euclid(coords.data() + p.a * dims, coords.data() + p.b * dims, dims);
    total += aggregate(std::abs(p.hops - e) / p.hops, mode);
  }
  return total;
}

double mean_landmark_error(std::span<const Hops> matrix, std::size_t L,
                           Hops unreachable, std::span<const double> coords,
                           std::size_t dims) {
  const auto pairs = usable_pairs(matrix, L, unreachable);
  if (pairs.empty()) return 0.0;
  return landmark_objective(pairs, coords, dims, ErrorAggregation::kSum) /
         static_cast<double>(pairs.size());
}

std::vector<double> embed_landmarks(std::span<const Hops> matrix, std::size_t L,
                                    Hops unreachable, const EmbedConfig& cfg) {
  const std::size_t D = cfg.dimensions;
  if (D == 0) throw ConfigError("embedding dimension must be >= 1");
  if (matrix.size() != L * L) throw ConfigError("landmark matrix has wrong size");
  if (L <= 1) return std::vector<double>(L * D, 0.0);

  const auto pairs = usable_pairs(matrix, L, unreachable);
  if (pairs.empty()) throw EmbeddingError("no reachable landmark pair to embed");

  double mean_hops = 0.0;
  for (const auto& p : pairs) mean_hops += p.hops;
  mean_hops /= static_cast<double>(pairs.size());

  auto objective = [&](std::span<const double> x) {
    return landmark_objective(pairs, x, D, cfg.aggregation);
  };

  // Uniform points in a cube of side s are ~ s * sqrt(D / 6) apart.
  const double side = mean_hops * std::sqrt(6.0 / static_cast<double>(D));
  std::vector<double> best;
  double best_value = 0.0;
  for (std::size_t r = 0; r < std::max<std::size_t>(cfg.landmark_restarts, 1); ++r) {
    std::mt19937_64 rng(counter_random(cfg.seed, 0x1a4d0000 + r));
    std::uniform_real_distribution<double> unif(0.0, side);
    std::vector<double> x(L * D);
    for (auto& v : x) v = unif(rng);

    SimplexConfig sc = cfg.landmark_simplex;
    if (sc.initial_step <= 0.0) sc.initial_step = 0.5 * mean_hops;
    auto res = simplex_downhill(objective, x, sc);
    for (std::size_t round = 0; round < cfg.landmark_polish_rounds; ++round) {
      auto next = simplex_downhill(objective, res.x, sc);
      const bool improved = next.value < res.value * (1.0 - 1e-3);
      if (next.value < res.value) res = std::move(next);
      if (!improved) break;
    }
    if (best.empty() || res.value < best_value) {
      best = std::move(res.x);
      best_value = res.value;
    }
  }
  return best;
}

NodePlacement embed_node(std::span<const Hops> dist, Hops unreachable,
                         std::span<const double> lcoords, std::size_t D,
                         std::uint64_t seed, const EmbedConfig& cfg) {
  const std::size_t L = dist.size();
  if (lcoords.size() != L * D) throw ConfigError("landmark coordinates have wrong size");
  NodePlacement out;
  out.coords.assign(D, 0.0);
  if (L == 0) {
    out.flagged = true;
    return out;
  }

  // The node is a landmark: take its coordinates verbatim.
  for (std::size_t l = 0; l < L; ++l) {
    if (dist[l] == 0) {
      std::copy_n(lcoords.begin() + l * D, D, out.coords.begin());
      return out;
    }
  }

  std::vector<std::uint32_t> reach;
  for (std::uint32_t l = 0; l < L; ++l) {
    if (dist[l] < unreachable) reach.push_back(l);
  }

  if (reach.empty()) {
    out.flagged = true;
    std::vector<double> lo(D, 0.0), hi(D, 0.0);
    for (std::size_t i = 0; i < D; ++i) {
      lo[i] = hi[i] = lcoords[i];
      for (std::size_t l = 1; l < L; ++l) {
        lo[i] = std::min(lo[i], lcoords[l * D + i]);
        hi[i] = std::max(hi[i], lcoords[l * D + i]);
      }
      out.coords[i] = lo[i] + (hi[i] - lo[i]) * to_unit(counter_random(seed, i));
    }
    return out;
  }

  // Start from the centroid of the three nearest landmarks plus seeded noise.
  std::vector<std::uint32_t> nearest = reach;
  std::stable_sort(nearest.begin(), nearest.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return dist[a] < dist[b]; });
  nearest.resize(std::min<std::size_t>(3, nearest.size()));
  std::vector<double> init(D, 0.0);
  for (auto l : nearest) {
    for (std::size_t i = 0; i < D; ++i) init[i] += lcoords[l * D + i];
  }
  for (std::size_t i = 0; i < D; ++i) {
    init[i] /= static_cast<double>(nearest.size());
    init[i] += cfg.node_init_noise * (2.0 * to_unit(counter_random(seed, 1000 + i)) - 1.0);
  }

  auto objective = [&](std::span<const double> x) {
    double total = 0.0;
    for (auto l : reach) {
      const double hd = static_cast<double>(dist[l]);
      const double e = euclid(x.data(), lcoords.data() + l * D, D);
      total += aggregate(std::abs(hd - e) / hd, cfg.aggregation);
    }
    return total;
  };
  out.coords = simplex_downhill(objective, init, cfg.node_simplex).x;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::uint64_t node_seed(std::uint64_t seed, NodeId id) {
  return counter_random(seed, id);
}

}  // namespace

EmbeddingTable EmbeddingTable::build(const Graph& graph, const LandmarkIndex& landmarks,
                                     const EmbedConfig& config) {
  EmbeddingTable t;
  t.dims_ = config.dimensions;
  t.config_ = config;
  const auto& dist = landmarks.distances();
  t.landmark_coords_ = embed_landmarks(dist.landmark_matrix(), dist.landmark_count(),
                                       dist.unreachable(), config);

  std::vector<Slot> slots;
  std::vector<NodeId> ids;
  for (Slot s = 0; s < graph.slot_count(); ++s) {
    if (graph.alive(s)) {
      slots.push_back(s);
      ids.push_back(graph.id_at(s));
    }
  }
  t.place_rows(landmarks, slots, ids);
  return t;
}

void EmbeddingTable::place_rows(const LandmarkIndex& landmarks,
                                std::span<const Slot> slots,
                                std::span<const NodeId> ids) {
  const auto& dist = landmarks.distances();
  std::vector<std::uint32_t> rows(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    auto [it, inserted] = rows_.try_emplace(ids[i], static_cast<std::uint32_t>(ids_.size()));
    if (inserted) {
      ids_.push_back(ids[i]);
      coords_.resize(ids_.size() * dims_, 0.0);
      flagged_.push_back(0);
    }
    rows[i] = it->second;
  }
  parallel_for(slots.size(), config_.threads, [&](std::size_t i) {
    auto placed = embed_node(dist.row(slots[i]), dist.unreachable(), landmark_coords_,
                             dims_, node_seed(config_.seed, ids[i]), config_);
    std::copy(placed.coords.begin(), placed.coords.end(),
              coords_.begin() + static_cast<std::ptrdiff_t>(rows[i] * dims_));
    flagged_[rows[i]] = placed.flagged ? 1 : 0;
  });
}

std::size_t EmbeddingTable::flagged_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [id, row] : rows_) n += flagged_[row];
  return n;
}

std::optional<std::span<const double>> EmbeddingTable::coords_of(NodeId id) const {
  auto it = rows_.find(id);
  if (it == rows_.end()) return std::nullopt;
  return std::span<const double>(coords_.data() + it->second * dims_, dims_);
}

std::pair<std::vector<double>, std::vector<double>> EmbeddingTable::landmark_bounds() const {
  std::vector<double> lo(dims_, 0.0), hi(dims_, 0.0);
  const std::size_t L = dims_ == 0 ? 0 : landmark_coords_.size() / dims_;
  for (std::size_t i = 0; i < dims_ && L > 0; ++i) {
    lo[i] = hi[i] = landmark_coords_[i];
    for (std::size_t l = 1; l < L; ++l) {
      lo[i] = std::min(lo[i], landmark_coords_[l * dims_ + i]);
      hi[i] = std::max(hi[i], landmark_coords_[l * dims_ + i]);
    }
  }
  return {lo, hi};
}

void EmbeddingTable::refresh_after_update(const Graph& graph, const LandmarkIndex& landmarks,
                                          const RefreshStats& refreshed) {
  for (NodeId id : refreshed.dropped) rows_.erase(id);
  std::vector<Slot> slots;
  std::vector<NodeId> ids;
  for (Slot s : refreshed.refreshed) {
    if (!graph.alive(s)) continue;
    slots.push_back(s);
    ids.push_back(graph.id_at(s));
  }
  place_rows(landmarks, slots, ids);
}

std::size_t EmbeddingTable::bytes() const noexcept {
  constexpr std::size_t kMapEntry = sizeof(NodeId) + sizeof(std::uint32_t) + 3 * sizeof(void*);
  return coords_.size() * sizeof(double) + ids_.size() * sizeof(NodeId) + flagged_.size() +
         rows_.size() * kMapEntry + landmark_coords_.size() * sizeof(double);
}

bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
  if (a.dims_ != b.dims_ || a.landmark_coords_ != b.landmark_coords_ ||
      a.rows_.size() != b.rows_.size()) {
    return false;
  }
  for (const auto& [id, row] : a.rows_) {
    auto other = b.coords_of(id);
    if (!other) return false;
    auto mine = a.coords_of(id);
    if (!std::equal(mine->begin(), mine->end(), other->begin())) return false;
    if (a.flagged_[row] != b.flagged_[b.rows_.at(id)]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::string_view kEmbedMagic = "GREMBED1";
constexpr std::uint32_t kEmbedVersion = 1;
}  // namespace

void EmbeddingTable::save(const std::filesystem::path& path) const {
  binio::Writer w(path);
  w.put_bytes(kEmbedMagic);
  w.put<std::uint32_t>(kEmbedVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(dims_));
  std::vector<NodeId> ids;
  std::vector<std::uint8_t> flags;
  std::vector<double> coords;
  for (std::uint32_t r = 0; r < ids_.size(); ++r) {
    auto it = rows_.find(ids_[r]);
    if (it == rows_.end() || it->second != r) continue;
    ids.push_back(ids_[r]);
    flags.push_back(flagged_[r]);
    coords.insert(coords.end(), coords_.begin() + r * dims_, coords_.begin() + (r + 1) * dims_);
  }
  w.put<std::uint64_t>(ids.size());
  const std::size_t L = dims_ == 0 ? 0 : landmark_coords_.size() / dims_;
  w.put<std::uint32_t>(static_cast<std::uint32_t>(L));
  w.put<std::uint64_t>(config_.seed);
  w.put_span(std::span<const double>(landmark_coords_));
  w.put_span(std::span<const NodeId>(ids));
  w.put_span(std::span<const std::uint8_t>(flags));
  w.put_span(std::span<const double>(coords));
  w.finish();
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  binio::Reader r(path);
  r.expect_magic(kEmbedMagic);
  if (r.get<std::uint32_t>() != kEmbedVersion) {
    throw Error(path.string() + ": unsupported embedding snapshot version");
  }
  EmbeddingTable t;
  t.dims_ = r.get<std::uint32_t>();
  t.config_.dimensions = t.dims_;
  const auto n = r.get<std::uint64_t>();
  const auto L = r.get<std::uint32_t>();
  t.config_.seed = r.get<std::uint64_t>();
  t.landmark_coords_ = r.get_vector<double>(std::size_t{L} * t.dims_);
  t.ids_ = r.get_vector<NodeId>(n);
  t.flagged_ = r.get_vector<std::uint8_t>(n);
  t.coords_ = r.get_vector<double>(n * t.dims_);
  for (std::uint32_t i = 0; i < n; ++i) t.rows_.emplace(t.ids_[i], i);
  return t;
}

}  // namespace graphroute
