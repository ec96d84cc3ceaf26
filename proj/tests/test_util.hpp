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

// Small oracles shared by the unit tests. Deliberately naive: adjacency
// matrices, Floyd-Warshall, plain queues, no caching.

#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include "graphroute/graph.hpp"

namespace graphroute::testing {

inline constexpr std::uint32_t kInf = 1u << 30;

// Plain copy of a graph as id-indexed edge sets.
struct Snapshot {
  std::vector<NodeId> ids;
  std::set<std::pair<NodeId, NodeId>> edges;
  std::map<NodeId, std::string> label;

  explicit Snapshot(const Graph& g) : ids(g.node_ids()) {
    std::sort(ids.begin(), ids.end());
    g.for_each_entry([&](const AdjacencyEntry& e) {
      label[e.node] = e.label;
      for (const auto& n : e.out) edges.emplace(e.node, n.id);
    });
  }

  std::size_t index(NodeId id) const {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  }
};

// All-pairs hops; `undirected` treats every edge both ways.
inline std::vector<std::vector<std::uint32_t>> floyd_warshall(const Snapshot& s, bool undirected) {
  const std::size_t n = s.ids.size();
  std::vector<std::vector<std::uint32_t>> d(n, std::vector<std::uint32_t>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (auto [u, v] : s.edges) {
    const auto a = s.index(u), b = s.index(v);
    if (a != b) {
      d[a][b] = 1;
      if (undirected) d[b][a] = 1;
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

// Directed hop distances from `src` by a textbook queue BFS over `edges`.
inline std::map<NodeId, std::uint32_t> directed_bfs(const Snapshot& s, NodeId src,
                                                     bool reverse = false) {
  std::map<NodeId, std::vector<NodeId>> adj;
  for (auto [u, v] : s.edges) {
    if (reverse) adj[v].push_back(u);
    else adj[u].push_back(v);
  }
  std::map<NodeId, std::uint32_t> dist{{src, 0}};
  std::queue<NodeId> q;
  q.push(src);
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    for (NodeId v : adj[u]) {
      if (dist.emplace(v, dist[u] + 1).second) q.push(v);
    }
  }
  return dist;
}

inline Graph random_digraph(std::size_t n, std::size_t edges, std::uint64_t seed,
                            NodeId first_id = 0) {
  std::mt19937_64 rng(seed);
  Graph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node(first_id + i);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t e = 0; e < edges; ++e) {
    g.add_edge(first_id + pick(rng), first_id + pick(rng));
  }
  return g;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("graphroute_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace graphroute::testing
