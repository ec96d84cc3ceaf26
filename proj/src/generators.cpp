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

#include "graphroute/generators.hpp"

#include <algorithm>
#include <charconv>

namespace graphroute {

namespace {

std::size_t below(std::uint64_t bits, std::size_t n) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("generator parameter " + std::string(key) + ": bad value '" +
                      std::string(v) + "'");
  }
  return out;
}

void assign_labels(Graph& g, std::size_t labels, std::uint64_t seed) {
  if (labels == 0) return;
  for (NodeId id : g.node_ids()) {
    g.set_label(id, "L" + std::to_string(below(counter_random(seed ^ 0x1abe1, id), labels)));
  }
}

}  // namespace

GeneratorSpec GeneratorSpec::parse(std::string_view text) {
  GeneratorSpec spec;
  const auto colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  if (kind == "grid") {
    spec.kind = GeneratorKind::kGrid;
  } else if (kind == "random") {
    spec.kind = GeneratorKind::kRandom;
  } else if (kind == "power-law" || kind == "powerlaw") {
    spec.kind = GeneratorKind::kPowerLaw;
  } else {
    throw ConfigError("unknown generator '" + std::string(kind) + "'");
  }
  std::string_view rest = colon == std::string_view::npos ? "" : text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view kv = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? "" : rest.substr(comma + 1);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw ConfigError("generator parameter without '='");
    const std::string_view k = kv.substr(0, eq);
    const std::uint64_t v = parse_uint(k, kv.substr(eq + 1));
    if (k == "n") spec.n = v;
    else if (k == "rows") spec.rows = v;
    else if (k == "cols") spec.cols = v;
    else if (k == "edges") spec.edges = v;
    else if (k == "m") spec.m = v;
    else if (k == "labels") spec.labels = v;
    else if (k == "communities") spec.communities = v;
    else if (k == "locality") spec.locality = v;
    else if (k == "seed") spec.seed = v;
    else throw ConfigError("unknown generator parameter '" + std::string(k) + "'");
  }
  return spec;
}

std::string GeneratorSpec::to_string() const {
  std::string s;
  switch (kind) {
    case GeneratorKind::kGrid:
      s = "grid:rows=" + std::to_string(rows) + ",cols=" + std::to_string(cols);
      break;
    case GeneratorKind::kRandom:
      s = "random:n=" + std::to_string(n) + ",edges=" + std::to_string(edges) +
          ",seed=" + std::to_string(seed);
      break;
    case GeneratorKind::kPowerLaw:
      s = "power-law:n=" + std::to_string(n) + ",m=" + std::to_string(m) +
          ",seed=" + std::to_string(seed);
      if (communities > 0) {
        s += ",communities=" + std::to_string(communities) +
             ",locality=" + std::to_string(locality);
      }
      break;
  }
  if (labels > 0) s += ",labels=" + std::to_string(labels);
  return s;
}

Graph make_grid(std::size_t rows, std::size_t cols) {
  Graph g;
  for (std::size_t i = 0; i < rows * cols; ++i) g.add_node(i);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const NodeId u = r * cols + c;
      if (c + 1 < cols) {
        g.add_edge(u, u + 1);
        g.add_edge(u + 1, u);
      }
      if (r + 1 < rows) {
        g.add_edge(u, u + cols);
        g.add_edge(u + cols, u);
      }
    }
  }
  return g;
}

Graph make_random(std::size_t n, std::size_t edges, std::uint64_t seed) {
  if (n < 2 && edges > 0) throw ConfigError("random graph needs at least 2 nodes");
  if (edges > n * (n - 1)) throw ConfigError("too many edges for a simple digraph");
  Graph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node(i);
  std::uint64_t counter = 0;
  while (g.edge_count() < edges) {
    const NodeId u = below(counter_random(seed, counter++), n);
    const NodeId v = below(counter_random(seed, counter++), n);
    if (u != v) g.add_edge(u, v);
  }
  return g;
}

Graph make_power_law(std::size_t n, std::size_t m, std::uint64_t seed,
                     std::size_t communities, std::size_t locality) {
  if (m == 0) throw ConfigError("power-law generator needs m >= 1");
  if (n < m + 1) throw ConfigError("power-law generator needs n > m");
  if (locality > 100) throw ConfigError("locality is a percentage");
  const std::size_t C = std::max<std::size_t>(communities, 1);
  auto block_of = [&](NodeId v) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(v) * C) / n);
  };
  Graph g;
  // Every edge endpoint appears once in its pool, so a uniform pick is a
  // degree-proportional pick.
  std::vector<NodeId> global;
  std::vector<std::vector<NodeId>> local(communities > 0 ? C : 0);
  global.reserve(2 * n * m);
  auto record = [&](NodeId a, NodeId b) {
    g.add_edge(a, b);
    for (NodeId x : {a, b}) {
      global.push_back(x);
      if (!local.empty()) local[block_of(x)].push_back(x);
    }
  };
  for (std::size_t i = 0; i <= m; ++i) g.add_node(i);
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j < i; ++j) record(i, j);
  }
  std::uint64_t counter = 0;
  std::vector<NodeId> picked;
  for (std::size_t v = m + 1; v < n; ++v) {
    g.add_node(v);
    picked.clear();
    const std::vector<NodeId>* pool_local = local.empty() ? nullptr : &local[block_of(v)];
    std::size_t local_misses = 0;
    while (picked.size() < m) {
      const std::vector<NodeId>* pool = &global;
      // A young block cannot yet offer m distinct targets; fall back to the
      // global pool after repeated collisions.
      if (pool_local && !pool_local->empty() && local_misses < 16 &&
          below(counter_random(seed ^ 0x10ca1, counter), 100) < locality) {
        pool = pool_local;
      }
      const NodeId t = (*pool)[below(counter_random(seed, counter), pool->size())];
      ++counter;
      if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
        picked.push_back(t);
      } else if (pool == pool_local) {
        ++local_misses;
      }
    }
    for (NodeId t : picked) record(v, t);
  }
  return g;
}

Graph generate_graph(const GeneratorSpec& spec) {
  Graph g;
  switch (spec.kind) {
    case GeneratorKind::kGrid: g = make_grid(spec.rows, spec.cols); break;
    case GeneratorKind::kRandom: g = make_random(spec.n, spec.edges, spec.seed); break;
    case GeneratorKind::kPowerLaw:
      g = make_power_law(spec.n, spec.m, spec.seed, spec.communities, spec.locality);
      break;
  }
  assign_labels(g, spec.labels, spec.seed);
  return g;
}

}  // namespace graphroute
