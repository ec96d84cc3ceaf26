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
#include <string>
#include <vector>

#include "graphroute/graph.hpp"
#include "graphroute/query.hpp"

namespace graphroute {

struct WorkloadSpec {
  std::size_t num_hotspots = 100;
  std::size_t queries_per_hotspot = 10;
  std::uint32_t r = 2;  // hotspot radius (bi-directed hops)
  std::uint32_t h = 2;  // traversal hops
  std::uint64_t seed = 1;
  double restart_prob = kDefaultRestartProb;
  std::optional<std::string> label_filter;  // applied to aggregations

  // Text form "hotspots=100,per=10,r=2,h=2,seed=1".
  static WorkloadSpec parse(std::string_view text);
  std::string to_string() const;
};

struct Workload {
  WorkloadSpec spec;
  std::vector<Query> queries;          // hotspot groups, consecutive
  std::vector<NodeId> centers;         // one per hotspot
  std::vector<std::uint32_t> hotspot;  // per query
  std::size_t resampled_centers = 0;   // centers rejected for a small ball
};

// Centers are drawn uniformly without replacement; each hotspot takes
// `queries_per_hotspot` distinct nodes of the center's r-hop ball. Kinds
// cycle aggregation, random walk, reachability by global query index; a
// reachability target is another node of the same ball. Throws ConfigError
// when the graph cannot supply enough hotspots.
Workload generate_workload(const Graph& graph, const WorkloadSpec& spec);

// Plain text, one query per line; see docs/file-formats.md.
void save_workload(const Workload& w, const std::filesystem::path& path);
Workload load_workload(const std::filesystem::path& path);

}  // namespace graphroute
