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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graphroute/common.hpp"

namespace graphroute {

enum class QueryKind : std::uint8_t {
  kAggregation = 1,
  kRandomWalk = 2,
  kReachability = 3,
};

std::string_view to_string(QueryKind kind);
QueryKind parse_query_kind(std::string_view s);

inline constexpr double kDefaultRestartProb = 0.15;

// A typed h-hop request. `target` is set iff kind == kReachability.
struct Query {
  std::uint64_t id = 0;
  QueryKind kind = QueryKind::kAggregation;
  NodeId source = 0;
  std::optional<NodeId> target;
  std::uint32_t h = 2;
  std::optional<std::string> label_filter;  // aggregation only
  double restart_prob = kDefaultRestartProb;
  std::uint64_t seed = 0;

  // Throws PreconditionError on a malformed query.
  void validate() const;

  friend bool operator==(const Query&, const Query&) = default;
};

Query make_aggregation(NodeId source, std::uint32_t h,
                       std::optional<std::string> label = std::nullopt);
Query make_random_walk(NodeId source, std::uint32_t h, std::uint64_t seed,
                       double restart_prob = kDefaultRestartProb);
Query make_reachability(NodeId source, NodeId target, std::uint32_t h);

// Kind-specific answer plus the processor-side accounting.
struct QueryResult {
  std::uint64_t query_id = 0;
  QueryKind kind = QueryKind::kAggregation;

  std::uint64_t count = 0;                                // aggregation
  NodeId terminal = 0;                                    // random walk
  std::vector<std::pair<NodeId, std::uint32_t>> visits;   // random walk, sorted
  bool reachable = false;                                 // reachability

  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t edges_scanned = 0;
  std::vector<std::uint32_t> misses_by_server;
  std::uint64_t elapsed_us = 0;  // measured wall time, informational

  // Equality of the answer only (accounting excluded).
  bool same_payload(const QueryResult& other) const;
};

}  // namespace graphroute
