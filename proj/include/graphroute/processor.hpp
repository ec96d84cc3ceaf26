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

#include <memory>

#include "graphroute/graph.hpp"
#include "graphroute/lru_cache.hpp"
#include "graphroute/query.hpp"
#include "graphroute/storage.hpp"

namespace graphroute {

inline constexpr std::size_t kDefaultCacheBytes = std::size_t{4} << 30;

using EntryPtr = std::shared_ptr<const AdjacencyEntry>;

// A query processor: private LRU cache in front of the storage tier plus the
// three h-hop engines. Processors never talk to each other.
class Processor {
 public:
  Processor(StorageClient& storage, std::size_t cache_bytes = kDefaultCacheBytes);

  // Through the cache. Hit: recency bump. Miss: storage get + insert.
  // Propagates NotFoundError.
  EntryPtr fetch(NodeId id);

  QueryResult execute(const Query& q);
  QueryResult run_aggregation(const Query& q);
  QueryResult run_random_walk(const Query& q);
  QueryResult run_reachability(const Query& q);

  bool cache_enabled() const noexcept { return cache_.capacity_bytes() > 0; }
  const LruCache<NodeId, EntryPtr>& cache() const noexcept { return cache_; }
  std::uint64_t total_hits() const noexcept { return hits_; }
  std::uint64_t total_misses() const noexcept { return misses_; }
  void reset_cache();

 private:
  class Session;

  StorageClient& storage_;
  LruCache<NodeId, EntryPtr> cache_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace graphroute
