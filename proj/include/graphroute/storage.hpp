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

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "graphroute/graph.hpp"

namespace graphroute {

// Deterministic NodeId -> storage server map. Defaults to id mod S.
class StoragePartitionMap {
 public:
  using PartitionFn = std::function<std::size_t(NodeId, std::size_t)>;

  explicit StoragePartitionMap(std::size_t num_servers,
                               PartitionFn fn = modulo);

  std::size_t num_servers() const noexcept { return num_servers_; }
  std::size_t server_of(NodeId id) const;

  static std::size_t modulo(NodeId id, std::size_t servers) {
    return static_cast<std::size_t>(id % servers);
  }

 private:
  std::size_t num_servers_;
  PartitionFn fn_;
};

// The storage tier: S in-memory key-value partitions holding one
// AdjacencyEntry per node. Reads take a shared lock on the owning partition;
// updates take the exclusive lock.
class StorageTier {
 public:
  explicit StorageTier(StoragePartitionMap map);
  StorageTier(const Graph& graph, StoragePartitionMap map);

  const StoragePartitionMap& partition_map() const noexcept { return map_; }
  std::size_t num_servers() const noexcept { return map_.num_servers(); }

  void put(const AdjacencyEntry& entry);
  void erase(NodeId id);

  // Throws NotFoundError. Increments the owning partition's request counter
  // whether or not the key exists.
  AdjacencyEntry get(NodeId id) const;
  bool contains(NodeId id) const;

  std::size_t entry_count(std::size_t server) const;
  std::size_t total_entries() const;
  std::uint64_t request_count(std::size_t server) const;
  std::uint64_t total_requests() const;
  void reset_counters();

  // Single writer path: mutates the graph, then re-puts (or erases) every
  // entry listed in the receipt.
  UpdateReceipt apply_update(Graph& graph, const GraphUpdate& update);

 private:
  struct Partition {
    mutable std::shared_mutex mu;
    std::unordered_map<NodeId, AdjacencyEntry> entries;
    mutable std::atomic<std::uint64_t> requests{0};
  };

  StoragePartitionMap map_;
  std::vector<std::unique_ptr<Partition>> parts_;
  std::mutex writer_mu_;
};

// What a query processor sees of the storage tier.
class StorageClient {
 public:
  virtual ~StorageClient() = default;
  // Throws NotFoundError for unknown ids, TransportError on link failure.
  virtual AdjacencyEntry get(NodeId id) = 0;
  virtual std::size_t server_of(NodeId id) const = 0;
  virtual std::size_t num_servers() const = 0;
};

// Direct calls into a StorageTier living in the same process.
class InProcStorageClient final : public StorageClient {
 public:
  explicit InProcStorageClient(const StorageTier& tier) : tier_(tier) {}

  AdjacencyEntry get(NodeId id) override { return tier_.get(id); }
  std::size_t server_of(NodeId id) const override {
    return tier_.partition_map().server_of(id);
  }
  std::size_t num_servers() const override { return tier_.num_servers(); }

 private:
  const StorageTier& tier_;
};

}  // namespace graphroute
