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

#include "graphroute/storage.hpp"

namespace graphroute {

StoragePartitionMap::StoragePartitionMap(std::size_t num_servers,
                                         PartitionFn fn)
    : num_servers_(num_servers), fn_(std::move(fn)) {
  if (num_servers_ == 0) throw ConfigError("storage server count must be >= 1");
  if (!fn_) throw ConfigError("partition function is empty");
}

std::size_t StoragePartitionMap::server_of(NodeId id) const {
  const std::size_t s = fn_(id, num_servers_);
  if (s >= num_servers_) {
    throw ConfigError("partition function returned out-of-range server");
  }
  return s;
}

StorageTier::StorageTier(StoragePartitionMap map) : map_(std::move(map)) {
  parts_.reserve(map_.num_servers());
  for (std::size_t i = 0; i < map_.num_servers(); ++i) {
    parts_.push_back(std::make_unique<Partition>());
  }
}

StorageTier::StorageTier(const Graph& graph, StoragePartitionMap map)
    : StorageTier(std::move(map)) {
  graph.for_each_entry([this](const AdjacencyEntry& e) { put(e); });
}

void StorageTier::put(const AdjacencyEntry& entry) {
  auto& p = *parts_[map_.server_of(entry.node)];
  std::unique_lock lock(p.mu);
  p.entries.insert_or_assign(entry.node, entry);
}

void StorageTier::erase(NodeId id) {
  auto& p = *parts_[map_.server_of(id)];
  std::unique_lock lock(p.mu);
  p.entries.erase(id);
}

AdjacencyEntry StorageTier::get(NodeId id) const {
  const auto& p = *parts_[map_.server_of(id)];
  p.requests.fetch_add(1, std::memory_order_relaxed);
  std::shared_lock lock(p.mu);
  auto it = p.entries.find(id);
  if (it == p.entries.end()) throw NotFoundError(id);
  return it->second;
}

bool StorageTier::contains(NodeId id) const {
  const auto& p = *parts_[map_.server_of(id)];
  std::shared_lock lock(p.mu);
  return p.entries.contains(id);
}

std::size_t StorageTier::entry_count(std::size_t server) const {
  const auto& p = *parts_.at(server);
  std::shared_lock lock(p.mu);
  return p.entries.size();
}

std::size_t StorageTier::total_entries() const {
  std::size_t n = 0;
  for (std::size_t s = 0; s < parts_.size(); ++s) n += entry_count(s);
  return n;
}

std::uint64_t StorageTier::request_count(std::size_t server) const {
  return parts_.at(server)->requests.load(std::memory_order_relaxed);
}

std::uint64_t StorageTier::total_requests() const {
  std::uint64_t n = 0;
  for (const auto& p : parts_) n += p->requests.load(std::memory_order_relaxed);
  return n;
}

void StorageTier::reset_counters() {
  for (auto& p : parts_) p->requests.store(0, std::memory_order_relaxed);
}

UpdateReceipt StorageTier::apply_update(Graph& graph, const GraphUpdate& update) {
  std::lock_guard writer(writer_mu_);
  UpdateReceipt r = graphroute::apply_update(graph, update);
  for (NodeId id : r.affected) {
    if (graph.contains(id)) {
      put(graph.entry(id));
    } else {
      erase(id);
    }
  }
  return r;
}

}  // namespace graphroute
