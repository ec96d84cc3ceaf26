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
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "graphroute/common.hpp"

namespace graphroute {

struct Neighbor {
  NodeId id = 0;
  std::string label;  // empty when the edge is unlabeled

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// One key-value record of the storage tier: the node's label plus both
// neighbor directions. Labels are stored inline in the value.
struct AdjacencyEntry {
  NodeId node = 0;
  std::string label;
  std::vector<Neighbor> out;
  std::vector<Neighbor> in;

  static constexpr std::size_t kFixedOverhead = 48;

  // Cache accounting size: fixed overhead + 8 bytes per neighbor id + label
  // bytes (node and edge labels).
  std::size_t byte_size() const noexcept;

  friend bool operator==(const AdjacencyEntry&,
                         const AdjacencyEntry&) = default;
};

// Labeled directed graph with bi-directed adjacency storage. Every node owns
// a dense Slot; slots of deleted nodes stay allocated (dead) so ids and slots
// are never reused within a run.
class Graph {
 public:
  Graph() = default;

  std::size_t node_count() const noexcept { return alive_count_; }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t slot_count() const noexcept { return entries_.size(); }

  bool contains(NodeId id) const;
  bool was_deleted(NodeId id) const;
  std::optional<Slot> slot_of(NodeId id) const;
  bool alive(Slot s) const { return alive_[s]; }
  NodeId id_at(Slot s) const { return entries_[s].node; }

  // Throws NotFoundError.
  const AdjacencyEntry& entry(NodeId id) const;
  const AdjacencyEntry& entry_at(Slot s) const { return entries_[s]; }

  std::span<const Slot> out_slots(Slot s) const { return out_slots_[s]; }
  std::span<const Slot> in_slots(Slot s) const { return in_slots_[s]; }
  std::size_t degree(Slot s) const {
    return out_slots_[s].size() + in_slots_[s].size();
  }

  bool has_edge(NodeId u, NodeId v) const;

  // Returns the slot of the new node. Throws PreconditionError when the id
  // is live or was deleted earlier in this run.
  Slot add_node(NodeId id, std::string label = {});
  // Adds the node if it is absent; returns its slot either way.
  Slot ensure_node(NodeId id);
  void set_label(NodeId id, std::string label);

  // Returns false when the edge already exists (duplicates collapse).
  // Throws PreconditionError when an endpoint is missing.
  bool add_edge(NodeId u, NodeId v, std::string label = {});
  // Returns false when the edge is absent.
  bool remove_edge(NodeId u, NodeId v);
  // Removes every incident edge, then the node. Returns the distinct
  // neighbor ids that lost an edge. Throws NotFoundError.
  std::vector<NodeId> remove_node(NodeId id);

  // Live entries in slot order.
  template <class F>
  void for_each_entry(F&& f) const {
    for (Slot s = 0; s < entries_.size(); ++s) {
      if (alive_[s]) f(entries_[s]);
    }
  }

  std::vector<NodeId> node_ids() const;

  // Structural equality: same live ids with equal entries (slot order is
  // ignored).
  friend bool operator==(const Graph& a, const Graph& b);

 private:
  Slot slot_or_throw(NodeId id) const;

  std::vector<AdjacencyEntry> entries_;
  std::vector<std::vector<Slot>> out_slots_;
  std::vector<std::vector<Slot>> in_slots_;
  std::vector<bool> alive_;
  std::unordered_map<NodeId, Slot> index_;
  std::size_t alive_count_ = 0;
  std::size_t edge_count_ = 0;
};

// Edge list text: "src dst" or "src dst edge_label" per line, '#' comments.
// Throws ParseError carrying the 1-based line number.
Graph load_edge_list(const std::filesystem::path& path, bool has_labels);
Graph parse_edge_list(std::string_view text, bool has_labels);

// Node label file: "node_id label" per line. Unknown ids are added as
// isolated nodes.
void load_node_labels(Graph& graph, const std::filesystem::path& path);

void write_edge_list(const Graph& graph, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Updates

struct AddNode {
  NodeId id;
  std::string label;
};
struct AddEdge {
  NodeId src;
  NodeId dst;
  std::string label;
};
struct RemoveEdge {
  NodeId src;
  NodeId dst;
};
struct RemoveNode {
  NodeId id;
};

using GraphUpdate = std::variant<AddNode, AddEdge, RemoveEdge, RemoveNode>;

// Nodes whose AdjacencyEntry changed (sorted, unique), plus the ids that were
// created or deleted so downstream indexes can grow or drop rows.
struct UpdateReceipt {
  std::vector<NodeId> affected;
  std::vector<NodeId> added;
  std::vector<NodeId> removed;

  bool empty() const { return affected.empty(); }
  void merge(const UpdateReceipt& other);
};

// Mutates only the graph; see StorageTier::apply_update for the storage side.
UpdateReceipt apply_update(Graph& graph, const GraphUpdate& update);

}  // namespace graphroute
