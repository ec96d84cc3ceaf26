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

#include "graphroute/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace graphroute {

std::size_t AdjacencyEntry::byte_size() const noexcept {
  std::size_t bytes = kFixedOverhead + label.size();
  for (const auto& n : out) bytes += 8 + n.label.size();
  for (const auto& n : in) bytes += 8 + n.label.size();
  return bytes;
}

namespace {

template <class Vec, class Pred>
bool erase_first(Vec& v, Pred pred) {
  auto it = std::find_if(v.begin(), v.end(), pred);
  if (it == v.end()) return false;
  v.erase(it);
  return true;
}

}  // namespace

bool Graph::contains(NodeId id) const {
  auto it = index_.find(id);
  return it != index_.end() && alive_[it->second];
}

bool Graph::was_deleted(NodeId id) const {
  auto it = index_.find(id);
  return it != index_.end() && !alive_[it->second];
}

std::optional<Slot> Graph::slot_of(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end() || !alive_[it->second]) return std::nullopt;
  return it->second;
}

Slot Graph::slot_or_throw(NodeId id) const {
  auto s = slot_of(id);
  if (!s) throw NotFoundError(id);
  return *s;
}

const AdjacencyEntry& Graph::entry(NodeId id) const {
  return entries_[slot_or_throw(id)];
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto su = slot_of(u);
  auto sv = slot_of(v);
  if (!su || !sv) return false;
  // Scan the shorter of out(u) / in(v).
  const auto& out = out_slots_[*su];
  const auto& in = in_slots_[*sv];
  if (out.size() <= in.size()) {
    return std::find(out.begin(), out.end(), *sv) != out.end();
  }
  return std::find(in.begin(), in.end(), *su) != in.end();
}

Slot Graph::add_node(NodeId id, std::string label) {
  if (index_.contains(id)) {
    throw PreconditionError(
        (alive_[index_.at(id)] ? "node already exists: "
                               : "node id was deleted and cannot be reused: ") +
        std::to_string(id));
  }
  const auto s = static_cast<Slot>(entries_.size());
  entries_.push_back(AdjacencyEntry{id, std::move(label), {}, {}});
  out_slots_.emplace_back();
  in_slots_.emplace_back();
  alive_.push_back(true);
  index_.emplace(id, s);
  ++alive_count_;
  return s;
}

Slot Graph::ensure_node(NodeId id) {
  auto it = index_.find(id);
  if (it != index_.end()) {
    if (!alive_[it->second]) {
      throw PreconditionError("node id was deleted and cannot be reused: " +
                              std::to_string(id));
    }
    return it->second;
  }
  return add_node(id);
}

void Graph::set_label(NodeId id, std::string label) {
  entries_[slot_or_throw(id)].label = std::move(label);
}

bool Graph::add_edge(NodeId u, NodeId v, std::string label) {
  auto su = slot_of(u);
  auto sv = slot_of(v);
  if (!su || !sv) {
    throw PreconditionError("edge endpoint missing: " + std::to_string(u) +
                            " -> " + std::to_string(v));
  }
  if (has_edge(u, v)) return false;
  entries_[*su].out.push_back(Neighbor{v, label});
  entries_[*sv].in.push_back(Neighbor{u, std::move(label)});
  out_slots_[*su].push_back(*sv);
  in_slots_[*sv].push_back(*su);
  ++edge_count_;
  return true;
}

bool Graph::remove_edge(NodeId u, NodeId v) {
  if (!has_edge(u, v)) return false;
  const Slot su = *slot_of(u);
  const Slot sv = *slot_of(v);
  erase_first(entries_[su].out, [v](const Neighbor& n) { return n.id == v; });
  erase_first(entries_[sv].in, [u](const Neighbor& n) { return n.id == u; });
  erase_first(out_slots_[su], [sv](Slot x) { return x == sv; });
  erase_first(in_slots_[sv], [su](Slot x) { return x == su; });
  --edge_count_;
  return true;
}

std::vector<NodeId> Graph::remove_node(NodeId id) {
  const Slot s = slot_or_throw(id);
  std::vector<NodeId> touched;
  const auto out = entries_[s].out;
  const auto in = entries_[s].in;
  for (const auto& n : out) {
    remove_edge(id, n.id);
    touched.push_back(n.id);
  }
  for (const auto& n : in) {
    remove_edge(n.id, id);
    touched.push_back(n.id);
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  std::erase(touched, id);  // self-loop
  alive_[s] = false;
  entries_[s].label.clear();
  --alive_count_;
  return touched;
}

std::vector<NodeId> Graph::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(alive_count_);
  for_each_entry([&](const AdjacencyEntry& e) { ids.push_back(e.node); });
  return ids;
}

bool operator==(const Graph& a, const Graph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) {
    return false;
  }
  for (Slot s = 0; s < a.slot_count(); ++s) {
    if (!a.alive(s)) continue;
    const auto& ea = a.entry_at(s);
    auto sb = b.slot_of(ea.node);
    if (!sb || !(b.entry_at(*sb) == ea)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

NodeId parse_id(std::string_view token, std::size_t line_no) {
  NodeId id = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line_no, "invalid node id '" + std::string(token) + "'");
  }
  return id;
}

template <class LineFn>
void for_each_line(std::string_view text, LineFn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && line[first] != '#') {
      fn(line, line_no);
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Graph parse_edge_list(std::string_view text, bool has_labels) {
  Graph g;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto tok = split_ws(line);
    if (tok.size() < 2 || tok.size() > 3) {
      throw ParseError(line_no, "expected 'src dst [label]'");
    }
    if (tok.size() == 3 && !has_labels) {
      throw ParseError(line_no, "unexpected edge label (labels disabled)");
    }
    const NodeId u = parse_id(tok[0], line_no);
    const NodeId v = parse_id(tok[1], line_no);
    g.ensure_node(u);
    g.ensure_node(v);
    g.add_edge(u, v, tok.size() == 3 ? std::string(tok[2]) : std::string{});
  });
  return g;
}

Graph load_edge_list(const std::filesystem::path& path, bool has_labels) {
  return parse_edge_list(read_file(path), has_labels);
}

void load_node_labels(Graph& graph, const std::filesystem::path& path) {
  const auto text = read_file(path);
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto tok = split_ws(line);
    if (tok.size() != 2) throw ParseError(line_no, "expected 'node_id label'");
    const NodeId id = parse_id(tok[0], line_no);
    graph.ensure_node(id);
    graph.set_label(id, std::string(tok[1]));
  });
}

void write_edge_list(const Graph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  graph.for_each_entry([&](const AdjacencyEntry& e) {
    for (const auto& n : e.out) {
      out << e.node << ' ' << n.id;
      if (!n.label.empty()) out << ' ' << n.label;
      out << '\n';
    }
  });
}

// ---------------------------------------------------------------------------
// Updates

void UpdateReceipt::merge(const UpdateReceipt& other) {
  auto merge_sorted = [](std::vector<NodeId>& dst, const std::vector<NodeId>& src) {
    std::vector<NodeId> out;
    out.reserve(dst.size() + src.size());
    std::set_union(dst.begin(), dst.end(), src.begin(), src.end(),
                   std::back_inserter(out));
    dst = std::move(out);
  };
  merge_sorted(affected, other.affected);
  merge_sorted(added, other.added);
  merge_sorted(removed, other.removed);
}

UpdateReceipt apply_update(Graph& graph, const GraphUpdate& update) {
  UpdateReceipt r;
  std::visit(
      [&](const auto& u) {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, AddNode>) {
          graph.add_node(u.id, u.label);
          r.affected = {u.id};
          r.added = {u.id};
        } else if constexpr (std::is_same_v<T, AddEdge>) {
          if (graph.add_edge(u.src, u.dst, u.label)) {
            r.affected = {std::min(u.src, u.dst), std::max(u.src, u.dst)};
            if (u.src == u.dst) r.affected.resize(1);
          }
        } else if constexpr (std::is_same_v<T, RemoveEdge>) {
          if (graph.remove_edge(u.src, u.dst)) {
            r.affected = {std::min(u.src, u.dst), std::max(u.src, u.dst)};
            if (u.src == u.dst) r.affected.resize(1);
          }
        } else {
          r.affected = graph.remove_node(u.id);
          r.affected.insert(
              std::lower_bound(r.affected.begin(), r.affected.end(), u.id), u.id);
          r.removed = {u.id};
        }
      },
      update);
  return r;
}

}  // namespace graphroute
