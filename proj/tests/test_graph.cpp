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


#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>

#include "graphroute/graph.hpp"
#include "test_util.hpp"

namespace graphroute {
namespace {

using testing::TempDir;

std::vector<NodeId> ids_of(const std::vector<Neighbor>& ns) {
  std::vector<NodeId> out;
  for (const auto& n : ns) out.push_back(n.id);
  return out;
}

// Every out edge has its mirror in the other endpoint's in list, no list has
// a repeated id, and the edge count matches a recount.
void expect_symmetric(const Graph& g) {
  std::size_t out_total = 0;
  g.for_each_entry([&](const AdjacencyEntry& e) {
    std::set<NodeId> seen_out, seen_in;
    for (const auto& n : e.out) {
      EXPECT_TRUE(seen_out.insert(n.id).second) << "dup out " << e.node << "->" << n.id;
      const auto in = ids_of(g.entry(n.id).in);
      EXPECT_NE(std::find(in.begin(), in.end(), e.node), in.end())
          << e.node << "->" << n.id << " missing from in list";
    }
    for (const auto& n : e.in) {
      EXPECT_TRUE(seen_in.insert(n.id).second);
      EXPECT_TRUE(g.has_edge(n.id, e.node));
    }
    out_total += e.out.size();
  });
  EXPECT_EQ(out_total, g.edge_count());
}

TEST(EdgeListTest, PathFile) {
  const Graph g = parse_edge_list("1 2\n2 3\n", false);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(ids_of(g.entry(2).in), std::vector<NodeId>{1});
  EXPECT_EQ(ids_of(g.entry(2).out), std::vector<NodeId>{3});
}

TEST(EdgeListTest, EmptyFile) {
  TempDir dir;
  std::ofstream(dir / "empty.txt").close();
  const Graph g = load_edge_list(dir / "empty.txt", false);
  EXPECT_EQ(g.node_count(), 0u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(EdgeListTest, DuplicatesCollapse) {
  EXPECT_EQ(parse_edge_list("1 2\n1 2\n", false).edge_count(), 1u);

  // Random text with many repeats against a std::set recount.
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(0, 30);
  std::string text;
  std::set<std::pair<int, int>> oracle;
  for (int i = 0; i < 2000; ++i) {
    const int u = pick(rng), v = pick(rng);
    text += std::to_string(u) + " " + std::to_string(v) + "\n";
    oracle.emplace(u, v);
  }
  const Graph g = parse_edge_list(text, false);
  EXPECT_EQ(g.edge_count(), oracle.size());
  for (auto [u, v] : oracle) EXPECT_TRUE(g.has_edge(u, v));
  expect_symmetric(g);
}

TEST(EdgeListTest, CommentsLabelsAndSelfLoops) {
  const Graph g = parse_edge_list("# header\n1 2 follows\n\n2 2 self\n", true);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.entry(1).out.at(0).label, "follows");
  EXPECT_TRUE(g.has_edge(2, 2));
  expect_symmetric(g);
}

TEST(EdgeListTest, ParseErrorsCarryLineNumber) {
  try {
    parse_edge_list("1 2\n3\n", false);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_edge_list("1 x\n", false), ParseError);
  EXPECT_THROW(parse_edge_list("1 2 lbl\n", false), ParseError);
  EXPECT_THROW(parse_edge_list("-1 2\n", false), ParseError);
}

TEST(EdgeListTest, WriteLoadRoundTrip) {
  TempDir dir;
  const Graph g = testing::random_digraph(200, 900, 5);
  write_edge_list(g, dir / "g.txt");
  const Graph back = load_edge_list(dir / "g.txt", true);
  // Isolated nodes have no edge line, so compare edge structure only.
  EXPECT_EQ(back.edge_count(), g.edge_count());
  g.for_each_entry([&](const AdjacencyEntry& e) {
    for (const auto& n : e.out) EXPECT_TRUE(back.has_edge(e.node, n.id));
  });
  // Loading the same file twice gives the same graph.
  EXPECT_TRUE(back == load_edge_list(dir / "g.txt", true));
}

TEST(EdgeListTest, NodeLabels) {
  TempDir dir;
  Graph g = parse_edge_list("1 2\n", false);
  std::ofstream(dir / "labels.txt") << "1 person\n7 page\n";
  load_node_labels(g, dir / "labels.txt");
  EXPECT_EQ(g.entry(1).label, "person");
  EXPECT_EQ(g.entry(7).label, "page");
  EXPECT_TRUE(g.entry(7).out.empty());
}

TEST(GraphTest, ByteSizeAccounting) {
  Graph g;
  g.add_node(1, "ab");
  g.add_node(2);
  g.add_edge(1, 2, "xyz");
  const auto& e = g.entry(1);
  EXPECT_EQ(e.byte_size(), AdjacencyEntry::kFixedOverhead + 8 + 2 + 3);
}

TEST(GraphTest, IdsNeverReused) {
  Graph g;
  g.add_node(4);
  EXPECT_THROW(g.add_node(4), PreconditionError);
  apply_update(g, RemoveNode{4});
  EXPECT_FALSE(g.contains(4));
  EXPECT_TRUE(g.was_deleted(4));
  EXPECT_THROW(g.add_node(4), PreconditionError);
  EXPECT_THROW(g.entry(4), NotFoundError);
}

TEST(UpdateTest, AddEdgeReceipt) {
  Graph g = parse_edge_list("1 2\n2 3\n", false);
  const auto r = apply_update(g, AddEdge{1, 3, ""});
  EXPECT_EQ(r.affected, (std::vector<NodeId>{1, 3}));
  EXPECT_EQ(ids_of(g.entry(3).in), (std::vector<NodeId>{2, 1}));
}

TEST(UpdateTest, RemoveNodeEqualsIncidentEdgeRemovals) {
  Graph a = parse_edge_list("1 2\n2 3\n", false);
  Graph b = a;
  const auto r = apply_update(a, RemoveNode{2});
  EXPECT_EQ(r.affected, (std::vector<NodeId>{1, 2, 3}));
  EXPECT_EQ(r.removed, std::vector<NodeId>{2});

  apply_update(b, RemoveEdge{1, 2});
  apply_update(b, RemoveEdge{2, 3});
  EXPECT_EQ(b.edge_count(), a.edge_count());
  EXPECT_EQ(a.entry(1), b.entry(1));
  EXPECT_EQ(a.entry(3), b.entry(3));
}

TEST(UpdateTest, AbsentEdgeIsNoOp) {
  Graph g = parse_edge_list("1 2\n2 3\n", false);
  EXPECT_TRUE(apply_update(g, RemoveEdge{5, 6}).empty());
  EXPECT_TRUE(apply_update(g, AddEdge{1, 2, ""}).empty());  // duplicate
  EXPECT_THROW(apply_update(g, AddEdge{1, 99, ""}), PreconditionError);
  EXPECT_THROW(apply_update(g, RemoveNode{99}), NotFoundError);
}

TEST(UpdateTest, RandomUpdatesKeepSymmetry) {
  Graph g = testing::random_digraph(120, 400, 21);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<NodeId> id(0, 160);
  NodeId next_new = 1000;
  for (int step = 0; step < 2000; ++step) {
    const int op = static_cast<int>(rng() % 4);
    const NodeId u = id(rng), v = id(rng);
    try {
      switch (op) {
        case 0: apply_update(g, AddNode{next_new++, "n"}); break;
        case 1: apply_update(g, AddEdge{u, v, ""}); break;
        case 2: apply_update(g, RemoveEdge{u, v}); break;
        case 3:
          if (step % 50 == 0) apply_update(g, RemoveNode{u});
          break;
      }
    } catch (const PreconditionError&) {
    } catch (const NotFoundError&) {
    }
  }
  expect_symmetric(g);
}

TEST(UpdateTest, ReceiptMerge) {
  UpdateReceipt a{{1, 5}, {5}, {}};
  UpdateReceipt b{{2, 5}, {}, {2}};
  a.merge(b);
  EXPECT_EQ(a.affected, (std::vector<NodeId>{1, 2, 5}));
  EXPECT_EQ(a.added, std::vector<NodeId>{5});
  EXPECT_EQ(a.removed, std::vector<NodeId>{2});
}

}  // namespace
}  // namespace graphroute
