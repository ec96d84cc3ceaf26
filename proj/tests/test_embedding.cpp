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

#include <cmath>
#include <fstream>

#include "graphroute/embedding.hpp"
#include "graphroute/generators.hpp"
#include "test_util.hpp"

namespace graphroute {
namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

EmbedConfig tight(std::size_t D) {
  EmbedConfig cfg;
  cfg.dimensions = D;
  cfg.node_simplex.tolerance = 1e-7;
  cfg.node_simplex.max_iterations = 20000;
  return cfg;
}

TEST(RelativeErrorTest, Examples) {
  EXPECT_DOUBLE_EQ(relative_error(4, 5), 0.25);
  EXPECT_DOUBLE_EQ(relative_error(3, 3), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(2, 0), 1.0);
  EXPECT_THROW(relative_error(0, 1), PreconditionError);
}

TEST(LandmarkEmbedTest, TwoLandmarks) {
  const std::vector<Hops> m = {0, 4, 4, 0};
  const auto c = embed_landmarks(m, 2, 100, tight(2));
  const double e = dist2(std::span(c).subspan(0, 2), std::span(c).subspan(2, 2));
  EXPECT_NEAR(e, 4.0, 0.4);
  const auto pairs = usable_pairs(m, 2, 100);
  EXPECT_NEAR(landmark_objective(pairs, c, 2, ErrorAggregation::kSumSquared), 0.0, 1e-6);
}

TEST(LandmarkEmbedTest, RightTriangleIsEmbeddable) {
  const std::vector<Hops> m = {0, 3, 4, 3, 0, 5, 4, 5, 0};
  const auto c = embed_landmarks(m, 3, 100, tight(2));
  const auto pairs = usable_pairs(m, 3, 100);
  EXPECT_EQ(pairs.size(), 3u);
  EXPECT_LT(landmark_objective(pairs, c, 2, ErrorAggregation::kSumSquared), 0.01);
  // Geometric check against the reference lengths.
  auto at = [&](int i) { return std::span<const double>(c).subspan(static_cast<std::size_t>(i) * 2, 2); };
  EXPECT_NEAR(dist2(at(0), at(1)), 3.0, 0.15);
  EXPECT_NEAR(dist2(at(0), at(2)), 4.0, 0.2);
  EXPECT_NEAR(dist2(at(1), at(2)), 5.0, 0.25);
}

TEST(LandmarkEmbedTest, SingleLandmarkAtOrigin) {
  const std::vector<Hops> m = {0};
  EXPECT_EQ(embed_landmarks(m, 1, 10, tight(3)), std::vector<double>(3, 0.0));
}

TEST(LandmarkEmbedTest, AllPairsUnreachable) {
  const std::vector<Hops> m = {0, 9, 9, 0};
  EXPECT_THROW(embed_landmarks(m, 2, 9, tight(2)), EmbeddingError);
  // Unreachable and zero pairs are excluded from the objective.
  const std::vector<Hops> m3 = {0, 9, 2, 9, 0, 0, 2, 0, 0};
  const auto pairs = usable_pairs(m3, 3, 9);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].a, 0u);
  EXPECT_EQ(pairs[0].b, 2u);
}

TEST(LandmarkEmbedTest, PlainSumAggregation) {
  const std::vector<Hops> m = {0, 2, 2, 0};
  const std::vector<double> c = {0, 0, 3, 0};
  const auto pairs = usable_pairs(m, 2, 10);
  EXPECT_DOUBLE_EQ(landmark_objective(pairs, c, 2, ErrorAggregation::kSum), 0.5);
  EXPECT_DOUBLE_EQ(landmark_objective(pairs, c, 2, ErrorAggregation::kSumSquared), 0.25);
  EXPECT_DOUBLE_EQ(mean_landmark_error(m, 2, 10, c, 2), 0.5);
}

TEST(NodeEmbedTest, LandmarkItself) {
  const std::vector<double> lc = {0, 0, 4, 0, 0, 4};
  const std::vector<Hops> d = {2, 0, 5};
  const auto p = embed_node(d, 50, lc, 2, 1, tight(2));
  EXPECT_FALSE(p.flagged);
  EXPECT_NEAR(p.coords[0], 4.0, 1e-9);
  EXPECT_NEAR(p.coords[1], 0.0, 1e-9);
}

TEST(NodeEmbedTest, EquidistantLandsOnBisector) {
  const std::vector<double> lc = {0, 0, 4, 0};
  const std::vector<Hops> d = {2, 2};
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    const auto p = embed_node(d, 50, lc, 2, seed, tight(2));
    EXPECT_NEAR(p.coords[0], 2.0, 1e-3) << "seed " << seed;
  }
}

TEST(NodeEmbedTest, SingleConstraintNorm) {
  const std::vector<double> lc = {1, 1, 1, 9, 9, 9};
  const std::vector<Hops> d = {3, 50};
  const auto p = embed_node(d, 50, lc, 3, 7, tight(3));
  EXPECT_NEAR(dist2(p.coords, std::span<const double>(lc).subspan(0, 3)), 3.0, 1e-3);
}

TEST(NodeEmbedTest, UnreachableIsFlaggedInsideBox) {
  const std::vector<double> lc = {0, 0, 4, 2};
  const std::vector<Hops> d = {50, 50};
  const auto p = embed_node(d, 50, lc, 2, 9, tight(2));
  EXPECT_TRUE(p.flagged);
  EXPECT_GE(p.coords[0], 0.0);
  EXPECT_LE(p.coords[0], 4.0);
  EXPECT_GE(p.coords[1], 0.0);
  EXPECT_LE(p.coords[1], 2.0);
}

TEST(NodeEmbedTest, Deterministic) {
  const std::vector<double> lc = {0, 0, 0, 5, 1, 0, 2, 2, 3};
  const std::vector<Hops> d = {2, 3, 4};
  const auto a = embed_node(d, 50, lc, 3, 42, EmbedConfig{});
  const auto b = embed_node(d, 50, lc, 3, 42, EmbedConfig{});
  EXPECT_EQ(a.coords, b.coords);  // bit-for-bit
}

class EmbeddingTableTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    graph_ = new Graph(make_power_law(600, 2, 4, 6));
    index_ = new LandmarkIndex(LandmarkIndex::build(*graph_, {.target_count = 12}));
    EmbedConfig cfg;
    cfg.dimensions = 4;
    cfg.threads = 2;
    table_ = new EmbeddingTable(EmbeddingTable::build(*graph_, *index_, cfg));
  }
  static void TearDownTestSuite() {
    delete table_;
    delete index_;
    delete graph_;
  }
  static Graph* graph_;
  static LandmarkIndex* index_;
  static EmbeddingTable* table_;
};
Graph* EmbeddingTableTest::graph_ = nullptr;
LandmarkIndex* EmbeddingTableTest::index_ = nullptr;
EmbeddingTable* EmbeddingTableTest::table_ = nullptr;

TEST_F(EmbeddingTableTest, EveryNodeHasFiniteCoords) {
  EXPECT_EQ(table_->node_count(), graph_->node_count());
  EXPECT_EQ(table_->dimensions(), 4u);
  for (NodeId id : graph_->node_ids()) {
    const auto c = table_->coords_of(id);
    ASSERT_TRUE(c.has_value());
    ASSERT_EQ(c->size(), 4u);
    for (double v : *c) EXPECT_TRUE(std::isfinite(v));
  }
  EXPECT_FALSE(table_->coords_of(123456).has_value());
}

TEST_F(EmbeddingTableTest, LandmarksSitOnTheirCoordinates) {
  const auto& ls = index_->landmarks().landmarks;
  for (std::size_t l = 0; l < ls.size(); ++l) {
    const auto c = *table_->coords_of(ls[l]);
    const auto want = table_->landmark_coords().subspan(l * 4, 4);
    EXPECT_TRUE(std::equal(c.begin(), c.end(), want.begin()));
  }
}

TEST_F(EmbeddingTableTest, ThreadCountDoesNotChangeResult) {
  EmbedConfig cfg;
  cfg.dimensions = 4;
  cfg.threads = 1;
  EXPECT_TRUE(EmbeddingTable::build(*graph_, *index_, cfg) == *table_);
}

TEST_F(EmbeddingTableTest, SnapshotRoundTrip) {
  testing::TempDir dir;
  table_->save(dir / "e.emb");
  const auto back = EmbeddingTable::load(dir / "e.emb");
  EXPECT_TRUE(back == *table_);
  EXPECT_EQ(back.bytes(), table_->bytes());
  std::ofstream(dir / "bad.emb") << "garbage";
  EXPECT_THROW(EmbeddingTable::load(dir / "bad.emb"), Error);
}

TEST_F(EmbeddingTableTest, IsolatedNodeFlagged) {
  Graph g = *graph_;
  g.add_node(99999);
  auto idx = LandmarkIndex::build(g, {.target_count = 12});
  EmbedConfig cfg;
  cfg.dimensions = 4;
  const auto t = EmbeddingTable::build(g, idx, cfg);
  EXPECT_GE(t.flagged_count(), 1u);
  const auto [lo, hi] = t.landmark_bounds();
  const auto c = *t.coords_of(99999);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_GE(c[i], lo[i]);
    EXPECT_LE(c[i], hi[i]);
  }
}

TEST_F(EmbeddingTableTest, RefreshPlacesNewNodes) {
  Graph g = *graph_;
  LandmarkIndex idx = *index_;
  EmbeddingTable t = *table_;
  auto r = apply_update(g, AddNode{7777, ""});
  r.merge(apply_update(g, AddEdge{7777, index_->landmarks().landmarks[0], ""}));
  const auto stats = idx.refresh_after_update(g, r);
  t.refresh_after_update(g, idx, stats);
  ASSERT_TRUE(t.coords_of(7777).has_value());
  // One hop from landmark 0: placement pulls it near that landmark.
  const auto c = *t.coords_of(7777);
  const auto l0 = t.landmark_coords().subspan(0, 4);
  EXPECT_LT(dist2(c, l0), 2.0);

  const auto r2 = apply_update(g, RemoveNode{7777});
  t.refresh_after_update(g, idx, idx.refresh_after_update(g, r2));
  EXPECT_FALSE(t.coords_of(7777).has_value());
}

}  // namespace
}  // namespace graphroute
