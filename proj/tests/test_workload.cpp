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
#include <map>

#include "graphroute/generators.hpp"
#include "graphroute/landmark.hpp"
#include "graphroute/workload.hpp"
#include "test_util.hpp"

namespace graphroute {
namespace {

TEST(WorkloadTest, SingleHotspotDiameter) {
  const Graph g = make_grid(60, 60);
  const auto w = generate_workload(g, {.num_hotspots = 1, .queries_per_hotspot = 10, .r = 2});
  ASSERT_EQ(w.queries.size(), 10u);
  for (const auto& a : w.queries) {
    const auto d = bfs_distances(g, a.source);
    for (const auto& b : w.queries) EXPECT_LE(d.at(b.source), 4u);
  }
}

TEST(WorkloadTest, SourcesWithinRadiusOfCenter) {
  const Graph g = make_power_law(3000, 2, 6, 30);
  const WorkloadSpec spec{.num_hotspots = 40, .queries_per_hotspot = 10, .r = 2, .seed = 5};
  const auto w = generate_workload(g, spec);
  ASSERT_EQ(w.centers.size(), 40u);
  ASSERT_EQ(w.queries.size(), 400u);
  std::set<NodeId> centers(w.centers.begin(), w.centers.end());
  EXPECT_EQ(centers.size(), 40u);  // without replacement
  for (std::size_t h = 0; h < 40; ++h) {
    const auto d = bfs_distances(g, w.centers[h]);
    std::set<NodeId> sources;
    for (std::size_t k = 0; k < 10; ++k) {
      const std::size_t i = h * 10 + k;
      // Grouped consecutively.
      EXPECT_EQ(w.hotspot[i], h);
      const auto& q = w.queries[i];
      EXPECT_EQ(q.id, i);
      ASSERT_TRUE(d.contains(q.source));
      EXPECT_LE(d.at(q.source), 2u);
      sources.insert(q.source);
      if (q.target) {
        ASSERT_TRUE(d.contains(*q.target));
        EXPECT_LE(d.at(*q.target), 2u);
      }
      EXPECT_NO_THROW(q.validate());
    }
    EXPECT_EQ(sources.size(), 10u);  // distinct nodes per hotspot
  }
}

TEST(WorkloadTest, DefaultSpecKindSplit) {
  const Graph g = make_power_law(100000, 4, 1, 100);
  const auto w = generate_workload(g, WorkloadSpec{});
  ASSERT_EQ(w.queries.size(), 1000u);
  std::map<QueryKind, int> kinds;
  for (const auto& q : w.queries) ++kinds[q.kind];
  EXPECT_EQ(kinds[QueryKind::kAggregation], 334);
  EXPECT_EQ(kinds[QueryKind::kRandomWalk], 333);
  EXPECT_EQ(kinds[QueryKind::kReachability], 333);
}

TEST(WorkloadTest, Deterministic) {
  const Graph g = make_power_law(2000, 3, 2);
  const WorkloadSpec spec{.num_hotspots = 20, .seed = 9};
  const auto a = generate_workload(g, spec), b = generate_workload(g, spec);
  EXPECT_EQ(a.queries, b.queries);
  EXPECT_EQ(a.centers, b.centers);
  const auto c = generate_workload(g, WorkloadSpec{.num_hotspots = 20, .seed = 10});
  EXPECT_NE(a.centers, c.centers);
}

TEST(WorkloadTest, SmallBallsAreResampled) {
  // 30 isolated nodes plus a grid: isolated centers have a 1-node ball.
  Graph g = make_grid(10, 10);
  for (NodeId i = 1000; i < 1030; ++i) g.add_node(i);
  const auto w = generate_workload(g, {.num_hotspots = 50, .queries_per_hotspot = 5, .r = 1});
  EXPECT_GT(w.resampled_centers, 0u);
  for (NodeId c : w.centers) EXPECT_LT(c, 1000u);
}

TEST(WorkloadTest, TooSmallGraph) {
  const Graph g = make_grid(3, 3);
  EXPECT_THROW(generate_workload(g, {.num_hotspots = 10}), ConfigError);
  EXPECT_THROW(generate_workload(g, {.num_hotspots = 2, .queries_per_hotspot = 50}), ConfigError);
  EXPECT_THROW(generate_workload(g, {.num_hotspots = 2, .queries_per_hotspot = 0}), ConfigError);
}

TEST(WorkloadTest, SpecText) {
  const auto s = WorkloadSpec::parse("hotspots=5,per=3,r=1,h=4,seed=8,restart=0.3,label=L1");
  EXPECT_EQ(s.num_hotspots, 5u);
  EXPECT_EQ(s.queries_per_hotspot, 3u);
  EXPECT_EQ(s.r, 1u);
  EXPECT_EQ(s.h, 4u);
  EXPECT_EQ(s.seed, 8u);
  EXPECT_DOUBLE_EQ(s.restart_prob, 0.3);
  EXPECT_EQ(s.label_filter, std::optional<std::string>("L1"));
  EXPECT_EQ(WorkloadSpec::parse(s.to_string()).to_string(), s.to_string());
  EXPECT_THROW(WorkloadSpec::parse("hotspots"), ConfigError);
  EXPECT_THROW(WorkloadSpec::parse("colour=3"), ConfigError);
}

TEST(WorkloadTest, FileRoundTrip) {
  testing::TempDir dir;
  const Graph g = make_power_law(1500, 3, 3);
  const auto w = generate_workload(
      g, WorkloadSpec::parse("hotspots=12,per=6,r=2,h=3,seed=4,restart=0.25,label=L0"));
  save_workload(w, dir / "w.txt");
  const auto back = load_workload(dir / "w.txt");
  EXPECT_EQ(back.queries, w.queries);
  EXPECT_EQ(back.centers, w.centers);
  EXPECT_EQ(back.hotspot, w.hotspot);
  EXPECT_EQ(back.resampled_centers, w.resampled_centers);
  EXPECT_EQ(back.spec.to_string(), w.spec.to_string());

  std::ofstream(dir / "bad.txt") << "# graphroute-workload v1 hotspots=1\n0 0 5 bogus 1 - 2 0 0.15 -\n";
  EXPECT_THROW(load_workload(dir / "bad.txt"), Error);
  std::ofstream(dir / "nomagic.txt") << "hello\n";
  EXPECT_THROW(load_workload(dir / "nomagic.txt"), Error);
}

}  // namespace
}  // namespace graphroute
