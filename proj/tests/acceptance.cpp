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


// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Oracles here are written independently of the library.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <list>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "graphroute/embedding.hpp"
#include "graphroute/experiment.hpp"
#include "graphroute/generators.hpp"
#include "graphroute/lru_cache.hpp"
#include "graphroute/processor.hpp"
#include "graphroute/storage.hpp"

namespace graphroute {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Every simulated run goes through here so criterion 9 sees all of them.
struct ConservationLog {
  std::size_t runs = 0;
  std::size_t violations = 0;
  std::size_t incomplete = 0;
} conservation;

RunMetrics checked(const ExperimentResult& r, std::size_t submitted) {
  for (const auto& m : r.runs) {
    ++conservation.runs;
    conservation.violations += m.conservation_violations;
    std::size_t done = 0;
    for (auto c : m.completed_per_processor) done += c;
    if (done != submitted || m.total_queries != submitted) ++conservation.incomplete;
  }
  return r.runs.back();
}

RunMetrics run(const ExperimentConfig& cfg, const Graph& g, const Workload& w,
               const Artifacts& art) {
  return checked(run_experiment(cfg, g, w, art), w.queries.size());
}

// Hop distances along out-edges (or both directions when `both`).
std::unordered_map<NodeId, std::uint32_t> oracle_bfs(const Graph& g, NodeId src, bool both,
                                                     std::uint32_t limit = ~0u) {
  std::unordered_map<NodeId, std::uint32_t> dist{{src, 0}};
  std::deque<NodeId> q{src};
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop_front();
    const auto du = dist[u];
    if (du == limit) continue;
    const auto& e = g.entry(u);
    auto visit = [&](const std::vector<Neighbor>& ns) {
      for (const auto& n : ns) {
        if (dist.emplace(n.id, du + 1).second) q.push_back(n.id);
      }
    };
    visit(e.out);
    if (both) visit(e.in);
  }
  return dist;
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  std::size_t checked_q = 0, mismatches = 0;
  std::mt19937_64 rng(101);
  const std::vector<Graph> graphs = {make_random(1000, 2600, 5), make_power_law(800, 2, 6)};
  for (const Graph& g : graphs) {
    StorageTier tier(g, StoragePartitionMap(3));
    InProcStorageClient client(tier);
    Processor proc(client, 64 << 10);  // small cache: evictions mid-stream
    const auto ids = g.node_ids();
    for (int i = 0; i < 500; ++i) {
      const NodeId s = ids[rng() % ids.size()];
      const auto h = static_cast<std::uint32_t>(1 + rng() % 3);
      const auto dist = oracle_bfs(g, s, false, h);
      const std::uint64_t expect = dist.size() - 1;
      if (proc.execute(make_aggregation(s, h)).count != expect) ++mismatches;
      ++checked_q;
    }
    for (int i = 0; i < 500; ++i) {
      const NodeId s = ids[rng() % ids.size()];
      // Half of the targets are drawn from the (h+1)-ball to get both answers.
      const auto h = static_cast<std::uint32_t>(1 + rng() % 4);
      NodeId t = ids[rng() % ids.size()];
      if (i % 2 == 0) {
        const auto ball = oracle_bfs(g, s, true, h + 1);
        auto it = ball.begin();
        std::advance(it, static_cast<long>(rng() % ball.size()));
        t = it->first;
      }
      const auto dist = oracle_bfs(g, s, false, h);
      const bool expect = dist.contains(t);
      if (proc.execute(make_reachability(s, t, h)).reachable != expect) ++mismatches;
      ++checked_q;
    }
  }
  const double secs = seconds_since(t0);
  report(1, mismatches == 0 && checked_q == 2000 && secs < 60.0,
         "aggregation and reachability match brute-force BFS",
         fmt("%zu queries, %zu mismatches, %.1fs", checked_q, mismatches, secs));
}

void criterion2() {
  const Graph g = make_power_law(3000, 3, 12, 30, 90);
  const Workload w = generate_workload(g, WorkloadSpec::parse("hotspots=40,per=10,seed=8"));
  ExperimentConfig cfg;
  cfg.router.num_processors = 4;
  cfg.cache_bytes = 512 << 10;
  cfg.landmarks.target_count = 24;
  cfg.embed.dimensions = 4;
  cfg.router.strategy = Strategy::kEmbed;
  const Artifacts art = build_artifacts(g, cfg);

  std::vector<QueryResult> base;
  std::size_t diffs = 0, walks = 0;
  for (Strategy s : {Strategy::kNextReady, Strategy::kHash, Strategy::kLandmark,
                     Strategy::kEmbed, Strategy::kNoCache}) {
    cfg.router.strategy = s;
    const auto r = run_experiment(cfg, g, w, art);
    checked(r, w.queries.size());
    if (base.empty()) {
      base = r.results;
      continue;
    }
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (!base[i].same_payload(r.results[i])) ++diffs;
    }
  }
  for (const auto& q : w.queries) walks += q.kind == QueryKind::kRandomWalk;
  report(2, diffs == 0 && walks > 0, "identical results under all five strategies",
         fmt("%zu queries (%zu random walks), %zu differing payloads", base.size(), walks,
             diffs));
}

void criterion3() {
  const Graph g = make_power_law(5000, 3, 21, 50, 80);
  const auto idx = LandmarkIndex::build(g, {.target_count = 32});
  const auto& dist = idx.distances();
  const Hops inf = dist.unreachable();
  const auto ids = g.node_ids();
  std::mt19937_64 rng(33);
  std::size_t violations = 0, pairs = 0, checks = 0;
  for (int i = 0; i < 1000; ++i) {
    const NodeId u = ids[rng() % ids.size()], v = ids[rng() % ids.size()];
    const auto exact = oracle_bfs(g, u, true);
    ++pairs;
    const auto ru = dist.row(*idx.row_of(u));
    const auto rv = dist.row(*idx.row_of(v));
    const auto it = exact.find(v);
    for (std::size_t l = 0; l < ru.size(); ++l) {
      if (ru[l] == inf || rv[l] == inf) continue;
      ++checks;
      // Both ends reach l, so u and v are connected.
      if (it == exact.end()) {
        ++violations;
        continue;
      }
      const long d = it->second;
      const long lo = std::labs(static_cast<long>(ru[l]) - static_cast<long>(rv[l]));
      const long hi = static_cast<long>(ru[l]) + static_cast<long>(rv[l]);
      if (lo > d || d > hi) ++violations;
    }
  }
  report(3, violations == 0 && idx.landmarks().landmarks.size() == 32,
         "landmark triangle bounds hold against exact BFS",
         fmt("%zu landmarks, %zu pairs, %zu bound checks, %zu violations",
             idx.landmarks().landmarks.size(), pairs, checks, violations));
}

void criterion4() {
  // Reference: plain list in recency order, linear scans.
  struct Ref {
    std::size_t cap, bytes = 0;
    std::list<std::pair<int, std::size_t>> items;  // front = most recent
    bool fetch(int k, std::size_t sz) {
      for (auto it = items.begin(); it != items.end(); ++it) {
        if (it->first == k) {
          items.splice(items.begin(), items, it);
          return true;
        }
      }
      if (sz > cap) return false;
      while (bytes + sz > cap) {
        bytes -= items.back().second;
        items.pop_back();
      }
      items.emplace_front(k, sz);
      bytes += sz;
      return false;
    }
  };
  std::mt19937_64 rng(44);
  std::size_t ops = 0, mismatches = 0, over = 0;
  for (std::size_t cap : {0u, 500u, 4000u, 20000u}) {
    LruCache<int, int> lru(cap);
    Ref ref{cap};
    std::unordered_map<int, std::size_t> size_of;
    for (int i = 0; i < 25000; ++i) {
      const int k = static_cast<int>(rng() % 400);
      const auto [it, fresh] = size_of.emplace(k, 16 + rng() % 240);
      const std::size_t sz = it->second;
      bool hit = lru.get(k) != nullptr;
      if (!hit) lru.put(k, k, sz);
      if (hit != ref.fetch(k, sz)) ++mismatches;
      if (lru.current_bytes() > cap) ++over;
      ++ops;
    }
  }
  report(4, mismatches == 0 && over == 0 && ops == 100000,
         "LRU cache matches a reference model",
         fmt("%zu operations, %zu hit/miss mismatches, %zu over-capacity states", ops,
             mismatches, over));
}

// Shared by criteria 5 through 8.
struct BigSetup {
  Graph g;
  Workload w;
  Artifacts art;
  double build_secs = 0.0;
};

std::unique_ptr<BigSetup> big_setup() {
  const auto t0 = Clock::now();
  auto b = std::make_unique<BigSetup>();
  b->g = generate_graph(GeneratorSpec::parse(
      "power-law:n=100000,m=4,communities=100,locality=90,seed=7"));
  b->w = generate_workload(b->g, WorkloadSpec::parse("hotspots=100,per=10,r=2,h=2,seed=3"));
  ExperimentConfig cfg;
  cfg.router.strategy = Strategy::kEmbed;
  b->art = build_artifacts(b->g, cfg);
  b->build_secs = seconds_since(t0);
  std::printf("# 100k graph: %zu nodes, %zu edges, %zu landmarks, preprocessing %.1fs\n",
              b->g.node_count(), b->g.edge_count(),
              b->art.landmarks->landmarks().landmarks.size(), b->build_secs);
  return b;
}

void criterion5(const BigSetup& b) {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.router.num_processors = 4;
  std::unordered_map<int, std::uint64_t> hits;
  for (Strategy s : {Strategy::kNextReady, Strategy::kHash, Strategy::kLandmark,
                     Strategy::kEmbed}) {
    cfg.router.strategy = s;
    hits[static_cast<int>(s)] = run(cfg, b.g, b.w, b.art).hit_total;
  }
  const double secs = b.build_secs + seconds_since(t0);
  const double nr = static_cast<double>(hits[static_cast<int>(Strategy::kNextReady)]);
  const auto hh = hits[static_cast<int>(Strategy::kHash)];
  const auto lh = hits[static_cast<int>(Strategy::kLandmark)];
  const auto eh = hits[static_cast<int>(Strategy::kEmbed)];
  const bool ok = nr > 0 && lh >= 1.2 * nr && eh >= 1.2 * nr && eh >= hh && secs < 600.0;
  report(5, ok, "topology-aware routing gets more cache hits",
         fmt("hits next-ready %.0f, hash %lu, landmark %lu (%.2fx), embed %lu (%.2fx), "
             "%.0fs including preprocessing",
             nr, hh, lh, lh / nr, eh, eh / nr, secs));
}

void criterion6(const BigSetup& b) {
  ExperimentConfig cfg;
  cfg.router.strategy = Strategy::kEmbed;
  cfg.cache_bytes = 256 << 10;
  cfg.window = 1000;
  std::vector<double> thr, rate;
  for (std::size_t p : {1, 2, 4}) {
    cfg.router.num_processors = p;
    const auto m = run(cfg, b.g, b.w, b.art);
    thr.push_back(m.throughput_qps);
    rate.push_back(m.hit_rate());
  }
  bool ok = thr[0] < thr[1] && thr[1] < thr[2];
  for (double r : rate) ok = ok && std::fabs(r - rate[0]) <= 0.15 * rate[0];
  report(6, ok, "embed throughput grows with processors at a steady hit rate",
         fmt("P=1/2/4 throughput %.0f/%.0f/%.0f q/s, hit rate %.3f/%.3f/%.3f", thr[0], thr[1],
             thr[2], rate[0], rate[1], rate[2]));
}

void criterion7(const BigSetup& b) {
  const Workload w = generate_workload(b.g, WorkloadSpec::parse("hotspots=1,per=1000,r=2,seed=3"));
  ExperimentConfig cfg;
  cfg.router.strategy = Strategy::kEmbed;
  cfg.router.num_processors = 4;
  std::vector<double> thr;
  for (double lf : {1.0, 20.0, 1e6}) {
    cfg.router.load_factor = lf;
    thr.push_back(run(cfg, b.g, w, b.art).throughput_qps);
  }
  const bool ok = thr[1] >= 0.95 * thr[0] && thr[1] >= 0.95 * thr[2];
  report(7, ok, "load factor 20 is at least as fast as 1 and 1e6 on one hotspot",
         fmt("throughput lf=1 %.0f, lf=20 %.0f, lf=1e6 %.0f q/s", thr[0], thr[1], thr[2]));
}

void criterion8(const BigSetup& b) {
  const auto& lm = *b.art.landmarks;
  const auto matrix = lm.distances().landmark_matrix();
  const std::size_t L = lm.landmarks().landmarks.size();
  const Hops inf = lm.distances().unreachable();
  std::vector<double> err;
  for (std::size_t d : {2, 5, 10}) {
    EmbedConfig ec;
    ec.dimensions = d;
    ec.seed = 1;
    const auto x = embed_landmarks(matrix, L, inf, ec);
    err.push_back(mean_landmark_error(matrix, L, inf, x, d));
  }
  const bool ok = err[1] <= 1.05 * err[0] && err[2] <= 1.05 * err[1];
  report(8, ok, "landmark embedding error does not grow with dimension",
         fmt("mean relative error D=2 %.4f, D=5 %.4f, D=10 %.4f", err[0], err[1], err[2]));
}

void criterion10() {
  Graph g = make_power_law(20000, 4, 7, 20, 90);
  ExperimentConfig cfg;
  cfg.router.strategy = Strategy::kLandmark;
  cfg.router.num_processors = 4;
  cfg.window = 1000;
  auto refreshed = std::make_shared<LandmarkIndex>(LandmarkIndex::build(g, cfg.landmarks));

  const auto ids = g.node_ids();
  std::mt19937_64 rng(11);
  const std::size_t target = g.edge_count() / 20;
  UpdateReceipt receipt;
  for (std::size_t added = 0; added < target;) {
    const NodeId u = ids[rng() % ids.size()], v = ids[rng() % ids.size()];
    if (u == v || g.has_edge(u, v)) continue;
    receipt.merge(apply_update(g, AddEdge{u, v, {}}));
    ++added;
  }
  const auto stats = refreshed->refresh_after_update(g, receipt);
  auto rebuilt = std::make_shared<LandmarkIndex>(LandmarkIndex::build(g, cfg.landmarks));

  const Workload w = generate_workload(g, WorkloadSpec::parse("hotspots=100,per=10,seed=3"));
  const double a = run(cfg, g, w, Artifacts{refreshed, nullptr}).hit_rate();
  const double r = run(cfg, g, w, Artifacts{rebuilt, nullptr}).hit_rate();
  const double degradation = r > 0 ? (r - a) / r : 0.0;
  report(10, degradation < 0.20, "refreshed landmark routing stays close to a rebuild",
         fmt("%zu edges added, %zu rows refreshed, hit rate refresh %.4f vs rebuild %.4f, "
             "degradation %.1f%%",
             target, stats.rows_recomputed, a, r, 100.0 * degradation));
}

void criterion11() {
  const Graph g = make_power_law(4000, 3, 15, 40, 90);
  const Workload w = generate_workload(g, WorkloadSpec::parse("hotspots=60,per=10,seed=5"));
  ExperimentConfig cfg;
  cfg.router.num_processors = 4;
  cfg.storage_servers = 3;
  cfg.cache_bytes = 1 << 20;
  cfg.landmarks.target_count = 24;
  cfg.embed.dimensions = 4;
  cfg.router.strategy = Strategy::kEmbed;
  const Artifacts art = build_artifacts(g, cfg);
  std::size_t differing = 0, runs = 0;
  std::string detail;
  for (Strategy s : {Strategy::kHash, Strategy::kLandmark, Strategy::kEmbed}) {
    cfg.router.strategy = s;
    cfg.transport = Transport::kInProc;
    const auto a = run(cfg, g, w, art);
    cfg.transport = Transport::kTcp;
    const auto b = run(cfg, g, w, art);
    ++runs;
    if (a.hit_total != b.hit_total || a.miss_total != b.miss_total) ++differing;
    detail += fmt("%s %lu/%lu vs %lu/%lu; ", std::string(to_string(s)).c_str(), a.hit_total,
                  a.miss_total, b.hit_total, b.miss_total);
  }
  detail += fmt("%zu of %zu strategies differ", differing, runs);
  report(11, differing == 0, "inproc and tcp transports give identical hit/miss totals",
         detail);
}

void criterion9() {
  report(9, conservation.runs > 0 && conservation.violations == 0 &&
                conservation.incomplete == 0,
         "no idle processor while work is queued; every query completes",
         fmt("%zu simulated runs, %zu violations, %zu incomplete", conservation.runs,
             conservation.violations, conservation.incomplete));
}

int guarded(int id, const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, false, "threw", e.what());
  }
  return 0;
}

}  // namespace
}  // namespace graphroute

int main() {
  using namespace graphroute;
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  std::unique_ptr<BigSetup> big;
  guarded(5, [&] {
    big = big_setup();
    criterion5(*big);
  });
  for (auto [id, fn] : {std::pair{6, criterion6}, {7, criterion7}, {8, criterion8}}) {
    guarded(id, [&, fn = fn] {
      if (!big) throw std::runtime_error("100k setup unavailable");
      fn(*big);
    });
  }
  guarded(10, criterion10);
  guarded(11, criterion11);
  guarded(9, criterion9);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
