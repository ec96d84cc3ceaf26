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

#include "graphroute/processor.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace graphroute {

// ---------------------------------------------------------------------------
// Query

std::string_view to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::kAggregation: return "aggregation";
    case QueryKind::kRandomWalk: return "random_walk";
    case QueryKind::kReachability: return "reachability";
  }
  return "unknown";
}

QueryKind parse_query_kind(std::string_view s) {
  if (s == "aggregation") return QueryKind::kAggregation;
  if (s == "random_walk") return QueryKind::kRandomWalk;
  if (s == "reachability") return QueryKind::kReachability;
  throw ConfigError("unknown query kind '" + std::string(s) + "'");
}

void Query::validate() const {
  if (h < 1) throw PreconditionError("query hop budget must be >= 1");
  if (target.has_value() != (kind == QueryKind::kReachability)) {
    throw PreconditionError("target must be set exactly for reachability queries");
  }
  if (kind == QueryKind::kRandomWalk && !(restart_prob > 0.0 && restart_prob <= 1.0)) {
    throw PreconditionError("restart probability must be in (0, 1]");
  }
  if (label_filter && kind != QueryKind::kAggregation) {
    throw PreconditionError("label filter applies to aggregation only");
  }
}

Query make_aggregation(NodeId source, std::uint32_t h, std::optional<std::string> label) {
  Query q;
  q.kind = QueryKind::kAggregation;
  q.source = source;
  q.h = h;
  q.label_filter = std::move(label);
  return q;
}

Query make_random_walk(NodeId source, std::uint32_t h, std::uint64_t seed,
                       double restart_prob) {
  Query q;
  q.kind = QueryKind::kRandomWalk;
  q.source = source;
  q.h = h;
  q.seed = seed;
  q.restart_prob = restart_prob;
  return q;
}

Query make_reachability(NodeId source, NodeId target, std::uint32_t h) {
  Query q;
  q.kind = QueryKind::kReachability;
  q.source = source;
  q.target = target;
  q.h = h;
  return q;
}

bool QueryResult::same_payload(const QueryResult& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case QueryKind::kAggregation: return count == o.count;
    case QueryKind::kRandomWalk: return terminal == o.terminal && visits == o.visits;
    case QueryKind::kReachability: return reachable == o.reachable;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Processor

// Per-query view of the processor: each node is fetched through the cache at
// most once per query, so hits + misses equals the distinct fetch count.
class Processor::Session {
 public:
  Session(Processor& p, QueryResult& r) : p_(p), r_(r) {
    r_.misses_by_server.assign(p.storage_.num_servers(), 0);
  }

  const AdjacencyEntry& get(NodeId id) {
    auto it = seen_.find(id);
    if (it != seen_.end()) return *it->second;
    const bool hit = p_.cache_.contains(id);
    EntryPtr e = p_.fetch(id);
    if (hit) {
      ++r_.cache_hits;
    } else {
      ++r_.cache_misses;
      ++r_.misses_by_server[p_.storage_.server_of(id)];
    }
    return *seen_.emplace(id, std::move(e)).first->second;
  }

 private:
  Processor& p_;
  QueryResult& r_;
  std::unordered_map<NodeId, EntryPtr> seen_;
};

Processor::Processor(StorageClient& storage, std::size_t cache_bytes)
    : storage_(storage), cache_(cache_bytes) {}

EntryPtr Processor::fetch(NodeId id) {
  if (const EntryPtr* cached = cache_.get(id)) {
    ++hits_;
    return *cached;
  }
  auto entry = std::make_shared<const AdjacencyEntry>(storage_.get(id));
  ++misses_;
  if (cache_enabled()) cache_.put(id, entry, entry->byte_size());
  return entry;
}

void Processor::reset_cache() {
  cache_.clear();
  hits_ = misses_ = 0;
}

QueryResult Processor::execute(const Query& q) {
  q.validate();
  const auto start = std::chrono::steady_clock::now();
  QueryResult r;
  switch (q.kind) {
    case QueryKind::kAggregation: r = run_aggregation(q); break;
    case QueryKind::kRandomWalk: r = run_random_walk(q); break;
    case QueryKind::kReachability: r = run_reachability(q); break;
  }
  r.elapsed_us = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::steady_clock::now() - start)
          .count());
  return r;
}

QueryResult Processor::run_aggregation(const Query& q) {
  if (q.kind != QueryKind::kAggregation) throw PreconditionError("not an aggregation query");
  QueryResult r;
  r.query_id = q.id;
  r.kind = q.kind;
  Session session(*this, r);

  std::unordered_set<NodeId> visited{q.source};
  std::vector<NodeId> frontier{q.source};
  std::vector<NodeId> next;
  session.get(q.source);
  for (std::uint32_t depth = 0; depth < q.h && !frontier.empty(); ++depth) {
    next.clear();
    for (NodeId u : frontier) {
      const auto& e = session.get(u);
      r.edges_scanned += e.out.size();
      for (const auto& n : e.out) {
        if (visited.insert(n.id).second) next.push_back(n.id);
      }
    }
    // Nodes at this depth are fetched for their labels (and adjacency when
    // the next level is expanded).
    for (NodeId v : next) {
      const auto& ev = session.get(v);
      if (!q.label_filter || ev.label == *q.label_filter) ++r.count;
    }
    frontier.swap(next);
  }
  return r;
}

namespace {

std::size_t pick_index(std::uint64_t bits, std::size_t n) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

}  // namespace

QueryResult Processor::run_random_walk(const Query& q) {
  if (q.kind != QueryKind::kRandomWalk) throw PreconditionError("not a random walk query");
  QueryResult r;
  r.query_id = q.id;
  r.kind = q.kind;
  Session session(*this, r);

  session.get(q.source);
  std::map<NodeId, std::uint32_t> visits;
  NodeId cur = q.source;
  for (std::uint32_t step = 0; step < q.h; ++step) {
    const double u = to_unit(counter_random(q.seed, 2ULL * step));
    if (u < q.restart_prob) {
      cur = q.source;
    } else {
      const auto& e = session.get(cur);
      r.edges_scanned += 1;
      if (e.out.empty()) {
        cur = q.source;  // dead end: forced restart
      } else {
        cur = e.out[pick_index(counter_random(q.seed, 2ULL * step + 1), e.out.size())].id;
      }
    }
    ++visits[cur];
  }
  r.terminal = cur;
  r.visits.assign(visits.begin(), visits.end());
  return r;
}

QueryResult Processor::run_reachability(const Query& q) {
  if (q.kind != QueryKind::kReachability || !q.target) {
    throw PreconditionError("not a reachability query");
  }
  QueryResult r;
  r.query_id = q.id;
  r.kind = q.kind;
  Session session(*this, r);

  const NodeId s = q.source;
  const NodeId t = *q.target;
  session.get(s);
  session.get(t);
  if (s == t) {
    r.reachable = true;
    return r;
  }

  std::unordered_set<NodeId> fwd_seen{s}, bwd_seen{t};
  std::vector<NodeId> fwd{s}, bwd{t}, next;
  std::uint32_t df = 0, db = 0;
  while (df + db < q.h && !fwd.empty() && !bwd.empty()) {
    const bool forward = fwd.size() <= bwd.size();
    auto& frontier = forward ? fwd : bwd;
    auto& mine = forward ? fwd_seen : bwd_seen;
    const auto& theirs = forward ? bwd_seen : fwd_seen;
    next.clear();
    for (NodeId x : frontier) {
      const auto& e = session.get(x);
      const auto& nbrs = forward ? e.out : e.in;
      r.edges_scanned += nbrs.size();
      for (const auto& n : nbrs) {
        if (theirs.contains(n.id)) {
          r.reachable = true;
          return r;
        }
        if (mine.insert(n.id).second) next.push_back(n.id);
      }
    }
    frontier.swap(next);
    (forward ? df : db) += 1;
  }
  return r;
}

}  // namespace graphroute
