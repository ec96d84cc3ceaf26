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

#include "graphroute/router.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <queue>
#include <string>

#include "graphroute/wire.hpp"

namespace graphroute {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kNextReady: return "next-ready";
    case Strategy::kHash: return "hash";
    case Strategy::kLandmark: return "landmark";
    case Strategy::kEmbed: return "embed";
    case Strategy::kNoCache: return "no-cache";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "next-ready" || s == "next_ready") return Strategy::kNextReady;
  if (s == "hash") return Strategy::kHash;
  if (s == "landmark") return Strategy::kLandmark;
  if (s == "embed") return Strategy::kEmbed;
  if (s == "no-cache" || s == "no_cache") return Strategy::kNoCache;
  throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

void RouterConfig::validate() const {
  if (num_processors == 0) throw ConfigError("need at least one processor");
  if (!(load_factor > 0.0)) throw ConfigError("load factor must be > 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
}

std::size_t choose_load_balanced(std::span<const double> distance,
                                 std::span<const std::size_t> queue_len,
                                 double load_factor,
                                 std::span<const std::uint8_t> live) {
  if (distance.size() != queue_len.size() || distance.empty()) {
    throw PreconditionError("distance and queue vectors must match and be non-empty");
  }
  std::size_t best = distance.size();
  double best_score = 0.0;
  for (std::size_t p = 0; p < distance.size(); ++p) {
    if (!live.empty() && !live[p]) continue;
    const double load = std::isinf(load_factor)
                            ? 0.0
                            : static_cast<double>(queue_len[p]) / load_factor;
    const double score = distance[p] + load;
    if (best == distance.size() || score < best_score) {
      best = p;
      best_score = score;
    }
  }
  if (best == distance.size()) throw Error("no live processor");
  return best;
}

void ema_update(std::span<double> mean, std::span<const double> coords, double alpha) {
  if (mean.size() != coords.size()) throw PreconditionError("dimension mismatch");
  for (std::size_t i = 0; i < mean.size(); ++i) {
    mean[i] = alpha * mean[i] + (1.0 - alpha) * coords[i];
  }
}

QueryResult InProcProcessorHandle::execute(const Query& q) {
  const auto request = wire::encode_query(q);
  const auto ack = wire::encode_ack(p_.execute(wire::decode_query(request)));
  return wire::decode_ack(ack);
}

Router::Router(RouterConfig config, std::shared_ptr<const LandmarkIndex> landmarks,
               std::shared_ptr<const EmbeddingTable> embedding)
    : config_(config), landmarks_(std::move(landmarks)), embedding_(std::move(embedding)) {
  config_.validate();
  const std::size_t P = config_.num_processors;
  queue_len_.assign(P, 0);
  live_.assign(P, 1);
  if (config_.strategy == Strategy::kLandmark) {
    if (!landmarks_) throw ConfigError("landmark strategy needs a landmark index");
    if (landmarks_->assignment().num_processors != P) {
      throw ConfigError("landmark index is assigned to " +
                        std::to_string(landmarks_->assignment().num_processors) +
                        " processors, router has " + std::to_string(P));
    }
  }
  if (config_.strategy == Strategy::kEmbed) {
    if (!embedding_) throw ConfigError("embed strategy needs an embedding table");
    const std::size_t D = embedding_->dimensions();
    auto [lo, hi] = embedding_->landmark_bounds();
    means_.assign(P, std::vector<double>(D, 0.0));
    for (std::size_t p = 0; p < P; ++p) {
      for (std::size_t k = 0; k < D; ++k) {
        const double u = to_unit(counter_random(config_.seed, p * D + k));
        means_[p][k] = lo[k] + u * (hi[k] - lo[k]);
      }
    }
  }
}

void Router::set_queue_lengths(std::span<const std::size_t> lens) {
  if (lens.size() != queue_len_.size()) throw PreconditionError("queue length size mismatch");
  std::copy(lens.begin(), lens.end(), queue_len_.begin());
}

std::size_t Router::route_hash_live(NodeId source) const {
  const std::size_t P = config_.num_processors;
  std::size_t p = route_hash(source, P);
  if (live_[p]) return p;
  std::vector<std::size_t> alive;
  for (std::size_t i = 0; i < P; ++i) {
    if (live_[i]) alive.push_back(i);
  }
  if (alive.empty()) throw Error("no live processor");
  return alive[route_hash(source, alive.size())];
}

std::size_t Router::route_landmark(NodeId source) {
  auto slot = landmarks_->row_of(source);
  if (!slot) {
    ++fallbacks_;
    return route_hash_live(source);
  }
  const auto row = landmarks_->node_processor().row(*slot);
  std::vector<double> dist(row.begin(), row.end());
  return choose_load_balanced(dist, queue_len_, config_.load_factor, live_);
}

std::size_t Router::route_embed(NodeId source) {
  auto coords = embedding_->coords_of(source);
  if (!coords) {
    ++fallbacks_;
    return route_hash_live(source);
  }
  const std::size_t P = config_.num_processors;
  std::vector<double> dist(P);
  for (std::size_t p = 0; p < P; ++p) {
    double s = 0.0;
    for (std::size_t k = 0; k < coords->size(); ++k) {
      const double d = means_[p][k] - (*coords)[k];
      s += d * d;
    }
    dist[p] = std::sqrt(s);
  }
  const std::size_t best =
      choose_load_balanced(dist, queue_len_, config_.load_factor, live_);
  ema_update(means_[best], *coords, config_.alpha);
  return best;
}

std::size_t Router::route(const Query& q) {
  switch (config_.strategy) {
    case Strategy::kNextReady:
    case Strategy::kNoCache: return kGlobalQueue;
    case Strategy::kHash: return route_hash_live(q.source);
    case Strategy::kLandmark: return route_landmark(q.source);
    case Strategy::kEmbed: return route_embed(q.source);
  }
  return kGlobalQueue;
}

namespace {

struct Completion {
  double time;
  std::size_t processor;
  bool operator>(const Completion& o) const {
    return time != o.time ? time > o.time : processor > o.processor;
  }
};

}  // namespace

DispatchReport Router::dispatch(std::span<const Query> queries,
                                std::span<ProcessorHandle* const> processors,
                                const DispatchOptions& options) {
  const std::size_t P = config_.num_processors;
  if (processors.size() != P) {
    throw ConfigError("router expects " + std::to_string(P) + " processors, got " +
                      std::to_string(processors.size()));
  }
  if (options.storage_servers == 0) throw ConfigError("need at least one storage server");

  const std::size_t n = queries.size();
  DispatchReport report;
  report.records.resize(n);
  report.completed_per_processor.assign(P, 0);

  std::vector<std::deque<std::size_t>> queues(P);
  std::deque<std::size_t> global;
  std::vector<std::size_t> running(P, SIZE_MAX);
  std::vector<double> server_free(options.storage_servers, 0.0);
  std::priority_queue<Completion, std::vector<Completion>, std::greater<>> events;
  std::vector<std::size_t> in_flight(P, 0);
  const bool shared_queue = config_.strategy == Strategy::kNextReady ||
                            config_.strategy == Strategy::kNoCache;
  std::fill(live_.begin(), live_.end(), 1);
  std::fill(queue_len_.begin(), queue_len_.end(), 0);
  const std::size_t fallbacks_before = fallbacks_;

  auto sync_lengths = [&] {
    for (std::size_t p = 0; p < P; ++p) queue_len_[p] = queues[p].size();
  };

  auto enqueue = [&](std::size_t qi, bool front) {
    std::size_t p = kGlobalQueue;
    if (!shared_queue) {
      sync_lengths();
      p = route(queries[qi]);
    }
    report.records[qi].routed_to = p == kGlobalQueue ? 0 : p;
    auto& dq = p == kGlobalQueue ? global : queues[p];
    if (front) {
      dq.push_front(qi);
    } else {
      dq.push_back(qi);
    }
  };

  auto service_time = [&](const QueryResult& r, double start) {
    const CostModel& c = options.cost;
    double t = start + c.query_overhead_us +
               static_cast<double>(r.edges_scanned) * c.edge_scan_us;
    if (options.cache_enabled) {
      t += static_cast<double>(r.cache_hits + r.cache_misses) * c.cache_lookup_us;
    }
    for (std::size_t s = 0; s < r.misses_by_server.size() && s < server_free.size(); ++s) {
      const double m = r.misses_by_server[s];
      if (m == 0) continue;
      const double begin = std::max(t, server_free[s]);
      server_free[s] = begin + m * c.storage_occupancy_us;
      t = begin + m * c.storage_latency_us;
    }
    return t;
  };

  std::size_t live_count = P;

  auto fail = [&](std::size_t p) {
    live_[p] = 0;
    --live_count;
    report.failed_processors.push_back(p);
    if (live_count == 0) throw Error("all processors failed");
    std::deque<std::size_t> orphans;
    orphans.swap(queues[p]);
    for (std::size_t qi : orphans) enqueue(qi, false);
  };

  // Returns false when `p` failed while taking the query.
  auto start = [&](std::size_t p, std::size_t qi, double now, bool stolen) {
    auto& rec = report.records[qi];
    QueryResult r;
    try {
      r = processors[p]->execute(queries[qi]);
    } catch (const TransportError&) {
      fail(p);
      enqueue(qi, true);
      return false;
    }
    rec.processor = p;
    rec.stolen = stolen;
    rec.dispatch_us = now;
    rec.complete_us = service_time(r, now);
    rec.result = std::move(r);
    if (stolen) {
      ++report.steals;
      if (config_.strategy == Strategy::kEmbed) {
        if (auto c = embedding_->coords_of(queries[qi].source)) {
          ema_update(means_[p], *c, config_.alpha);
        }
      }
    }
    running[p] = qi;
    report.max_in_flight_per_processor =
        std::max(report.max_in_flight_per_processor, ++in_flight[p]);
    events.push({rec.complete_us, p});
    return true;
  };

  auto next_for = [&](std::size_t p, bool allow_steal, bool& stolen) -> std::optional<std::size_t> {
    stolen = false;
    if (!queues[p].empty()) {
      const std::size_t qi = queues[p].front();
      queues[p].pop_front();
      return qi;
    }
    if (!global.empty()) {
      const std::size_t qi = global.front();
      global.pop_front();
      return qi;
    }
    if (!allow_steal) return std::nullopt;
    std::size_t victim = P;
    for (std::size_t v = 0; v < P; ++v) {
      if (!queues[v].empty() && (victim == P || queues[v].size() > queues[victim].size())) {
        victim = v;
      }
    }
    if (victim == P) return std::nullopt;
    const std::size_t qi = queues[victim].front();
    queues[victim].pop_front();
    stolen = true;
    return qi;
  };

  // Own queue first for every idle processor, then stealing, so a query is
  // never taken from a processor that could start it right now.
  auto dispatch_idle = [&](double now) {
    bool progress = true;
    while (progress) {
      progress = false;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t p = 0; p < P; ++p) {
          if (!live_[p] || running[p] != SIZE_MAX) continue;
          bool stolen = false;
          auto qi = next_for(p, pass == 1 && config_.steal, stolen);
          if (!qi) continue;
          start(p, *qi, now, stolen);
          progress = true;
        }
      }
    }
    bool waiting = !global.empty();
    for (std::size_t p = 0; p < P && !waiting; ++p) waiting = !queues[p].empty();
    if (waiting) {
      for (std::size_t p = 0; p < P; ++p) {
        if (live_[p] && running[p] == SIZE_MAX) ++report.conservation_violations;
      }
    }
  };

  std::size_t next_arrival = 0;
  std::size_t completed = 0;
  double now = 0.0;
  auto arrival_time = [&]() -> double {
    if (next_arrival >= n) return std::numeric_limits<double>::infinity();
    if (options.window > 0 && next_arrival >= completed + options.window) {
      return std::numeric_limits<double>::infinity();
    }
    return std::max(now, static_cast<double>(next_arrival) * options.arrival_gap_us);
  };
  while (next_arrival < n || !events.empty()) {
    const double t_arrival = arrival_time();
    if (!events.empty() && events.top().time <= t_arrival) {
      const Completion c = events.top();
      events.pop();
      now = c.time;
      ++report.completed_per_processor[c.processor];
      ++completed;
      running[c.processor] = SIZE_MAX;
      --in_flight[c.processor];
    } else {
      if (std::isinf(t_arrival)) throw Error("dispatch loop stalled");
      now = t_arrival;
      // Batch every arrival at this instant before handing out work.
      while (arrival_time() <= now) {
        report.records[next_arrival].arrival_us = now;
        enqueue(next_arrival, false);
        ++next_arrival;
      }
    }
    dispatch_idle(now);
  }
  report.makespan_us = now;
  report.fallbacks = fallbacks_ - fallbacks_before;
  sync_lengths();
  return report;
}

}  // namespace graphroute
