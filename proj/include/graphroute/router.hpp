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

#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "graphroute/embedding.hpp"
#include "graphroute/landmark.hpp"
#include "graphroute/processor.hpp"
#include "graphroute/query.hpp"

namespace graphroute {

enum class Strategy { kNextReady, kHash, kLandmark, kEmbed, kNoCache };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);  // "next-ready", "hash", ...

struct RouterConfig {
  std::size_t num_processors = 1;
  Strategy strategy = Strategy::kNextReady;
  double load_factor = 20.0;  // +inf disables the load term
  double alpha = 0.5;
  bool steal = true;
  std::uint64_t seed = 1;  // embed mean-coordinate initialization

  void validate() const;
};

// Hash routing: source id mod P.
constexpr std::size_t route_hash(NodeId source, std::size_t num_processors) {
  return static_cast<std::size_t>(source % num_processors);
}

// argmin_p distance[p] + queue_len[p] / load_factor over live processors
// (ties: lowest index). `live` may be empty meaning all live.
std::size_t choose_load_balanced(std::span<const double> distance,
                                 std::span<const std::size_t> queue_len,
                                 double load_factor,
                                 std::span<const std::uint8_t> live = {});

// mean <- alpha * mean + (1 - alpha) * coords
void ema_update(std::span<double> mean, std::span<const double> coords, double alpha);

// Deterministic service-time model for the simulated clock.
struct CostModel {
  double storage_latency_us = 10.0;   // round trip of one storage get
  double storage_occupancy_us = 2.0;  // server busy time per get
  double cache_lookup_us = 0.5;       // per fetch, only when caching
  double edge_scan_us = 0.01;
  double query_overhead_us = 5.0;
};

// Router-side connection to one processor. execute() blocks until the ack.
class ProcessorHandle {
 public:
  virtual ~ProcessorHandle() = default;
  // Throws TransportError when the processor does not answer.
  virtual QueryResult execute(const Query& q) = 0;
};

// Same QUERY / ACK messages as the TCP transport, passed in memory.
class InProcProcessorHandle final : public ProcessorHandle {
 public:
  explicit InProcProcessorHandle(Processor& p) : p_(p) {}
  QueryResult execute(const Query& q) override;

 private:
  Processor& p_;
};

struct DispatchRecord {
  std::size_t processor = 0;   // who executed it
  std::size_t routed_to = 0;   // strategy choice (== processor unless stolen)
  bool stolen = false;
  double arrival_us = 0.0;
  double dispatch_us = 0.0;
  double complete_us = 0.0;
  QueryResult result;

  double service_us() const { return complete_us - dispatch_us; }
};

struct DispatchReport {
  std::vector<DispatchRecord> records;  // indexed like the input queries
  std::vector<std::size_t> completed_per_processor;
  std::size_t steals = 0;
  std::size_t fallbacks = 0;  // nodes missing from routing tables
  std::size_t conservation_violations = 0;
  std::size_t max_in_flight_per_processor = 0;
  std::vector<std::size_t> failed_processors;
  double makespan_us = 0.0;
};

struct DispatchOptions {
  CostModel cost;
  bool cache_enabled = true;
  std::size_t storage_servers = 1;
  double arrival_gap_us = 0.0;  // inter-arrival time; 0 = all queued at once
  // Closed-loop client window: query i arrives no earlier than the
  // completion that brings outstanding queries below `window`. 0 = open loop.
  std::size_t window = 0;
};

// Single logical event loop: routes each arriving query to a per-processor
// queue (or the global ready queue for next-ready), hands a processor its
// next query only after the previous ack, and lets idle processors steal the
// oldest query of the longest queue.
class Router {
 public:
  Router(RouterConfig config, std::shared_ptr<const LandmarkIndex> landmarks = nullptr,
         std::shared_ptr<const EmbeddingTable> embedding = nullptr);

  const RouterConfig& config() const noexcept { return config_; }

  // Strategy decision for `q` against the current queue state. Updates the
  // embed mean coordinates of the chosen processor. Returns kGlobalQueue for
  // next-ready / no-cache.
  static constexpr std::size_t kGlobalQueue = std::numeric_limits<std::size_t>::max();
  std::size_t route(const Query& q);

  std::size_t route_landmark(NodeId source);
  std::size_t route_embed(NodeId source);

  void set_queue_lengths(std::span<const std::size_t> lens);
  std::span<const std::size_t> queue_lengths() const { return queue_len_; }
  const std::vector<std::vector<double>>& mean_coords() const { return means_; }
  std::vector<std::vector<double>>& mutable_mean_coords() { return means_; }
  std::size_t fallbacks() const noexcept { return fallbacks_; }

  DispatchReport dispatch(std::span<const Query> queries,
                          std::span<ProcessorHandle* const> processors,
                          const DispatchOptions& options);

 private:
  std::size_t route_hash_live(NodeId source) const;

  RouterConfig config_;
  std::shared_ptr<const LandmarkIndex> landmarks_;
  std::shared_ptr<const EmbeddingTable> embedding_;
  std::vector<std::vector<double>> means_;
  std::vector<std::size_t> queue_len_;
  std::vector<std::uint8_t> live_;
  std::size_t fallbacks_ = 0;
};

}  // namespace graphroute
