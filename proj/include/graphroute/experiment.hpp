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
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "graphroute/embedding.hpp"
#include "graphroute/landmark.hpp"
#include "graphroute/router.hpp"
#include "graphroute/workload.hpp"

namespace graphroute {

enum class Transport { kInProc, kTcp };

std::string_view to_string(Transport t);
Transport parse_transport(std::string_view s);

struct ExperimentConfig {
  std::string run_id = "run";
  RouterConfig router;
  std::size_t storage_servers = 1;
  std::size_t cache_bytes = kDefaultCacheBytes;
  Transport transport = Transport::kInProc;
  CostModel cost;
  double arrival_gap_us = 0.0;
  std::size_t window = 0;  // closed-loop client window; 0 = open loop
  std::size_t repetitions = 1;
  bool cold_start = true;  // false: one unmeasured warm-up pass first

  // Preprocessing recipes used by build_artifacts and sweeps.
  LandmarkConfig landmarks;
  EmbedConfig embed;

  // Free-form key=value lines copied into the CSV header.
  std::vector<std::pair<std::string, std::string>> provenance;
};

bool strategy_needs_landmarks(Strategy s);
bool strategy_needs_embedding(Strategy s);

struct Artifacts {
  std::shared_ptr<const LandmarkIndex> landmarks;
  std::shared_ptr<const EmbeddingTable> embedding;
};

// Builds exactly what cfg.router.strategy needs.
Artifacts build_artifacts(const Graph& graph, const ExperimentConfig& cfg);

struct QueryRow {
  std::uint64_t query_id = 0;
  QueryKind kind = QueryKind::kAggregation;
  std::size_t processor = 0;
  double latency_us = 0.0;  // dispatch to ack on the simulated clock
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;

  friend bool operator==(const QueryRow&, const QueryRow&) = default;
};

struct RunMetrics {
  std::string run_id;
  Strategy strategy = Strategy::kNextReady;
  std::size_t P = 0;
  std::size_t S = 0;
  std::size_t cache_bytes = 0;
  double load_factor = 0.0;
  double alpha = 0.0;
  std::size_t D = 0;
  std::size_t L = 0;

  std::size_t total_queries = 0;
  double makespan_us = 0.0;
  double throughput_qps = 0.0;
  double mean_latency_us = 0.0;
  std::uint64_t hit_total = 0;
  std::uint64_t miss_total = 0;
  std::vector<std::size_t> completed_per_processor;
  std::uint64_t storage_requests = 0;
  std::size_t steals = 0;
  std::size_t fallbacks = 0;
  std::size_t conservation_violations = 0;
  std::size_t max_in_flight = 0;
  std::vector<std::uint64_t> hotspot_hits;
  std::vector<std::uint64_t> hotspot_misses;
  std::vector<QueryRow> rows;

  double hit_rate() const {
    const auto t = hit_total + miss_total;
    return t == 0 ? 0.0 : static_cast<double>(hit_total) / static_cast<double>(t);
  }

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

struct ExperimentResult {
  std::vector<RunMetrics> runs;  // one per repetition
  std::vector<QueryResult> results;  // last repetition, by query index
  DispatchReport report;             // last repetition
};

// Cold caches per repetition; streams the workload through the router.
// Throws ConfigError naming any artifact the strategy needs but lacks.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Graph& graph,
                                const Workload& workload, const Artifacts& artifacts);

enum class SweepParam { kProcessors, kStorage, kCache, kLoadFactor, kAlpha, kDimensions, kLandmarks };

std::string_view to_string(SweepParam p);
SweepParam parse_sweep_param(std::string_view s);

// One run per value (first repetition kept); artifacts are rebuilt when the
// swept parameter changes them.
std::vector<RunMetrics> sweep(const ExperimentConfig& base, SweepParam param,
                              const std::vector<double>& values, const Graph& graph,
                              const Workload& workload);

// CSV: optional "# key=value" lines, the fixed header, one row per query and
// one SUMMARY row per run. Doubles use the shortest round-trip form.
inline constexpr std::string_view kCsvHeader =
    "run_id,strategy,P,S,cache_bytes,load_factor,alpha,D,L,query_id,kind,processor,"
    "latency_us,hits,misses";

void write_csv(std::ostream& out, const std::vector<RunMetrics>& runs,
               const std::vector<std::pair<std::string, std::string>>& provenance = {},
               bool per_query_rows = true);
void write_csv(const std::filesystem::path& path, const std::vector<RunMetrics>& runs,
               const std::vector<std::pair<std::string, std::string>>& provenance = {},
               bool per_query_rows = true);

struct CsvDocument {
  std::vector<std::pair<std::string, std::string>> provenance;
  std::vector<RunMetrics> runs;
};
CsvDocument read_csv(std::istream& in);
CsvDocument read_csv(const std::filesystem::path& path);

}  // namespace graphroute
