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

#include "graphroute/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "graphroute/storage.hpp"
#include "graphroute/tcp.hpp"

namespace graphroute {

std::string_view to_string(Transport t) { return t == Transport::kTcp ? "tcp" : "inproc"; }

Transport parse_transport(std::string_view s) {
  if (s == "inproc") return Transport::kInProc;
  if (s == "tcp") return Transport::kTcp;
  throw ConfigError("unknown transport '" + std::string(s) + "'");
}

bool strategy_needs_landmarks(Strategy s) {
  return s == Strategy::kLandmark || s == Strategy::kEmbed;
}

bool strategy_needs_embedding(Strategy s) { return s == Strategy::kEmbed; }

Artifacts build_artifacts(const Graph& graph, const ExperimentConfig& cfg) {
  Artifacts a;
  if (!strategy_needs_landmarks(cfg.router.strategy)) return a;
  auto index = std::make_shared<LandmarkIndex>(LandmarkIndex::build(graph, cfg.landmarks));
  if (cfg.router.strategy == Strategy::kLandmark) {
    index->assign_processors(cfg.router.num_processors);
  }
  if (strategy_needs_embedding(cfg.router.strategy)) {
    a.embedding = std::make_shared<EmbeddingTable>(EmbeddingTable::build(graph, *index, cfg.embed));
  }
  a.landmarks = std::move(index);
  return a;
}

namespace {

// Storage and processor tiers for one repetition.
class Cluster {
 public:
  Cluster(const ExperimentConfig& cfg, StorageTier& tier, std::size_t cache_bytes) {
    const std::size_t P = cfg.router.num_processors;
    if (cfg.transport == Transport::kInProc) {
      clients_.push_back(std::make_unique<InProcStorageClient>(tier));
      for (std::size_t p = 0; p < P; ++p) {
        processors_.push_back(std::make_unique<Processor>(*clients_[0], cache_bytes));
        handles_.push_back(std::make_unique<InProcProcessorHandle>(*processors_.back()));
      }
    } else {
      std::vector<Endpoint> eps;
      for (std::size_t s = 0; s < tier.num_servers(); ++s) {
        storage_servers_.push_back(std::make_unique<StorageServer>(tier));
        eps.push_back(storage_servers_.back()->endpoint());
      }
      for (std::size_t p = 0; p < P; ++p) {
        clients_.push_back(std::make_unique<TcpStorageClient>(eps, tier.partition_map()));
        processors_.push_back(std::make_unique<Processor>(*clients_.back(), cache_bytes));
        processor_servers_.push_back(std::make_unique<ProcessorServer>(*processors_.back()));
        handles_.push_back(
            std::make_unique<TcpProcessorHandle>(processor_servers_.back()->endpoint()));
      }
    }
    for (auto& h : handles_) raw_.push_back(h.get());
  }

  ~Cluster() {
    handles_.clear();
    for (auto& s : processor_servers_) s->stop();
    for (auto& s : storage_servers_) s->stop();
  }

  std::span<ProcessorHandle* const> handles() const { return raw_; }

 private:
  std::vector<std::unique_ptr<StorageServer>> storage_servers_;
  std::vector<std::unique_ptr<StorageClient>> clients_;
  std::vector<std::unique_ptr<Processor>> processors_;
  std::vector<std::unique_ptr<ProcessorServer>> processor_servers_;
  std::vector<std::unique_ptr<ProcessorHandle>> handles_;
  std::vector<ProcessorHandle*> raw_;
};

RunMetrics collect(const ExperimentConfig& cfg, const Workload& workload,
                   const Artifacts& artifacts, const DispatchReport& report,
                   std::size_t cache_bytes, std::uint64_t storage_requests,
                   std::string run_id) {
  RunMetrics m;
  m.run_id = std::move(run_id);
  m.strategy = cfg.router.strategy;
  m.P = cfg.router.num_processors;
  m.S = cfg.storage_servers;
  m.cache_bytes = cache_bytes;
  m.load_factor = cfg.router.load_factor;
  m.alpha = cfg.router.alpha;
  m.D = artifacts.embedding ? artifacts.embedding->dimensions() : 0;
  m.L = artifacts.landmarks ? artifacts.landmarks->landmarks().landmarks.size() : 0;
  m.total_queries = workload.queries.size();
  m.makespan_us = report.makespan_us;
  m.throughput_qps = report.makespan_us > 0
                         ? static_cast<double>(m.total_queries) / (report.makespan_us * 1e-6)
                         : 0.0;
  m.completed_per_processor = report.completed_per_processor;
  m.storage_requests = storage_requests;
  m.steals = report.steals;
  m.fallbacks = report.fallbacks;
  m.conservation_violations = report.conservation_violations;
  m.max_in_flight = report.max_in_flight_per_processor;
  m.hotspot_hits.assign(workload.centers.size(), 0);
  m.hotspot_misses.assign(workload.centers.size(), 0);
  double latency_sum = 0.0;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& rec = report.records[i];
    QueryRow row;
    row.query_id = workload.queries[i].id;
    row.kind = workload.queries[i].kind;
    row.processor = rec.processor;
    row.latency_us = rec.service_us();
    row.hits = rec.result.cache_hits;
    row.misses = rec.result.cache_misses;
    m.hit_total += row.hits;
    m.miss_total += row.misses;
    latency_sum += row.latency_us;
    if (i < workload.hotspot.size()) {
      m.hotspot_hits[workload.hotspot[i]] += row.hits;
      m.hotspot_misses[workload.hotspot[i]] += row.misses;
    }
    m.rows.push_back(row);
  }
  m.mean_latency_us = m.rows.empty() ? 0.0 : latency_sum / static_cast<double>(m.rows.size());
  return m;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Graph& graph,
                                const Workload& workload, const Artifacts& artifacts) {
  cfg.router.validate();
  if (cfg.storage_servers == 0) throw ConfigError("need at least one storage server");
  if (cfg.repetitions == 0) throw ConfigError("repetitions must be >= 1");
  const Strategy strategy = cfg.router.strategy;
  if (strategy_needs_landmarks(strategy) && !artifacts.landmarks) {
    throw ConfigError("strategy '" + std::string(to_string(strategy)) +
                      "' needs the landmark index artifact; run preprocess first");
  }
  if (strategy_needs_embedding(strategy) && !artifacts.embedding) {
    throw ConfigError("strategy 'embed' needs the embedding table artifact; run preprocess first");
  }
  Artifacts art = artifacts;
  if (strategy == Strategy::kLandmark &&
      art.landmarks->assignment().num_processors != cfg.router.num_processors) {
    auto copy = std::make_shared<LandmarkIndex>(*art.landmarks);
    copy->assign_processors(cfg.router.num_processors);
    art.landmarks = std::move(copy);
  }

  const std::size_t cache_bytes = strategy == Strategy::kNoCache ? 0 : cfg.cache_bytes;
  StorageTier tier(graph, StoragePartitionMap(cfg.storage_servers));

  DispatchOptions opts;
  opts.cost = cfg.cost;
  opts.cache_enabled = cache_bytes > 0;
  opts.storage_servers = cfg.storage_servers;
  opts.arrival_gap_us = cfg.arrival_gap_us;
  opts.window = cfg.window;

  ExperimentResult out;
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    Cluster cluster(cfg, tier, cache_bytes);
    Router router(cfg.router, art.landmarks, art.embedding);
    if (!cfg.cold_start) router.dispatch(workload.queries, cluster.handles(), opts);
    tier.reset_counters();
    DispatchReport report = router.dispatch(workload.queries, cluster.handles(), opts);
    std::string run_id = cfg.run_id;
    if (cfg.repetitions > 1) run_id += "-r" + std::to_string(rep);
    out.runs.push_back(
        collect(cfg, workload, art, report, cache_bytes, tier.total_requests(), run_id));
    if (rep + 1 == cfg.repetitions) {
      out.results.clear();
      for (auto& rec : report.records) out.results.push_back(rec.result);
      out.report = std::move(report);
    }
  }
  return out;
}

std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::kProcessors: return "processors";
    case SweepParam::kStorage: return "storage";
    case SweepParam::kCache: return "cache";
    case SweepParam::kLoadFactor: return "load_factor";
    case SweepParam::kAlpha: return "alpha";
    case SweepParam::kDimensions: return "dimensions";
    case SweepParam::kLandmarks: return "landmarks";
  }
  return "unknown";
}

SweepParam parse_sweep_param(std::string_view s) {
  for (auto p : {SweepParam::kProcessors, SweepParam::kStorage, SweepParam::kCache,
                 SweepParam::kLoadFactor, SweepParam::kAlpha, SweepParam::kDimensions,
                 SweepParam::kLandmarks}) {
    if (s == to_string(p)) return p;
  }
  if (s == "load-factor") return SweepParam::kLoadFactor;
  throw ConfigError("unknown sweep parameter '" + std::string(s) + "'");
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::size_t as_count(double v, std::string_view what) {
  if (!(v >= 0) || v != std::floor(v)) {
    throw ConfigError(std::string(what) + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<RunMetrics> sweep(const ExperimentConfig& base, SweepParam param,
                              const std::vector<double>& values, const Graph& graph,
                              const Workload& workload) {
  std::vector<RunMetrics> out;
  Artifacts shared;
  const bool rebuilds = param == SweepParam::kDimensions || param == SweepParam::kLandmarks;
  if (!rebuilds) shared = build_artifacts(graph, base);
  for (double v : values) {
    ExperimentConfig cfg = base;
    cfg.repetitions = 1;
    switch (param) {
      case SweepParam::kProcessors: cfg.router.num_processors = as_count(v, "processors"); break;
      case SweepParam::kStorage: cfg.storage_servers = as_count(v, "storage"); break;
      case SweepParam::kCache: cfg.cache_bytes = as_count(v, "cache"); break;
      case SweepParam::kLoadFactor: cfg.router.load_factor = v; break;
      case SweepParam::kAlpha: cfg.router.alpha = v; break;
      case SweepParam::kDimensions: cfg.embed.dimensions = as_count(v, "dimensions"); break;
      case SweepParam::kLandmarks: cfg.landmarks.target_count = as_count(v, "landmarks"); break;
    }
    cfg.run_id = base.run_id + "-" + std::string(to_string(param)) + "=" + fmt_double(v);
    const Artifacts art = rebuilds ? build_artifacts(graph, cfg) : shared;
    out.push_back(run_experiment(cfg, graph, workload, art).runs.front());
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(v[i]);
  }
  return s;
}

template <class T>
T parse_field(std::string_view s, std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(line, "bad numeric field '" + std::string(s) + "'");
  }
  return v;
}

template <class T>
std::vector<T> split_list(std::string_view s, std::size_t line) {
  std::vector<T> v;
  if (s.empty()) return v;
  while (true) {
    const auto semi = s.find(';');
    v.push_back(parse_field<T>(s.substr(0, semi), line));
    if (semi == std::string_view::npos) break;
    s = s.substr(semi + 1);
  }
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line = line.substr(comma + 1);
  }
  return out;
}

void check_token(std::string_view s, std::string_view what) {
  if (s.empty() || s.find_first_of(",:\n\r#") != std::string_view::npos) {
    throw ConfigError(std::string(what) + " '" + std::string(s) +
                      "' must be non-empty and free of , : # and newlines");
  }
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<RunMetrics>& runs,
               const std::vector<std::pair<std::string, std::string>>& provenance,
               bool per_query_rows) {
  for (const auto& [k, v] : provenance) {
    check_token(k, "provenance key");
    if (k.find('=') != std::string::npos || v.find('\n') != std::string::npos) {
      throw ConfigError("provenance entries must not contain '=' in keys or newlines");
    }
    out << "# " << k << '=' << v << '\n';
  }
  for (const auto& m : runs) {
    check_token(m.run_id, "run id");
    const std::string p = "# metric:" + m.run_id + ":";
    out << p << "total_queries=" << m.total_queries << '\n'
        << p << "makespan_us=" << fmt_double(m.makespan_us) << '\n'
        << p << "throughput_qps=" << fmt_double(m.throughput_qps) << '\n'
        << p << "completed=" << join(m.completed_per_processor) << '\n'
        << p << "storage_requests=" << m.storage_requests << '\n'
        << p << "steals=" << m.steals << '\n'
        << p << "fallbacks=" << m.fallbacks << '\n'
        << p << "conservation_violations=" << m.conservation_violations << '\n'
        << p << "max_in_flight=" << m.max_in_flight << '\n'
        << p << "hotspot_hits=" << join(m.hotspot_hits) << '\n'
        << p << "hotspot_misses=" << join(m.hotspot_misses) << '\n';
  }
  out << kCsvHeader << '\n';
  for (const auto& m : runs) {
    const std::string prefix = m.run_id + ',' + std::string(to_string(m.strategy)) + ',' +
                               std::to_string(m.P) + ',' + std::to_string(m.S) + ',' +
                               std::to_string(m.cache_bytes) + ',' + fmt_double(m.load_factor) +
                               ',' + fmt_double(m.alpha) + ',' + std::to_string(m.D) + ',' +
                               std::to_string(m.L) + ',';
    if (per_query_rows) {
      for (const auto& r : m.rows) {
        out << prefix << r.query_id << ',' << to_string(r.kind) << ',' << r.processor << ','
            << fmt_double(r.latency_us) << ',' << r.hits << ',' << r.misses << '\n';
      }
    }
    out << prefix << "SUMMARY,ALL,," << fmt_double(m.mean_latency_us) << ',' << m.hit_total
        << ',' << m.miss_total << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<RunMetrics>& runs,
               const std::vector<std::pair<std::string, std::string>>& provenance,
               bool per_query_rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_csv(out, runs, provenance, per_query_rows);
  if (!out) throw Error("write failed: " + path.string());
}

CsvDocument read_csv(std::istream& in) {
  CsvDocument doc;
  std::map<std::string, std::size_t> by_id;
  auto run_for = [&](const std::string& id) -> RunMetrics& {
    auto [it, fresh] = by_id.emplace(id, doc.runs.size());
    if (fresh) {
      doc.runs.emplace_back();
      doc.runs.back().run_id = id;
    }
    return doc.runs[it->second];
  };

  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen && line.rfind("# ", 0) == 0) {
      const std::string_view body = std::string_view(line).substr(2);
      // Run ids may contain '=' (sweep points), metric names and values never
      // contain ':', so split metric lines at the last colon.
      const bool is_metric = body.rfind("metric:", 0) == 0;
      const auto colon = is_metric ? body.rfind(':') : std::string_view::npos;
      const auto eq = body.find('=', colon == std::string_view::npos ? 0 : colon);
      if (eq == std::string_view::npos) throw ParseError(lineno, "comment without '='");
      const std::string_view key = body.substr(0, eq);
      const std::string_view val = body.substr(eq + 1);
      if (is_metric) {
        if (colon < 7) throw ParseError(lineno, "bad metric key");
        RunMetrics& m = run_for(std::string(body.substr(7, colon - 7)));
        const std::string_view k = body.substr(colon + 1, eq - colon - 1);
        if (k == "total_queries") m.total_queries = parse_field<std::size_t>(val, lineno);
        else if (k == "makespan_us") m.makespan_us = parse_field<double>(val, lineno);
        else if (k == "throughput_qps") m.throughput_qps = parse_field<double>(val, lineno);
        else if (k == "completed") m.completed_per_processor = split_list<std::size_t>(val, lineno);
        else if (k == "storage_requests") m.storage_requests = parse_field<std::uint64_t>(val, lineno);
        else if (k == "steals") m.steals = parse_field<std::size_t>(val, lineno);
        else if (k == "fallbacks") m.fallbacks = parse_field<std::size_t>(val, lineno);
        else if (k == "conservation_violations") m.conservation_violations = parse_field<std::size_t>(val, lineno);
        else if (k == "max_in_flight") m.max_in_flight = parse_field<std::size_t>(val, lineno);
        else if (k == "hotspot_hits") m.hotspot_hits = split_list<std::uint64_t>(val, lineno);
        else if (k == "hotspot_misses") m.hotspot_misses = split_list<std::uint64_t>(val, lineno);
        else throw ParseError(lineno, "unknown metric '" + std::string(k) + "'");
      } else {
        doc.provenance.emplace_back(std::string(key), std::string(val));
      }
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw ParseError(lineno, "unexpected CSV header");
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 15) throw ParseError(lineno, "expected 15 columns");
    RunMetrics& m = run_for(std::string(f[0]));
    try {
      m.strategy = parse_strategy(f[1]);
    } catch (const ConfigError& e) {
      throw ParseError(lineno, e.what());
    }
    m.P = parse_field<std::size_t>(f[2], lineno);
    m.S = parse_field<std::size_t>(f[3], lineno);
    m.cache_bytes = parse_field<std::size_t>(f[4], lineno);
    m.load_factor = parse_field<double>(f[5], lineno);
    m.alpha = parse_field<double>(f[6], lineno);
    m.D = parse_field<std::size_t>(f[7], lineno);
    m.L = parse_field<std::size_t>(f[8], lineno);
    if (f[9] == "SUMMARY") {
      if (f[10] != "ALL" || !f[11].empty()) throw ParseError(lineno, "malformed summary row");
      m.mean_latency_us = parse_field<double>(f[12], lineno);
      m.hit_total = parse_field<std::uint64_t>(f[13], lineno);
      m.miss_total = parse_field<std::uint64_t>(f[14], lineno);
      continue;
    }
    QueryRow r;
    r.query_id = parse_field<std::uint64_t>(f[9], lineno);
    try {
      r.kind = parse_query_kind(f[10]);
    } catch (const ConfigError& e) {
      throw ParseError(lineno, e.what());
    }
    r.processor = parse_field<std::size_t>(f[11], lineno);
    r.latency_us = parse_field<double>(f[12], lineno);
    r.hits = parse_field<std::uint64_t>(f[13], lineno);
    r.misses = parse_field<std::uint64_t>(f[14], lineno);
    m.rows.push_back(r);
  }
  if (!header_seen) throw ParseError(lineno, "missing CSV header");
  return doc;
}

CsvDocument read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return read_csv(in);
}

}  // namespace graphroute
