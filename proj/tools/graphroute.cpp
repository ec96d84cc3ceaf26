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

// graphroute command line: graph and workload generation, preprocessing,
// experiment runs and sweeps, and standalone storage / processor servers.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "graphroute/experiment.hpp"
#include "graphroute/generators.hpp"
#include "graphroute/tcp.hpp"

namespace fs = std::filesystem;
using namespace graphroute;

namespace {

constexpr char kLandmarkFile[] = "landmarks.idx";
constexpr char kEmbeddingFile[] = "embedding.emb";

struct GraphOptions {
  std::string graph;  // edge-list path or generator spec
  bool labeled = false;
  std::string node_labels;
};

struct RunOptions {
  GraphOptions g;
  std::string strategy = "next-ready";
  std::size_t processors = 4;
  std::size_t storage_servers = 1;
  double load_factor = 20.0;
  double alpha = 0.5;
  std::size_t dimensions = 10;
  std::size_t landmarks = 96;
  std::uint32_t separation = 3;
  std::size_t cache_bytes = kDefaultCacheBytes;
  std::string transport = "inproc";
  std::uint64_t seed = 1;
  std::string workload = "hotspots=100,per=10,r=2,h=2";
  std::string metrics_out;
  std::string artifacts;
  std::string run_id = "run";
  std::size_t window = 0;
  double arrival_gap_us = 0.0;
  double storage_latency_us = 10.0;
  std::size_t repetitions = 1;
  bool no_steal = false;
  bool warm = false;
};

void add_graph_options(CLI::App* app, GraphOptions& g) {
  app->add_option("--graph", g.graph,
                  "Edge-list file, or a generator spec such as "
                  "power-law:n=100000,m=4,communities=100,seed=1")
      ->required();
  app->add_flag("--labeled", g.labeled, "Edge list has a third column with edge labels");
  app->add_option("--node-labels", g.node_labels, "File of 'node_id label' lines");
}

Graph load_graph(const GraphOptions& g, std::string* provenance) {
  Graph graph;
  if (fs::exists(g.graph)) {
    graph = load_edge_list(g.graph, g.labeled);
    if (provenance) *provenance = "file:" + g.graph;
  } else {
    const auto spec = GeneratorSpec::parse(g.graph);
    graph = generate_graph(spec);
    if (provenance) *provenance = spec.to_string();
  }
  if (!g.node_labels.empty()) load_node_labels(graph, g.node_labels);
  return graph;
}

Workload load_or_generate_workload(const Graph& graph, const std::string& text,
                                   std::uint64_t seed) {
  if (fs::exists(text)) return load_workload(text);
  WorkloadSpec spec = WorkloadSpec::parse(text);
  if (text.find("seed=") == std::string::npos) spec.seed = seed;
  return generate_workload(graph, spec);
}

void add_run_options(CLI::App* app, RunOptions& o) {
  add_graph_options(app, o.g);
  app->add_option("--strategy", o.strategy, "next-ready | hash | landmark | embed | no-cache")
      ->check(CLI::IsMember({"next-ready", "hash", "landmark", "embed", "no-cache"}));
  app->add_option("--processors", o.processors, "Number of query processors P")
      ->check(CLI::PositiveNumber);
  app->add_option("--storage-servers", o.storage_servers, "Number of storage servers S")
      ->check(CLI::PositiveNumber);
  app->add_option("--load-factor", o.load_factor, "Load factor (inf allowed)");
  app->add_option("--alpha", o.alpha, "Smoothing factor for mean coordinates")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--dimensions", o.dimensions, "Embedding dimensions D")
      ->check(CLI::PositiveNumber);
  app->add_option("--landmarks", o.landmarks, "Landmark count L")->check(CLI::PositiveNumber);
  app->add_option("--separation", o.separation, "Minimum landmark separation in hops");
  app->add_option("--cache-bytes", o.cache_bytes, "Per-processor cache capacity in bytes");
  app->add_option("--transport", o.transport, "inproc | tcp")
      ->check(CLI::IsMember({"inproc", "tcp"}));
  app->add_option("--seed", o.seed, "Seed for routing, embedding and generated workloads");
  app->add_option("--workload", o.workload,
                  "Workload file, or a spec such as hotspots=100,per=10,r=2,h=2");
  app->add_option("--metrics-out", o.metrics_out, "CSV output path (stdout when empty)");
  app->add_option("--artifacts", o.artifacts, "Directory written by 'preprocess'");
  app->add_option("--run-id", o.run_id, "Run identifier written to the CSV");
  app->add_option("--window", o.window, "Closed-loop client window (0 = open loop)");
  app->add_option("--arrival-gap-us", o.arrival_gap_us, "Simulated inter-arrival time");
  app->add_option("--storage-latency-us", o.storage_latency_us,
                  "Simulated round trip of one storage get");
  app->add_option("--repetitions", o.repetitions, "Repetitions per run")
      ->check(CLI::PositiveNumber);
  app->add_flag("--no-steal", o.no_steal, "Disable query stealing");
  app->add_flag("--warm", o.warm, "Run the workload once unmeasured before measuring");
}

ExperimentConfig make_config(const RunOptions& o) {
  ExperimentConfig cfg;
  cfg.run_id = o.run_id;
  cfg.router.strategy = parse_strategy(o.strategy);
  cfg.router.num_processors = o.processors;
  cfg.router.load_factor = o.load_factor;
  cfg.router.alpha = o.alpha;
  cfg.router.steal = !o.no_steal;
  cfg.router.seed = o.seed;
  cfg.storage_servers = o.storage_servers;
  cfg.cache_bytes = o.cache_bytes;
  cfg.transport = parse_transport(o.transport);
  cfg.window = o.window;
  cfg.arrival_gap_us = o.arrival_gap_us;
  cfg.cost.storage_latency_us = o.storage_latency_us;
  cfg.repetitions = o.repetitions;
  cfg.cold_start = !o.warm;
  cfg.landmarks.target_count = o.landmarks;
  cfg.landmarks.separation_threshold = o.separation;
  cfg.embed.dimensions = o.dimensions;
  cfg.embed.seed = o.seed;
  return cfg;
}

Artifacts load_artifacts(const RunOptions& o, const Graph& graph, const ExperimentConfig& cfg) {
  if (o.artifacts.empty()) return build_artifacts(graph, cfg);
  Artifacts a;
  const fs::path dir(o.artifacts);
  if (fs::exists(dir / kLandmarkFile)) {
    a.landmarks = std::make_shared<LandmarkIndex>(LandmarkIndex::load(dir / kLandmarkFile));
  }
  if (fs::exists(dir / kEmbeddingFile)) {
    a.embedding = std::make_shared<EmbeddingTable>(EmbeddingTable::load(dir / kEmbeddingFile));
  }
  return a;
}

std::vector<std::pair<std::string, std::string>> provenance(const RunOptions& o,
                                                            const std::string& graph,
                                                            const Workload& w) {
  return {{"graph", graph},
          {"workload", w.spec.to_string()},
          {"transport", o.transport},
          {"seed", std::to_string(o.seed)},
          {"storage_latency_us", std::to_string(o.storage_latency_us)},
          {"window", std::to_string(o.window)}};
}

void emit(const RunOptions& o, const std::vector<RunMetrics>& runs,
          const std::vector<std::pair<std::string, std::string>>& prov, bool per_query) {
  if (o.metrics_out.empty()) {
    write_csv(std::cout, runs, prov, per_query);
  } else {
    write_csv(fs::path(o.metrics_out), runs, prov, per_query);
  }
  for (const auto& m : runs) {
    std::fprintf(stderr,
                 "%s: strategy=%s P=%zu hits=%llu misses=%llu hit_rate=%.4f "
                 "throughput_qps=%.1f mean_latency_us=%.2f steals=%zu\n",
                 m.run_id.c_str(), std::string(to_string(m.strategy)).c_str(), m.P,
                 static_cast<unsigned long long>(m.hit_total),
                 static_cast<unsigned long long>(m.miss_total), m.hit_rate(), m.throughput_qps,
                 m.mean_latency_us, m.steals);
  }
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad sweep value '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("sweep needs at least one value");
  return out;
}

volatile std::sig_atomic_t g_stop = 0;

void wait_for_signal() {
  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphroute: cache-aware routing of h-hop graph queries"};
  app.require_subcommand(1);

  // generate-graph
  auto* gen = app.add_subcommand("generate-graph", "Write a synthetic graph as an edge list");
  std::string gen_spec, gen_out;
  gen->add_option("--spec", gen_spec, "Generator spec, e.g. grid:rows=100,cols=100")->required();
  gen->add_option("--out", gen_out, "Edge-list output path")->required();

  // generate-workload
  auto* genw = app.add_subcommand("generate-workload", "Write a hotspot workload file");
  GraphOptions genw_graph;
  std::string genw_spec = "hotspots=100,per=10,r=2,h=2", genw_out;
  std::uint64_t genw_seed = 1;
  add_graph_options(genw, genw_graph);
  genw->add_option("--spec", genw_spec, "Workload spec");
  genw->add_option("--seed", genw_seed, "Seed when the spec has none");
  genw->add_option("--out", genw_out, "Workload output path")->required();

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Build landmark index and embedding snapshots");
  RunOptions pre_o;
  pre_o.strategy = "embed";
  add_run_options(pre, pre_o);
  pre->get_option("--artifacts")->required();

  // run
  auto* run = app.add_subcommand("run", "Run one experiment and write the CSV");
  RunOptions run_o;
  add_run_options(run, run_o);

  // sweep
  auto* sw = app.add_subcommand("sweep", "Run one experiment per parameter value");
  RunOptions sw_o;
  std::string sw_param, sw_values;
  bool sw_rows = false;
  add_run_options(sw, sw_o);
  sw->add_option("--param", sw_param,
                 "processors | storage | cache | load_factor | alpha | dimensions | landmarks")
      ->required();
  sw->add_option("--values", sw_values, "Comma-separated values")->required();
  sw->add_flag("--per-query", sw_rows, "Also write per-query rows");

  // serve-storage
  auto* ss = app.add_subcommand("serve-storage", "Serve storage partitions over TCP");
  GraphOptions ss_graph;
  std::size_t ss_servers = 1;
  std::uint16_t ss_port = 0;
  add_graph_options(ss, ss_graph);
  ss->add_option("--storage-servers", ss_servers, "Number of storage servers S")
      ->check(CLI::PositiveNumber);
  ss->add_option("--port", ss_port, "First port (0 = ephemeral)");

  // serve-processor
  auto* sp = app.add_subcommand("serve-processor", "Serve one query processor over TCP");
  std::vector<std::string> sp_storage;
  std::size_t sp_cache = kDefaultCacheBytes;
  std::uint16_t sp_port = 0;
  sp->add_option("--storage", sp_storage, "Storage endpoints host:port, in server order")
      ->required()
      ->delimiter(',');
  sp->add_option("--cache-bytes", sp_cache, "Cache capacity in bytes");
  sp->add_option("--port", sp_port, "Listen port (0 = ephemeral)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0, every usage error exits 2.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      const Graph g = generate_graph(GeneratorSpec::parse(gen_spec));
      write_edge_list(g, gen_out);
      std::fprintf(stderr, "wrote %zu nodes, %zu edges to %s\n", g.node_count(), g.edge_count(),
                   gen_out.c_str());
    } else if (*genw) {
      const Graph g = load_graph(genw_graph, nullptr);
      const Workload w = load_or_generate_workload(g, genw_spec, genw_seed);
      save_workload(w, genw_out);
      std::fprintf(stderr, "wrote %zu queries (%zu centers resampled) to %s\n",
                   w.queries.size(), w.resampled_centers, genw_out.c_str());
    } else if (*pre) {
      const Graph g = load_graph(pre_o.g, nullptr);
      ExperimentConfig cfg = make_config(pre_o);
      const fs::path dir(pre_o.artifacts);
      fs::create_directories(dir);
      LandmarkIndex index = LandmarkIndex::build(g, cfg.landmarks);
      index.assign_processors(cfg.router.num_processors);
      index.save(dir / kLandmarkFile);
      std::fprintf(stderr, "landmarks: %zu, table %zu bytes\n",
                   index.landmarks().landmarks.size(), index.bytes());
      if (cfg.router.strategy == Strategy::kEmbed) {
        const EmbeddingTable emb = EmbeddingTable::build(g, index, cfg.embed);
        emb.save(dir / kEmbeddingFile);
        std::fprintf(stderr, "embedding: D=%zu, %zu nodes, %zu flagged\n", emb.dimensions(),
                     emb.node_count(), emb.flagged_count());
      }
    } else if (*run) {
      std::string graph_prov;
      const Graph g = load_graph(run_o.g, &graph_prov);
      const Workload w = load_or_generate_workload(g, run_o.workload, run_o.seed);
      const ExperimentConfig cfg = make_config(run_o);
      const Artifacts art = load_artifacts(run_o, g, cfg);
      const auto result = run_experiment(cfg, g, w, art);
      emit(run_o, result.runs, provenance(run_o, graph_prov, w), true);
    } else if (*sw) {
      std::string graph_prov;
      const Graph g = load_graph(sw_o.g, &graph_prov);
      const Workload w = load_or_generate_workload(g, sw_o.workload, sw_o.seed);
      const ExperimentConfig cfg = make_config(sw_o);
      const auto runs = sweep(cfg, parse_sweep_param(sw_param), parse_values(sw_values), g, w);
      auto prov = provenance(sw_o, graph_prov, w);
      prov.emplace_back("sweep", sw_param + "=" + sw_values);
      emit(sw_o, runs, prov, sw_rows);
    } else if (*ss) {
      Graph g = load_graph(ss_graph, nullptr);
      StorageTier tier(g, StoragePartitionMap(ss_servers));
      std::vector<std::unique_ptr<StorageServer>> servers;
      for (std::size_t s = 0; s < ss_servers; ++s) {
        const auto port = ss_port == 0 ? 0 : static_cast<std::uint16_t>(ss_port + s);
        servers.push_back(std::make_unique<StorageServer>(tier, &g, port));
        std::printf("storage %zu %s\n", s, servers.back()->endpoint().to_string().c_str());
      }
      std::fflush(stdout);
      wait_for_signal();
      for (auto& s : servers) s->stop();
    } else if (*sp) {
      std::vector<Endpoint> eps;
      for (const auto& e : sp_storage) eps.push_back(Endpoint::parse(e));
      TcpStorageClient client(eps, StoragePartitionMap(eps.size()));
      Processor processor(client, sp_cache);
      ProcessorServer server(processor, sp_port);
      std::printf("processor %s\n", server.endpoint().to_string().c_str());
      std::fflush(stdout);
      wait_for_signal();
      server.stop();
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
