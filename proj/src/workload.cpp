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

#include "graphroute/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "graphroute/landmark.hpp"

namespace graphroute {

namespace {

constexpr std::uint64_t kCenterStream = 0xc3a7e5;
constexpr std::uint64_t kPickStream = 0x9d1c4b;
constexpr std::uint64_t kSeedStream = 0x5eed5;
constexpr char kMagic[] = "# graphroute-workload v1";

std::size_t below(std::uint64_t bits, std::size_t n) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

template <class T>
T parse_num(std::string_view s, std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

WorkloadSpec WorkloadSpec::parse(std::string_view text) {
  WorkloadSpec spec;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view kv = text.substr(0, comma);
    text = comma == std::string_view::npos ? "" : text.substr(comma + 1);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw ConfigError("workload parameter without '='");
    const std::string_view k = kv.substr(0, eq);
    const std::string_view v = kv.substr(eq + 1);
    try {
      if (k == "hotspots") spec.num_hotspots = parse_num<std::size_t>(v, 0);
      else if (k == "per") spec.queries_per_hotspot = parse_num<std::size_t>(v, 0);
      else if (k == "r") spec.r = parse_num<std::uint32_t>(v, 0);
      else if (k == "h") spec.h = parse_num<std::uint32_t>(v, 0);
      else if (k == "seed") spec.seed = parse_num<std::uint64_t>(v, 0);
      else if (k == "restart") spec.restart_prob = parse_num<double>(v, 0);
      else if (k == "label") spec.label_filter = std::string(v);
      else throw ConfigError("unknown workload parameter '" + std::string(k) + "'");
    } catch (const ParseError&) {
      throw ConfigError("workload parameter " + std::string(k) + ": bad value");
    }
  }
  return spec;
}

std::string WorkloadSpec::to_string() const {
  std::string s = "hotspots=" + std::to_string(num_hotspots) +
                  ",per=" + std::to_string(queries_per_hotspot) + ",r=" + std::to_string(r) +
                  ",h=" + std::to_string(h) + ",seed=" + std::to_string(seed);
  if (restart_prob != kDefaultRestartProb) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, restart_prob);
    s += ",restart=" + std::string(buf, res.ptr);
  }
  if (label_filter) s += ",label=" + *label_filter;
  return s;
}

Workload generate_workload(const Graph& graph, const WorkloadSpec& spec) {
  if (spec.queries_per_hotspot == 0 || spec.num_hotspots == 0) {
    throw ConfigError("workload needs at least one hotspot and one query per hotspot");
  }
  if (spec.h < 1) throw ConfigError("traversal hops must be >= 1");
  if (graph.node_count() < spec.num_hotspots) {
    throw ConfigError("graph has " + std::to_string(graph.node_count()) +
                      " nodes, fewer than the " + std::to_string(spec.num_hotspots) +
                      " hotspots requested");
  }
  Workload w;
  w.spec = spec;
  std::vector<NodeId> pool = graph.node_ids();
  std::size_t drawn = 0;
  std::uint64_t pick_counter = 0;

  while (w.centers.size() < spec.num_hotspots) {
    if (drawn == pool.size()) {
      throw ConfigError("only " + std::to_string(w.centers.size()) +
                        " nodes have an r-hop ball with " +
                        std::to_string(spec.queries_per_hotspot) + " nodes");
    }
    // Partial Fisher-Yates: pool[0, drawn) are the centers tried so far.
    const std::size_t j =
        drawn + below(counter_random(spec.seed ^ kCenterStream, drawn), pool.size() - drawn);
    std::swap(pool[drawn], pool[j]);
    const NodeId center = pool[drawn++];

    const Slot cs = *graph.slot_of(center);
    std::vector<Slot> ball = bfs_ball(graph, std::span<const Slot>(&cs, 1), spec.r);
    if (ball.size() < spec.queries_per_hotspot) {
      ++w.resampled_centers;
      continue;
    }
    std::sort(ball.begin(), ball.end());
    const auto hotspot_index = static_cast<std::uint32_t>(w.centers.size());
    w.centers.push_back(center);
    for (std::size_t k = 0; k < spec.queries_per_hotspot; ++k) {
      const std::size_t j2 =
          k + below(counter_random(spec.seed ^ kPickStream, pick_counter++), ball.size() - k);
      std::swap(ball[k], ball[j2]);
    }
    for (std::size_t k = 0; k < spec.queries_per_hotspot; ++k) {
      const std::uint64_t i = w.queries.size();
      const NodeId source = graph.id_at(ball[k]);
      const std::uint64_t seed = counter_random(spec.seed ^ kSeedStream, i);
      Query q;
      switch (i % 3) {
        case 0:
          q = make_aggregation(source, spec.h, spec.label_filter);
          break;
        case 1:
          q = make_random_walk(source, spec.h, seed, spec.restart_prob);
          break;
        default: {
          // Another node of the same ball; the center's ball has >= 1 node
          // besides the source unless the hotspot is a single node.
          std::size_t t = below(seed, ball.size());
          if (ball.size() > 1 && ball[t] == ball[k]) t = (t + 1) % ball.size();
          q = make_reachability(source, graph.id_at(ball[t]), spec.h);
          break;
        }
      }
      q.id = i;
      w.queries.push_back(std::move(q));
      w.hotspot.push_back(hotspot_index);
    }
  }
  return w;
}

void save_workload(const Workload& w, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << kMagic << ' ' << w.spec.to_string() << '\n';
  out << "# resampled_centers=" << w.resampled_centers << '\n';
  out << "# id hotspot center kind source target h seed restart_prob label\n";
  for (std::size_t i = 0; i < w.queries.size(); ++i) {
    const Query& q = w.queries[i];
    char rp[32];
    auto res = std::to_chars(rp, rp + sizeof rp, q.restart_prob);
    out << q.id << ' ' << w.hotspot[i] << ' ' << w.centers[w.hotspot[i]] << ' '
        << to_string(q.kind) << ' ' << q.source << ' ';
    if (q.target) {
      out << *q.target;
    } else {
      out << '-';
    }
    out << ' ' << q.h << ' ' << q.seed << ' ' << std::string_view(rp, res.ptr - rp) << ' '
        << (q.label_filter ? *q.label_filter : "-") << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

Workload load_workload(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  Workload w;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind(kMagic, 0) == 0 && line.size() > sizeof kMagic) {
        w.spec = WorkloadSpec::parse(std::string_view(line).substr(sizeof kMagic));
      } else if (line.rfind("# resampled_centers=", 0) == 0) {
        w.resampled_centers = parse_num<std::size_t>(
            std::string_view(line).substr(std::strlen("# resampled_centers=")), lineno);
      }
      continue;
    }
    std::istringstream ss(line);
    std::string f[10];
    for (auto& s : f) {
      if (!(ss >> s)) throw ParseError(lineno, "expected 10 fields");
    }
    Query q;
    q.id = parse_num<std::uint64_t>(f[0], lineno);
    const auto hs = parse_num<std::uint32_t>(f[1], lineno);
    const auto center = parse_num<NodeId>(f[2], lineno);
    try {
      q.kind = parse_query_kind(f[3]);
    } catch (const ConfigError& e) {
      throw ParseError(lineno, e.what());
    }
    q.source = parse_num<NodeId>(f[4], lineno);
    if (f[5] != "-") q.target = parse_num<NodeId>(f[5], lineno);
    q.h = parse_num<std::uint32_t>(f[6], lineno);
    q.seed = parse_num<std::uint64_t>(f[7], lineno);
    q.restart_prob = parse_num<double>(f[8], lineno);
    if (f[9] != "-") q.label_filter = f[9];
    try {
      q.validate();
    } catch (const PreconditionError& e) {
      throw ParseError(lineno, e.what());
    }
    if (hs > w.centers.size()) throw ParseError(lineno, "hotspot index out of order");
    if (hs == w.centers.size()) w.centers.push_back(center);
    w.queries.push_back(std::move(q));
    w.hotspot.push_back(hs);
  }
  return w;
}

}  // namespace graphroute
