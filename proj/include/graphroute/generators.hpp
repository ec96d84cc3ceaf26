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

#include <string>
#include <string_view>

#include "graphroute/graph.hpp"

namespace graphroute {

enum class GeneratorKind { kGrid, kRandom, kPowerLaw };

// Synthetic graph recipe. Text form: "grid:rows=100,cols=100",
// "random:n=1000,edges=5000,seed=3", "power-law:n=100000,m=4,seed=1".
// `labels` > 0 gives node i the label "L<k>" for a seeded k < labels.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kPowerLaw;
  std::size_t n = 1000;       // random, power-law
  std::size_t rows = 32;      // grid
  std::size_t cols = 32;      // grid
  std::size_t edges = 4000;   // random: directed edge count
  std::size_t m = 4;          // power-law: out-edges per new node
  std::size_t communities = 0;  // power-law: 0 = one global pool
  std::size_t locality = 90;    // power-law: percent of picks kept in-community
  std::size_t labels = 0;
  std::uint64_t seed = 1;

  static GeneratorSpec parse(std::string_view text);
  std::string to_string() const;
};

// 4-neighbor lattice with both edge directions; node id = r * cols + c.
Graph make_grid(std::size_t rows, std::size_t cols);

// `edges` distinct directed edges drawn uniformly (no self loops).
Graph make_random(std::size_t n, std::size_t edges, std::uint64_t seed);

// Preferential attachment: a seed clique of m + 1 nodes, then every new node
// links to m distinct existing nodes picked proportionally to degree. Edges
// point from the new node to the old one.
//
// With communities = C > 0, node v belongs to block v * C / n and each pick
// is drawn from the degree-weighted pool of its own block with probability
// locality / 100 (from the global pool otherwise), which keeps the power-law
// degree tail while adding community structure.
Graph make_power_law(std::size_t n, std::size_t m, std::uint64_t seed,
                     std::size_t communities = 0, std::size_t locality = 90);

Graph generate_graph(const GeneratorSpec& spec);

}  // namespace graphroute
