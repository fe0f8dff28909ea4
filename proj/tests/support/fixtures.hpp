// Copyright 2026 The S2DN Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared fixtures and oracles for the unit and acceptance tests.

#ifndef S2DN_TESTS_SUPPORT_FIXTURES_HPP_
#define S2DN_TESTS_SUPPORT_FIXTURES_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include "s2dn/autodiff.hpp"
#include "s2dn/config.hpp"
#include "s2dn/kg_store.hpp"
#include "s2dn/parameters.hpp"
#include "s2dn/rng.hpp"
#include "s2dn/subgraph.hpp"

namespace s2dn::testing {

using Row = std::tuple<std::string, std::string, std::string>;

KnowledgeGraph graph_from(const std::vector<Row>& rows);

// Erdos-Renyi style multigraph over `n` entities and `r` relations: each
// ordered pair (i != j) receives an edge with probability `density`.
KnowledgeGraph random_graph(DetRng& rng, std::size_t n, std::size_t r, double density);

// Brute-force enclosing subgraph: all-pairs distances by Floyd-Warshall on
// the full graph, node selection by d(i,u) <= k and d(i,v) <= k, induced
// edges, then Floyd-Warshall again on the induced subgraph for d_u / d_v.
EnclosingSubgraph brute_force_enclosing(const KnowledgeGraph& graph, const Triple& target,
                                        std::uint32_t k, bool drop_target_edge, int label);

// Family trees with a planted rule parent(x,y) & parent(y,z) => grandparent(x,z).
// Each family: a root with two children, each child with two children.
// Relations: parent, grandparent, sibling, spouse.
struct PlantedDataset {
  KnowledgeGraph train;            // training graph (all relations)
  std::vector<Triple> valid;       // held-out grandparent edges, train id space
  KnowledgeGraph test_graph;       // disjoint entities, same relation vocabulary
  std::vector<Triple> test;        // held-out grandparent edges, test id space
};

PlantedDataset planted_dataset(std::size_t train_families, std::size_t test_families,
                               std::uint64_t seed);

// The 30-triple smoke graph shipped as tests/fixtures/smoke30.tsv.
std::filesystem::path fixture_path(const std::string& name);

// Small, fast model settings for tests.
ModelConfig tiny_config(std::uint32_t k = 2);

// Relative error ||a - n|| / max(||a||, ||n||) between the analytic
// gradient of `loss` and central differences, per parameter group; the
// maximum over groups is returned. `loss` must be a pure function of the
// parameter values.
struct GradCheck {
  double max_rel_error = 0.0;
  std::string worst;
};
GradCheck finite_difference_check(const std::function<ad::Var()>& loss,
                                  const std::vector<Parameter>& params, double h = 1e-5);

// Five-node fixture graph with three relations, used by gradient checks.
KnowledgeGraph five_node_graph();

std::filesystem::path temp_dir(const std::string& tag);

}  // namespace s2dn::testing

#endif  // S2DN_TESTS_SUPPORT_FIXTURES_HPP_
