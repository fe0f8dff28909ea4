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

#ifndef S2DN_SUBGRAPH_HPP_
#define S2DN_SUBGRAPH_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "s2dn/kg_store.hpp"

namespace s2dn {

using LocalIndex = std::uint32_t;

struct LocalEdge {
  LocalIndex src = 0;
  RelationId rel = 0;
  LocalIndex dst = 0;

  auto operator<=>(const LocalEdge&) const = default;
};

// Enclosing subgraph of a target triple. Nodes are ascending global ids,
// edges are sorted lexicographically and reference local indices.
struct EnclosingSubgraph {
  Triple target;
  int label = 0;
  std::uint32_t k = 1;
  std::vector<EntityId> nodes;
  std::vector<LocalEdge> edges;
  std::vector<std::uint32_t> d_u;
  std::vector<std::uint32_t> d_v;

  std::size_t num_nodes() const { return nodes.size(); }
  LocalIndex local_of(EntityId e) const;
  LocalIndex local_u() const { return local_of(target.head); }
  LocalIndex local_v() const { return local_of(target.tail); }

  bool operator==(const EnclosingSubgraph&) const = default;
};

// Throws FormatError naming the first violated invariant.
void validate_subgraph(const EnclosingSubgraph& sub);

// Relation-agnostic undirected BFS truncated at k hops, as (entity, distance)
// pairs in ascending entity order.
std::vector<std::pair<EntityId, std::uint32_t>> khop_distances(
    const KnowledgeGraph& graph, EntityId source, std::uint32_t k);

EnclosingSubgraph extract_enclosing(const KnowledgeGraph& graph,
                                    const Triple& target, std::uint32_t k,
                                    bool drop_target_edge, int label);

struct ExtractionRequest {
  Triple target;
  int label = 0;
  bool drop_target_edge = false;
};

// Output order equals input order for any thread count; 0 picks the
// hardware concurrency.
std::vector<EnclosingSubgraph> extract_batch(
    const KnowledgeGraph& graph, std::span<const ExtractionRequest> requests,
    std::uint32_t k, unsigned threads = 1);

// Double-radius labels: one-hot(d_u) concatenated with one-hot(d_v), with
// u fixed to (0, 1) and v fixed to (1, 0). Shape |nodes| x 2(k+1).
Eigen::MatrixXd featurize(const EnclosingSubgraph& sub);

// Canonical single-line JSON: keys target, label, k, nodes, edges, d_u, d_v
// in that order, no whitespace.
std::string serialize_subgraph(const EnclosingSubgraph& sub);
EnclosingSubgraph parse_subgraph(std::string_view line);

void write_subgraph_cache(std::span<const EnclosingSubgraph> subs,
                          const std::filesystem::path& path);
std::vector<EnclosingSubgraph> read_subgraph_cache(
    const std::filesystem::path& path);

}  // namespace s2dn

#endif  // S2DN_SUBGRAPH_HPP_
