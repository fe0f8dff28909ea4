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

#include "s2dn/noise.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "s2dn/errors.hpp"
#include "s2dn/rng.hpp"

namespace s2dn {

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "semantic") return NoiseKind::kSemantic;
  if (name == "structural") return NoiseKind::kStructural;
  throw ArgumentError("unknown noise kind '" + std::string(name) +
                      "' (expected semantic or structural)");
}

std::string_view noise_kind_name(NoiseKind kind) {
  return kind == NoiseKind::kSemantic ? "semantic" : "structural";
}

std::size_t noise_count(double ratio, std::size_t count) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw ArgumentError("noise ratio must lie in [0, 1], got " +
                        std::to_string(ratio));
  }
  return static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(count) + 0.5));
}

KnowledgeGraph contaminate_semantic(const KnowledgeGraph& graph, double ratio,
                                    std::uint64_t seed) {
  const std::size_t m = noise_count(ratio, graph.triples().size());
  if (m == 0) return graph;
  std::vector<Triple> triples = graph.triples();
  const std::size_t num_rel = graph.num_relations();
  if (num_rel < 2) {
    throw ArgumentError("semantic noise needs at least two relations");
  }

  DetRng rng(seed);
  std::vector<std::size_t> positions(triples.size());
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    auto j = i + rng.uniform_int(positions.size() - i);
    std::swap(positions[i], positions[j]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    Triple& t = triples[positions[i]];
    auto r = static_cast<RelationId>(rng.uniform_int(num_rel - 1));
    if (r >= t.rel) ++r;
    t.rel = r;
  }
  return KnowledgeGraph(graph.entities(), graph.relations(), std::move(triples));
}

KnowledgeGraph contaminate_structural(const KnowledgeGraph& graph, double ratio,
                                      std::uint64_t seed) {
  const std::size_t m = noise_count(ratio, graph.triples().size());
  if (m == 0) return graph;
  const double space = static_cast<double>(graph.num_entities()) *
                       static_cast<double>(graph.num_entities()) *
                       static_cast<double>(graph.num_relations());
  if (space < static_cast<double>(graph.triple_set().size() + m)) {
    throw SaturationError("combination space too small for " +
                          std::to_string(m) + " injected triples");
  }

  DetRng rng(seed);
  std::vector<Triple> triples = graph.triples();
  TripleSet injected;
  const std::size_t max_draws = 1000 * m;
  std::size_t draws = 0;
  while (injected.size() < m) {
    if (draws++ >= max_draws) {
      throw SaturationError("rejection sampling exceeded " +
                            std::to_string(max_draws) + " draws");
    }
    Triple t;
    t.head = static_cast<EntityId>(rng.uniform_int(graph.num_entities()));
    t.rel = static_cast<RelationId>(rng.uniform_int(graph.num_relations()));
    t.tail = static_cast<EntityId>(rng.uniform_int(graph.num_entities()));
    if (graph.contains(t) || injected.contains(t)) continue;
    injected.insert(t);
    triples.push_back(t);
  }
  return KnowledgeGraph(graph.entities(), graph.relations(), std::move(triples));
}

KnowledgeGraph contaminate(const KnowledgeGraph& graph, const NoiseSpec& spec) {
  return spec.kind == NoiseKind::kSemantic
             ? contaminate_semantic(graph, spec.ratio, spec.seed)
             : contaminate_structural(graph, spec.ratio, spec.seed);
}

}  // namespace s2dn
