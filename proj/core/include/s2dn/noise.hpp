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

#ifndef S2DN_NOISE_HPP_
#define S2DN_NOISE_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "s2dn/kg_store.hpp"

namespace s2dn {

enum class NoiseKind { kSemantic, kStructural };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kSemantic;
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

NoiseKind parse_noise_kind(std::string_view name);
std::string_view noise_kind_name(NoiseKind kind);

// round-half-up(ratio * count).
std::size_t noise_count(double ratio, std::size_t count);

// Replaces the relation of exactly noise_count(ratio, |triples|) distinct
// triple positions by a different, uniformly drawn relation.
//
// Draw order (shared with other implementations): positions are chosen by a
// partial Fisher-Yates shuffle of [0, N) using uniform_int(N - i) for
// i = 0..m-1; then, in that selection order, each position draws
// uniform_int(|R| - 1) and skips over its current relation id.
KnowledgeGraph contaminate_semantic(const KnowledgeGraph& graph, double ratio,
                                    std::uint64_t seed);

// Appends noise_count(ratio, |triples|) unknown triples. Each candidate is
// drawn as head = uniform_int(|E|), rel = uniform_int(|R|),
// tail = uniform_int(|E|) and rejected if known or already injected.
// Throws SaturationError after 1000 * m draws.
KnowledgeGraph contaminate_structural(const KnowledgeGraph& graph, double ratio,
                                      std::uint64_t seed);

KnowledgeGraph contaminate(const KnowledgeGraph& graph, const NoiseSpec& spec);

}  // namespace s2dn

#endif  // S2DN_NOISE_HPP_
