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

#ifndef S2DN_BENCHMARKS_BENCH_GRAPH_HPP_
#define S2DN_BENCHMARKS_BENCH_GRAPH_HPP_

#include <string>
#include <vector>

#include "s2dn/kg_store.hpp"
#include "s2dn/rng.hpp"

namespace s2dn::bench {

// Uniform random multigraph with `n` entities, `r` relations, `m` triples.
inline KnowledgeGraph random_graph(std::size_t n, std::size_t r, std::size_t m,
                                   std::uint64_t seed) {
  DetRng rng(seed);
  std::vector<NamedTriple> rows;
  rows.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    rows.push_back({"e" + std::to_string(rng.uniform_int(n)), "r" + std::to_string(rng.uniform_int(r)),
                    "e" + std::to_string(rng.uniform_int(n))});
  }
  return build_graph(rows, nullptr, nullptr);
}

}  // namespace s2dn::bench

#endif  // S2DN_BENCHMARKS_BENCH_GRAPH_HPP_
