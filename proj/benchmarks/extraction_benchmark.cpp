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

#include <benchmark/benchmark.h>

#include "bench_graph.hpp"
#include "s2dn/subgraph.hpp"

namespace s2dn::bench {
namespace {

void BM_ExtractEnclosing(benchmark::State& state) {
  const auto k = static_cast<std::uint32_t>(state.range(0));
  auto g = random_graph(2000, 10, 6000, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    const Triple& t = g.triples()[i++ % g.triples().size()];
    benchmark::DoNotOptimize(extract_enclosing(g, t, k, true, 1));
  }
}
BENCHMARK(BM_ExtractEnclosing)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

void BM_ExtractBatch(benchmark::State& state) {
  auto g = random_graph(2000, 10, 6000, 2);
  std::vector<ExtractionRequest> reqs;
  for (std::size_t i = 0; i < 256; ++i) reqs.push_back({g.triples()[i], 1, true});
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(extract_batch(g, reqs, 3, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(reqs.size()));
}
BENCHMARK(BM_ExtractBatch)->Arg(1)->Arg(4)->UseRealTime();

void BM_SerializeParse(benchmark::State& state) {
  auto g = random_graph(500, 5, 3000, 3);
  auto sub = extract_enclosing(g, g.triples().front(), 2, true, 1);
  for (auto _ : state) benchmark::DoNotOptimize(parse_subgraph(serialize_subgraph(sub)));
}
BENCHMARK(BM_SerializeParse);

}  // namespace
}  // namespace s2dn::bench
