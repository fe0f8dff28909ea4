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
#include "s2dn/model.hpp"
#include "s2dn/smoothing.hpp"
#include "s2dn/subgraph.hpp"

namespace s2dn::bench {
namespace {

std::vector<EnclosingSubgraph> sample_subgraphs(const KnowledgeGraph& g, std::uint32_t k,
                                                std::size_t count) {
  std::vector<ExtractionRequest> reqs;
  for (std::size_t i = 0; i < count; ++i) reqs.push_back({g.triples()[i], 1, true});
  return extract_batch(g, reqs, k);
}

void BM_ScoreBatch(benchmark::State& state) {
  auto g = random_graph(400, 8, 1600, 4);
  ModelConfig cfg;
  cfg.dim = static_cast<std::size_t>(state.range(0));
  cfg.k = 2;
  S2DNModel model(cfg, g.num_relations());
  auto subs = sample_subgraphs(g, cfg.k, 32);
  for (auto _ : state) benchmark::DoNotOptimize(model.score_batch(subs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(subs.size()));
}
BENCHMARK(BM_ScoreBatch)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  auto g = random_graph(400, 8, 1600, 5);
  ModelConfig cfg;
  cfg.dim = 32;
  cfg.k = 2;
  S2DNModel model(cfg, g.num_relations());
  auto subs = sample_subgraphs(g, cfg.k, 8);
  std::vector<double> labels(subs.size(), 1.0);
  DetRng noise(6);
  for (auto _ : state) {
    auto smoothing = model.smoothing_state(Mode::kTrain, &noise);
    std::vector<ad::Var> ps;
    for (const auto& s : subs) ps.push_back(model.forward(s, smoothing, Mode::kTrain, &noise).probability);
    auto loss = model.loss(ps, labels, smoothing);
    ad::backward(loss);
    benchmark::DoNotOptimize(loss.scalar());
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

void BM_GumbelSoftmax(benchmark::State& state) {
  Eigen::VectorXd logits = Eigen::VectorXd::LinSpaced(state.range(0), -2.0, 2.0);
  DetRng rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(gumbel_softmax(logits, 0.5, &rng, false));
}
BENCHMARK(BM_GumbelSoftmax)->Arg(11)->Arg(237);

}  // namespace
}  // namespace s2dn::bench
