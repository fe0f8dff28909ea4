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

#ifndef S2DN_EVAL_HPP_
#define S2DN_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "s2dn/kg_store.hpp"
#include "s2dn/model.hpp"
#include "s2dn/noise.hpp"
#include "s2dn/subgraph.hpp"

namespace s2dn {

enum class Direction { kTail, kHead, kBoth };

Direction parse_direction(std::string_view name);
std::string_view direction_name(Direction d);

// 1 + #(negatives scoring higher) + #(ties) / 2.
double average_rank(double true_score, std::span<const double> negative_scores);

struct RankedQuery {
  std::size_t query = 0;  // index into the test triples
  Direction direction = Direction::kTail;
  double rank = 0.0;
  std::size_t candidates = 0;  // 1 + negatives
};

struct RankingReport {
  std::vector<RankedQuery> ranks;
  double hits1 = 0.0;
  double hits10 = 0.0;
  double mrr = 0.0;
  std::size_t queries = 0;
  Direction direction = Direction::kBoth;
};

RankingReport summarize_ranks(std::vector<RankedQuery> ranks, Direction direction);

struct EvalOptions {
  std::size_t num_negatives = 50;
  Direction direction = Direction::kBoth;
  std::uint64_t seed = 0;
  std::size_t max_queries = 0;  // 0 = all
  // Skip queries with too few filtered corruptions instead of throwing.
  bool skip_exhausted = false;
  unsigned threads = 1;
};

// Scores a batch of candidate triples; higher is more plausible.
using TripleScorer = std::function<std::vector<double>(std::span<const Triple>)>;

// Negatives for query i come from DetRng(derive_seed(seed, i)): tail
// corruptions first, then head corruptions, each filtered against
// `filter_graph`.
RankingReport evaluate_ranking(const TripleScorer& scorer, const KnowledgeGraph& filter_graph,
                               std::span<const Triple> test, const EvalOptions& options);

// Model-backed variant: candidates are extracted from `inference_graph`
// (target edge dropped) and the filter is inference_graph + `test`.
RankingReport evaluate_ranking(const S2DNModel& model, const KnowledgeGraph& inference_graph,
                               std::span<const Triple> test, const EvalOptions& options);

// inference_graph with `extra` appended (deduplicated).
KnowledgeGraph with_triples(const KnowledgeGraph& graph, std::span<const Triple> extra);

void write_ranking_csv(const RankingReport& report, std::ostream& out);

struct TransitionMatrix {
  Matrix m;                          // |R| x |R|
  std::vector<std::size_t> support;  // edge instances per source relation
};

// Counts rel -> hard_labels[rel] over every edge instance of `subgraphs`.
TransitionMatrix transition_matrix(std::span<const RelationId> hard_labels,
                                   std::span<const EnclosingSubgraph> subgraphs);
TransitionMatrix transition_matrix(const S2DNModel& model,
                                   std::span<const EnclosingSubgraph> subgraphs);

// {"relations": [...], "support": [...], "matrix": [[...], ...]}
void write_transition_json(const TransitionMatrix& tm, const Vocabulary& relations,
                           std::ostream& out);

struct RobustnessRow {
  NoiseKind kind = NoiseKind::kSemantic;
  double ratio = 0.0;
  double hits10 = 0.0;
  double drop = 0.0;  // (clean - noisy) / clean
};

// Trains a fresh model on the contaminated graph and returns clean-test Hits@10.
using TrainAndEvaluate = std::function<double(const NoiseSpec&)>;

// The clean reference (ratio 0) is evaluated once and shared by every kind.
std::vector<RobustnessRow> robustness_suite(std::span<const NoiseKind> kinds,
                                            std::span<const double> ratios,
                                            std::uint64_t seed,
                                            const TrainAndEvaluate& run);

// Header `kind,ratio,hits10,drop`.
void write_robustness_csv(std::span<const RobustnessRow> rows, std::ostream& out);

}  // namespace s2dn

#endif  // S2DN_EVAL_HPP_
