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

#include "s2dn/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"
#include "s2dn/errors.hpp"

namespace s2dn {

namespace {

constexpr std::size_t kScoreChunk = 4096;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Direction parse_direction(std::string_view name) {
  if (name == "tail") return Direction::kTail;
  if (name == "head") return Direction::kHead;
  if (name == "both") return Direction::kBoth;
  throw ConfigError("unknown direction '" + std::string(name) + "' (expected tail, head or both)");
}

std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::kTail: return "tail";
    case Direction::kHead: return "head";
    case Direction::kBoth: return "both";
  }
  return "both";
}

double average_rank(double true_score, std::span<const double> negative_scores) {
  std::size_t greater = 0, ties = 0;
  for (double s : negative_scores) {
    if (s > true_score) ++greater;
    else if (s == true_score) ++ties;
  }
  return 1.0 + static_cast<double>(greater) + static_cast<double>(ties) / 2.0;
}

RankingReport summarize_ranks(std::vector<RankedQuery> ranks, Direction direction) {
  RankingReport r;
  r.direction = direction;
  r.queries = ranks.size();
  for (const auto& q : ranks) {
    if (q.rank <= 1.0) r.hits1 += 1.0;
    if (q.rank <= 10.0) r.hits10 += 1.0;
    r.mrr += 1.0 / q.rank;
  }
  if (!ranks.empty()) {
    const auto n = static_cast<double>(ranks.size());
    r.hits1 /= n;
    r.hits10 /= n;
    r.mrr /= n;
  }
  r.ranks = std::move(ranks);
  return r;
}

RankingReport evaluate_ranking(const TripleScorer& scorer, const KnowledgeGraph& filter_graph,
                               std::span<const Triple> test, const EvalOptions& options) {
  struct Block {
    std::size_t query;
    Direction direction;
    std::size_t begin;  // first candidate (the true triple)
    std::size_t size;
  };
  std::vector<Triple> candidates;
  std::vector<Block> blocks;
  const std::size_t n = options.max_queries == 0 ? test.size()
                                                 : std::min(test.size(), options.max_queries);
  for (std::size_t i = 0; i < n; ++i) {
    DetRng rng(derive_seed(options.seed, i));
    for (Direction d : {Direction::kTail, Direction::kHead}) {
      if (options.direction != Direction::kBoth && options.direction != d) continue;
      std::vector<Triple> negs;
      try {
        negs = sample_negatives(filter_graph, test[i], options.num_negatives,
                                d == Direction::kTail ? CorruptMode::kTail : CorruptMode::kHead,
                                rng);
      } catch (const SamplingExhaustedError&) {
        if (options.skip_exhausted) continue;
        throw;
      }
      blocks.push_back({i, d, candidates.size(), negs.size() + 1});
      candidates.push_back(test[i]);
      candidates.insert(candidates.end(), negs.begin(), negs.end());
    }
  }

  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (std::size_t lo = 0; lo < candidates.size(); lo += kScoreChunk) {
    const std::size_t len = std::min(kScoreChunk, candidates.size() - lo);
    auto s = scorer(std::span<const Triple>(candidates).subspan(lo, len));
    if (s.size() != len) throw ShapeError("scorer returned the wrong number of scores");
    scores.insert(scores.end(), s.begin(), s.end());
  }

  std::vector<RankedQuery> ranks;
  ranks.reserve(blocks.size());
  for (const auto& b : blocks) {
    std::span<const double> negs(scores.data() + b.begin + 1, b.size - 1);
    ranks.push_back({b.query, b.direction, average_rank(scores[b.begin], negs), b.size});
  }
  return summarize_ranks(std::move(ranks), options.direction);
}

KnowledgeGraph with_triples(const KnowledgeGraph& graph, std::span<const Triple> extra) {
  std::vector<Triple> all = graph.triples();
  TripleSet seen = graph.triple_set();
  for (const auto& t : extra) {
    if (seen.insert(t).second) all.push_back(t);
  }
  return KnowledgeGraph(graph.entities(), graph.relations(), std::move(all));
}

RankingReport evaluate_ranking(const S2DNModel& model, const KnowledgeGraph& inference_graph,
                               std::span<const Triple> test, const EvalOptions& options) {
  KnowledgeGraph filter = with_triples(inference_graph, test);
  const std::uint32_t k = model.config().k;
  TripleScorer scorer = [&](std::span<const Triple> triples) {
    std::vector<ExtractionRequest> reqs;
    reqs.reserve(triples.size());
    for (const auto& t : triples) reqs.push_back({t, 0, true});
    auto subs = extract_batch(inference_graph, reqs, k, options.threads);
    return model.score_batch(subs, options.threads);
  };
  return evaluate_ranking(scorer, filter, test, options);
}

void write_ranking_csv(const RankingReport& report, std::ostream& out) {
  out << "query,direction,rank,candidates\n";
  for (const auto& q : report.ranks) {
    out << q.query << ',' << direction_name(q.direction) << ',' << shortest(q.rank) << ','
        << q.candidates << '\n';
  }
}

TransitionMatrix transition_matrix(std::span<const RelationId> hard_labels,
                                   std::span<const EnclosingSubgraph> subgraphs) {
  const auto r = static_cast<ad::Index>(hard_labels.size());
  TransitionMatrix tm;
  tm.m = Matrix::Zero(r, r);
  tm.support.assign(hard_labels.size(), 0);
  for (const auto& sub : subgraphs) {
    for (const auto& e : sub.edges) {
      if (e.rel >= hard_labels.size() || hard_labels[e.rel] >= hard_labels.size()) {
        throw ShapeError("transition_matrix: relation " + std::to_string(e.rel) +
                         " outside the smoothing table");
      }
      tm.m(e.rel, hard_labels[e.rel]) += 1.0;
      ++tm.support[e.rel];
    }
  }
  for (ad::Index i = 0; i < r; ++i) {
    if (tm.support[static_cast<std::size_t>(i)] > 0) {
      tm.m.row(i) /= static_cast<double>(tm.support[static_cast<std::size_t>(i)]);
    }
  }
  return tm;
}

TransitionMatrix transition_matrix(const S2DNModel& model,
                                   std::span<const EnclosingSubgraph> subgraphs) {
  auto state = model.smoothing_state(Mode::kInfer, nullptr);
  return transition_matrix(state.hard_labels, subgraphs);
}

void write_transition_json(const TransitionMatrix& tm, const Vocabulary& relations,
                           std::ostream& out) {
  if (relations.size() != tm.support.size()) {
    throw ShapeError("write_transition_json: vocabulary size differs from the matrix");
  }
  nlohmann::ordered_json j;
  j["relations"] = relations.names();
  j["support"] = tm.support;
  auto rows = nlohmann::ordered_json::array();
  for (ad::Index i = 0; i < tm.m.rows(); ++i) {
    std::vector<double> row(tm.m.row(i).begin(), tm.m.row(i).end());
    rows.push_back(row);
  }
  j["matrix"] = std::move(rows);
  out << j.dump() << '\n';
}

std::vector<RobustnessRow> robustness_suite(std::span<const NoiseKind> kinds,
                                            std::span<const double> ratios,
                                            std::uint64_t seed, const TrainAndEvaluate& run) {
  for (double ratio : ratios) noise_count(ratio, 0);
  const double clean = run({NoiseKind::kStructural, 0.0, seed});
  std::vector<RobustnessRow> rows;
  for (NoiseKind kind : kinds) {
    for (double ratio : ratios) {
      RobustnessRow row{kind, ratio, clean, 0.0};
      if (ratio > 0.0) {
        row.hits10 = run({kind, ratio, seed});
        row.drop = clean > 0.0 ? (clean - row.hits10) / clean : 0.0;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_robustness_csv(std::span<const RobustnessRow> rows, std::ostream& out) {
  out << "kind,ratio,hits10,drop\n";
  for (const auto& r : rows) {
    out << noise_kind_name(r.kind) << ',' << shortest(r.ratio) << ',' << fixed(r.hits10, 6)
        << ',' << fixed(r.drop, 6) << '\n';
  }
}

}  // namespace s2dn
