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

#include "s2dn/training.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "s2dn/errors.hpp"
#include "s2dn/eval.hpp"
#include "s2dn/parameters.hpp"
#include "s2dn/subgraph.hpp"

namespace s2dn {

namespace {

// Stream identifiers mixed into the config seed.
constexpr std::uint64_t kNoiseStream = 0x6E6F697365ULL;
constexpr std::uint64_t kValidationStream = 0x76616C6964ULL;
constexpr std::size_t kValNegatives = 50;

std::string norm_report(const ParameterStore& store) {
  std::ostringstream os;
  for (const auto& p : store.all()) {
    os << "\n  " << p.name() << " |theta|=" << parameter_norm(p);
    if (p.grad().size() != 0) os << " |grad|=" << p.grad().norm();
  }
  return os.str();
}

std::vector<Triple> make_negatives(const KnowledgeGraph& graph, const Triple& pos,
                                   std::size_t count, DetRng& rng) {
  if (count == 0) return {};
  try {
    return sample_negatives(graph, pos, count, CorruptMode::kTail, rng);
  } catch (const SamplingExhaustedError&) {
  }
  try {
    return sample_negatives(graph, pos, count, CorruptMode::kHead, rng);
  } catch (const SamplingExhaustedError&) {
    return {};
  }
}

}  // namespace

TrainingResult train(S2DNModel& model, const KnowledgeGraph& graph,
                     std::span<const Triple> validation, const TrainingHooks& hooks) {
  const ModelConfig& cfg = model.config();
  validate_config(cfg);
  if (graph.num_relations() > model.num_relations()) {
    throw ArgumentError("training graph has more relations than the model");
  }
  const auto& positives = graph.triples();
  if (positives.empty()) throw ArgumentError("training graph has no triples");

  AdamOptimizer adam(model.parameters(), {cfg.learning_rate, 0.9, 0.999, 1e-8});
  DetRng noise(derive_seed(cfg.seed, kNoiseStream));

  std::vector<ExtractionRequest> pos_req;
  pos_req.reserve(positives.size());
  for (const auto& t : positives) pos_req.push_back({t, 1, true});
  const std::vector<EnclosingSubgraph> pos_subs = extract_batch(graph, pos_req, cfg.k, 1);

  EvalOptions val_opt;
  val_opt.num_negatives = std::min<std::size_t>(
      kValNegatives, graph.num_entities() > 1 ? graph.num_entities() - 1 : 0);
  val_opt.seed = derive_seed(cfg.seed, kValidationStream);
  val_opt.max_queries = cfg.val_max_queries;
  val_opt.skip_exhausted = true;

  TrainingResult result;
  double best_mrr = -1.0;
  std::vector<Matrix> best;

  std::vector<std::size_t> order(positives.size());
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    DetRng shuffle(derive_seed(cfg.seed, epoch));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.uniform_int(i)]);
    }

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size, ++batches) {
      const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
      SmoothingState state = model.smoothing_state(Mode::kTrain, &noise);
      std::vector<ad::Var> probs;
      std::vector<double> labels;
      for (std::size_t b = lo; b < hi; ++b) {
        const std::size_t idx = order[b];
        probs.push_back(model.forward(pos_subs[idx], state, Mode::kTrain, &noise).probability);
        labels.push_back(1.0);
        for (const auto& neg :
             make_negatives(graph, positives[idx], cfg.negatives_per_positive, shuffle)) {
          auto sub = extract_enclosing(graph, neg, cfg.k, false, 0);
          probs.push_back(model.forward(sub, state, Mode::kTrain, &noise).probability);
          labels.push_back(0.0);
        }
      }
      ad::Var loss = model.loss(probs, labels, state);
      if (!std::isfinite(loss.scalar())) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batches + 1) + norm_report(model.parameters()));
      }
      model.parameters().zero_grad();
      ad::backward(loss);
      adam.step();
      loss_sum += loss.scalar();
    }

    EpochLog entry{epoch, loss_sum / static_cast<double>(batches),
                   std::numeric_limits<double>::quiet_NaN()};
    if (!validation.empty()) {
      entry.val_mrr = evaluate_ranking(model, graph, validation, val_opt).mrr;
      if (entry.val_mrr > best_mrr) {
        best_mrr = entry.val_mrr;
        result.best_epoch = epoch;
        best.clear();
        for (const auto& p : model.parameters().all()) best.push_back(p.value());
      }
    }
    result.log.push_back(entry);
    if (hooks.on_epoch) hooks.on_epoch(entry);
  }

  if (!best.empty()) {
    const auto& params = model.parameters().all();
    for (std::size_t i = 0; i < params.size(); ++i) {
      Parameter p = params[i];
      p.value() = best[i];
    }
  }
  return result;
}

void write_training_log(std::span<const EpochLog> log, std::ostream& out) {
  out << "epoch,loss,val_mrr\n";
  char buf[64];
  for (const auto& e : log) {
    out << e.epoch << ',';
    std::snprintf(buf, sizeof buf, "%.10g", e.loss);
    out << buf << ',';
    if (std::isnan(e.val_mrr)) {
      out << "nan";
    } else {
      std::snprintf(buf, sizeof buf, "%.10g", e.val_mrr);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace s2dn
