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

#include "s2dn/model.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "s2dn/errors.hpp"

namespace s2dn {

namespace {

constexpr double kProbClamp = 1e-7;

}  // namespace

ad::Var kl_term(const ad::Var& smoothed, const ad::Var& original) {
  if (smoothed.rows() != original.rows() || smoothed.cols() != original.cols()) {
    throw ShapeError("kl_term: E~ and E must have equal shapes");
  }
  ad::Var log_p = ad::log_softmax_rows(smoothed);
  ad::Var log_q = ad::log_softmax_rows(original);
  ad::Var p = ad::softmax_rows(smoothed);
  ad::Var kl = ad::sum(ad::mul(p, ad::sub(log_p, log_q)));
  return ad::scale(kl, 1.0 / static_cast<double>(std::max<ad::Index>(smoothed.rows(), 1)));
}

ad::Var bce_term(std::span<const ad::Var> probabilities, std::span<const double> labels) {
  if (probabilities.size() != labels.size() || probabilities.empty()) {
    throw ShapeError("bce_term: need one label per probability");
  }
  std::vector<ad::Var> terms;
  terms.reserve(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    ad::Var p = ad::clamp(probabilities[i], kProbClamp, 1.0 - kProbClamp);
    double y = labels[i];
    std::vector<ad::Var> parts;
    if (y != 0.0) parts.push_back(ad::scale(ad::log(p), -y));
    if (y != 1.0) {
      parts.push_back(ad::scale(ad::log(ad::add_scalar(ad::scale(p, -1.0), 1.0)), -(1.0 - y)));
    }
    terms.push_back(ad::sum_vars(parts));
  }
  return ad::scale(ad::sum_vars(terms), 1.0 / static_cast<double>(terms.size()));
}

double parameter_norm(const Parameter& p) { return p.value().norm(); }

S2DNModel::S2DNModel(ModelConfig config, std::size_t num_relations)
    : config_(std::move(config)), num_relations_(num_relations) {
  validate_config(config_);
  if (num_relations_ == 0) throw ConfigError("model needs at least one relation");
  DetRng init(config_.seed);
  const auto d = static_cast<ad::Index>(config_.dim);
  const auto f = static_cast<ad::Index>(2 * (config_.k + 1));

  proj_w_ = store_.add("input.P", xavier_uniform(f, d, init));
  proj_b_ = store_.add("input.b", Matrix::Zero(1, d));
  smoother_ = RelationSmoother(store_, num_relations_, config_.dim, init,
                               {config_.tau, config_.hard_smoothing,
                                config_.skip_outer_softmax});
  semantic_ = SemanticEncoder(store_, num_relations_, config_.dim, config_.num_layers,
                              init, config_.phi);
  RefinerOptions ropt;
  ropt.estimator = config_.estimator;
  ropt.temperature = config_.concrete_temperature;
  ropt.threshold = config_.prune_threshold;
  ropt.policy = config_.candidate_policy;
  ropt.all_pairs_max_nodes = config_.all_pairs_max_nodes;
  refiner_ = StructureRefiner(store_, config_.dim, init, ropt);
  gcn_ = GcnEncoder(store_, config_.dim, config_.num_layers, init);

  const ad::Index in = (config_.use_query_relation ? 3 : 2) * d;
  cls_w1_ = store_.add("classifier.W1", xavier_uniform(in, d, init));
  cls_b1_ = store_.add("classifier.b1", Matrix::Zero(1, d));
  cls_w2_ = store_.add("classifier.W2", xavier_uniform(d, 1, init));
  cls_b2_ = store_.add("classifier.b2", Matrix::Zero(1, 1));
}

SmoothingState S2DNModel::smoothing_state(Mode mode, DetRng* noise) const {
  SmoothingState s;
  if (config_.disable_smoothing) {
    const auto r = static_cast<ad::Index>(num_relations_);
    s.assignment = ad::Var::constant(Matrix::Identity(r, r));
    s.original = smoother_.embeddings.var();
    s.smoothed = s.original;
    s.hard_labels.resize(num_relations_);
    std::iota(s.hard_labels.begin(), s.hard_labels.end(), RelationId{0});
    return s;
  }
  auto out = smoother_.forward(mode, noise);
  s.assignment = out.assignment;
  s.smoothed = out.smoothed;
  s.original = out.original;
  s.hard_labels = std::move(out.hard_labels);
  return s;
}

ad::Var S2DNModel::project(const EnclosingSubgraph& sub) const {
  if (sub.k != config_.k) {
    throw ShapeError("subgraph extracted with k=" + std::to_string(sub.k) +
                     " but the model expects k=" + std::to_string(config_.k));
  }
  Matrix features = featurize(sub);
  return ad::add_row(ad::matmul(ad::Var::constant(std::move(features)), proj_w_.var()),
                     proj_b_.var());
}

S2DNModel::Forward S2DNModel::forward(const EnclosingSubgraph& sub,
                                      const SmoothingState& state, Mode mode,
                                      DetRng* noise) const {
  if (sub.nodes.empty()) throw ShapeError("score: empty subgraph");
  if (sub.target.rel >= num_relations_) {
    throw ShapeError("score: query relation " + std::to_string(sub.target.rel) +
                     " unknown to the model");
  }
  Forward out;
  ad::Var x0 = project(sub);

  out.relabeled = config_.disable_smoothing ? sub : relabel_subgraph(sub, state.hard_labels);
  out.h_sem = semantic_.encode(out.relabeled, x0, state.smoothed).readout;

  ad::Var weights;
  if (config_.disable_refining) {
    out.refined = unrefined(sub);
    if (!out.refined.edges.empty()) {
      weights = ad::Var::constant(
          Matrix::Ones(static_cast<ad::Index>(out.refined.edges.size()), 1));
    }
  } else {
    auto r = refiner_.refine(sub, refiner_.encode_nodes(x0), mode, noise);
    out.refined = std::move(r.graph);
    weights = r.weights;
  }
  out.h_str = gcn_.encode(sub.nodes.size(), out.refined.edges, weights, x0);

  std::vector<ad::Var> parts{out.h_sem, out.h_str};
  if (config_.use_query_relation) {
    const std::uint32_t q = sub.target.rel;
    parts.push_back(ad::gather_rows(state.smoothed, std::span<const std::uint32_t>(&q, 1)));
  }
  ad::Var hidden = ad::relu(
      ad::add_row(ad::matmul(ad::concat_cols(parts), cls_w1_.var()), cls_b1_.var()));
  out.logit = ad::add_row(ad::matmul(hidden, cls_w2_.var()), cls_b2_.var());
  out.probability = ad::sigmoid(out.logit);
  return out;
}

double S2DNModel::score(const EnclosingSubgraph& sub, const SmoothingState& state) const {
  double p = forward(sub, state, Mode::kInfer, nullptr).probability.scalar();
  if (!std::isfinite(p)) throw NumericError("score: non-finite link probability");
  return p;
}

double S2DNModel::score(const EnclosingSubgraph& sub) const {
  return score(sub, smoothing_state(Mode::kInfer, nullptr));
}

std::vector<double> S2DNModel::score_batch(std::span<const EnclosingSubgraph> subs,
                                           unsigned threads) const {
  std::vector<double> out(subs.size());
  if (subs.empty()) return out;
  const SmoothingState state = smoothing_state(Mode::kInfer, nullptr);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, subs.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < subs.size(); ++i) out[i] = score(subs[i], state);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (subs.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          const std::size_t lo = t * chunk;
          const std::size_t hi = std::min(subs.size(), lo + chunk);
          for (std::size_t i = lo; i < hi; ++i) out[i] = score(subs[i], state);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ad::Var S2DNModel::regularizer() const {
  std::vector<ad::Var> terms;
  for (const auto& p : store_.all()) terms.push_back(ad::sum_squares(p.var()));
  return ad::sum_vars(terms);
}

ad::Var S2DNModel::loss(std::span<const ad::Var> probabilities,
                        std::span<const double> labels,
                        const SmoothingState& state) const {
  std::vector<ad::Var> terms{bce_term(probabilities, labels),
                             kl_term(state.smoothed, state.original)};
  if (config_.lambda != 0.0) terms.push_back(ad::scale(regularizer(), config_.lambda));
  return ad::sum_vars(terms);
}

RefinedSubgraph S2DNModel::refine_for_export(const EnclosingSubgraph& sub) const {
  if (config_.disable_refining) return unrefined(sub);
  return refiner_.refine(sub, refiner_.encode_nodes(project(sub)), Mode::kInfer, nullptr)
      .graph;
}

}  // namespace s2dn
