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

#include "s2dn/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "s2dn/errors.hpp"

namespace s2dn {

namespace {

double gumbel_draw(DetRng& rng) { return -std::log(-std::log(rng.uniform_open01())); }

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericError(std::string(what) + " contains non-finite values");
}

}  // namespace

std::size_t argmax_row(const Matrix& m, Eigen::Index row) {
  std::size_t best = 0;
  for (Eigen::Index j = 1; j < m.cols(); ++j) {
    if (m(row, j) > m(row, static_cast<Eigen::Index>(best))) {
      best = static_cast<std::size_t>(j);
    }
  }
  return best;
}

Eigen::VectorXd gumbel_softmax(const Eigen::VectorXd& logits, double tau,
                               DetRng* rng, bool hard) {
  if (!(tau > 0.0)) throw ArgumentError("gumbel_softmax: tau must be positive");
  if (!logits.allFinite()) throw NumericError("gumbel_softmax: non-finite logits");
  Eigen::VectorXd z = logits;
  if (rng) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) += gumbel_draw(*rng);
  }
  z /= tau;
  Eigen::VectorXd y = (z.array() - z.maxCoeff()).exp();
  y /= y.sum();
  if (!hard) return y;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < y.size(); ++i) {
    if (y(i) > y(best)) best = i;
  }
  Eigen::VectorXd one_hot = Eigen::VectorXd::Zero(y.size());
  one_hot(best) = 1.0;
  return one_hot;
}

RelationSmoother::RelationSmoother(ParameterStore& store,
                                   std::size_t num_relations, std::size_t dim,
                                   DetRng& init, SmootherOptions options)
    : num_relations_(num_relations), options_(options) {
  if (!(options_.tau > 0.0)) throw ArgumentError("tau must be positive");
  const auto r = static_cast<ad::Index>(num_relations);
  const auto d = static_cast<ad::Index>(dim);
  embeddings = store.add("smoother.E", xavier_uniform(r, d, init));
  weights = store.add("smoother.W", xavier_uniform(r, d, init));
  bias = store.add("smoother.b", Matrix::Zero(1, r));
}

RelationSmoother::Output RelationSmoother::forward(Mode mode, DetRng* noise) const {
  Output out;
  out.original = embeddings.var();
  ad::Var logits = ad::add_row(
      ad::matmul(embeddings.var(), ad::transpose(weights.var())), bias.var());
  ad::Var z = options_.skip_outer_softmax ? logits : ad::log_softmax_rows(logits);
  if (mode == Mode::kTrain && noise) {
    Matrix g(z.rows(), z.cols());
    for (ad::Index i = 0; i < g.rows(); ++i) {
      for (ad::Index j = 0; j < g.cols(); ++j) g(i, j) = gumbel_draw(*noise);
    }
    z = ad::add(z, ad::Var::constant(std::move(g)));
  }
  ad::Var soft = ad::softmax_rows(ad::scale(z, 1.0 / options_.tau));
  require_finite(soft.value(), "relation assignment");

  out.hard_labels.resize(num_relations_);
  Matrix one_hot = Matrix::Zero(soft.rows(), soft.cols());
  for (ad::Index i = 0; i < soft.rows(); ++i) {
    auto best = argmax_row(soft.value(), i);
    out.hard_labels[static_cast<std::size_t>(i)] = static_cast<RelationId>(best);
    one_hot(i, static_cast<ad::Index>(best)) = 1.0;
  }
  out.assignment =
      options_.hard ? ad::straight_through(std::move(one_hot), soft) : soft;
  out.smoothed = ad::matmul(out.assignment, embeddings.var());
  return out;
}

SmoothedRelations RelationSmoother::smooth(Mode mode, DetRng* noise) const {
  auto out = forward(mode, noise);
  return {out.assignment.value(), out.smoothed.value(), out.hard_labels};
}

EnclosingSubgraph relabel_subgraph(const EnclosingSubgraph& sub,
                                   const std::vector<RelationId>& hard_labels) {
  EnclosingSubgraph out = sub;
  for (auto& e : out.edges) {
    if (e.rel >= hard_labels.size()) {
      throw ArgumentError("edge relation " + std::to_string(e.rel) +
                          " outside the smoothing table");
    }
    e.rel = hard_labels[e.rel];
  }
  // Relabeling can break the lexicographic order (and create duplicates).
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

Aggregation parse_aggregation(std::string_view name) {
  if (name == "sum") return Aggregation::kSum;
  if (name == "product") return Aggregation::kProduct;
  throw ConfigError("unknown aggregation '" + std::string(name) +
                    "' (expected sum or product)");
}

std::string_view aggregation_name(Aggregation a) {
  return a == Aggregation::kSum ? "sum" : "product";
}

SemanticEncoder::SemanticEncoder(ParameterStore& store, std::size_t num_relations,
                                 std::size_t dim, std::size_t num_layers,
                                 DetRng& init, Aggregation phi)
    : dim_(dim), phi_(phi) {
  if (num_layers == 0) throw ArgumentError("semantic encoder needs >= 1 layer");
  const auto d = static_cast<ad::Index>(dim);
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::string prefix = "rgnn.layer" + std::to_string(l) + ".";
    Layer layer;
    layer.self_loop = store.add(prefix + "self", xavier_uniform(d, d, init));
    for (std::size_t r = 0; r < num_relations; ++r) {
      layer.relation.push_back(
          store.add(prefix + "rel" + std::to_string(r), xavier_uniform(d, d, init)));
    }
    layer.relation_update =
        store.add(prefix + "rel_update", xavier_uniform(d, d, init));
    layers_.push_back(std::move(layer));
  }
  attention_weight = store.add("rgnn.attention.W", xavier_uniform(3 * d, 1, init));
  attention_bias = store.add("rgnn.attention.b", Matrix::Zero(1, 1));
  readout_weight = store.add("rgnn.readout.W", xavier_uniform(d, d, init));
  readout_bias = store.add("rgnn.readout.b", Matrix::Zero(1, d));
}

SemanticEncoder::Output SemanticEncoder::encode(
    const EnclosingSubgraph& sub, const ad::Var& x0,
    const ad::Var& relation_embeddings) const {
  const auto n = static_cast<ad::Index>(sub.nodes.size());
  const auto d = static_cast<ad::Index>(dim_);
  if (n == 0) throw ShapeError("rgnn_encode: empty subgraph");
  if (x0.rows() != n || x0.cols() != d) {
    throw ShapeError("rgnn_encode: node features must be " + std::to_string(n) +
                     "x" + std::to_string(d));
  }
  if (relation_embeddings.cols() != d) {
    throw ShapeError("rgnn_encode: relation embeddings must have width " +
                     std::to_string(d));
  }
  const std::size_t num_rel = layers_.front().relation.size();

  // Directed message list: every stored edge travels both ways.
  std::vector<std::uint32_t> src, dst, rel;
  src.reserve(2 * sub.edges.size());
  dst.reserve(2 * sub.edges.size());
  rel.reserve(2 * sub.edges.size());
  for (const auto& e : sub.edges) {
    if (e.rel >= num_rel || e.rel >= relation_embeddings.rows()) {
      throw ShapeError("rgnn_encode: relation id " + std::to_string(e.rel) +
                       " has no embedding");
    }
    src.push_back(e.src);
    dst.push_back(e.dst);
    rel.push_back(e.rel);
    src.push_back(e.dst);
    dst.push_back(e.src);
    rel.push_back(e.rel);
  }
  std::map<std::uint32_t, std::vector<std::uint32_t>> by_relation;
  for (std::uint32_t m = 0; m < rel.size(); ++m) by_relation[rel[m]].push_back(m);
  std::map<std::uint32_t, std::vector<std::uint32_t>> dst_by_relation;
  for (const auto& [r, idx] : by_relation) {
    auto& targets = dst_by_relation[r];
    for (auto m : idx) targets.push_back(dst[m]);
  }

  ad::Var x = x0;
  ad::Var e = relation_embeddings;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    std::vector<ad::Var> terms{ad::matmul(x, layer.self_loop.var())};
    if (!src.empty()) {
      ad::Var x_src = ad::gather_rows(x, src);
      ad::Var x_dst = ad::gather_rows(x, dst);
      ad::Var e_rel = ad::gather_rows(e, rel);
      std::vector<ad::Var> att_in{x_dst, x_src, e_rel};
      ad::Var alpha = ad::sigmoid(ad::add_row(
          ad::matmul(ad::concat_cols(att_in), attention_weight.var()),
          attention_bias.var()));
      ad::Var msg = phi_ == Aggregation::kSum ? ad::add(e_rel, x_src)
                                              : ad::mul(e_rel, x_src);
      for (const auto& [r, idx] : by_relation) {
        ad::Var m = ad::matmul(ad::gather_rows(msg, idx), layer.relation[r].var());
        m = ad::mul_col(m, ad::gather_rows(alpha, idx));
        terms.push_back(ad::scatter_add_rows(m, dst_by_relation.at(r), n));
      }
    }
    x = ad::sum_vars(terms);
    if (l + 1 < layers_.size()) x = ad::relu(x);
    e = ad::matmul(e, layer.relation_update.var());
  }

  Output out;
  out.node_embeddings = x;
  out.readout = ad::mean_rows(
      ad::relu(ad::add_row(ad::matmul(x, readout_weight.var()), readout_bias.var())));
  return out;
}

}  // namespace s2dn
