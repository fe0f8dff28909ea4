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

// Semantic smoothing: a learned, row-stochastic assignment of every relation
// onto the relation set, sampled with the Gumbel-softmax trick, and the
// attention-weighted relational message passing that runs over the
// relabeled subgraph.

#ifndef S2DN_SMOOTHING_HPP_
#define S2DN_SMOOTHING_HPP_

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "s2dn/kg_store.hpp"
#include "s2dn/parameters.hpp"
#include "s2dn/subgraph.hpp"

namespace s2dn {

// exp((logits + G) / tau), normalized, with G_i = -log(-log(U_i)) drawn from
// `rng` or zero when `rng` is null. `hard` returns one-hot(argmax) with ties
// resolved to the lowest index. Throws NumericError for non-finite logits.
Eigen::VectorXd gumbel_softmax(const Eigen::VectorXd& logits, double tau,
                               DetRng* rng, bool hard);

// Index of the first maximal entry of row `row`.
std::size_t argmax_row(const Matrix& m, Eigen::Index row);

struct SmootherOptions {
  double tau = 1.0;
  bool hard = true;
  // Feed E W^T + b to the Gumbel-softmax directly instead of log(softmax(.)).
  bool skip_outer_softmax = false;
};

// Numeric snapshot of one smoothing pass.
struct SmoothedRelations {
  Matrix assignment;  // |R| x |R|, row-stochastic
  Matrix smoothed;    // |R| x dim
  std::vector<RelationId> hard_labels;
};

class RelationSmoother {
 public:
  RelationSmoother() = default;
  RelationSmoother(ParameterStore& store, std::size_t num_relations,
                   std::size_t dim, DetRng& init, SmootherOptions options);

  struct Output {
    ad::Var assignment;  // straight-through one-hot in hard mode
    ad::Var smoothed;    // assignment * E
    ad::Var original;    // E
    std::vector<RelationId> hard_labels;
  };

  // Train mode draws Gumbel noise from `noise`; infer mode uses none.
  Output forward(Mode mode, DetRng* noise) const;
  SmoothedRelations smooth(Mode mode, DetRng* noise) const;

  std::size_t num_relations() const { return num_relations_; }
  const SmootherOptions& options() const { return options_; }

  Parameter embeddings;  // E, Xavier-initialized
  Parameter weights;     // W
  Parameter bias;        // b (1 x |R|)

 private:
  std::size_t num_relations_ = 0;
  SmootherOptions options_;
};

// Rewrites every edge relation r as hard_labels[r]; structure is unchanged.
EnclosingSubgraph relabel_subgraph(const EnclosingSubgraph& sub,
                                   const std::vector<RelationId>& hard_labels);

enum class Aggregation { kSum, kProduct };

Aggregation parse_aggregation(std::string_view name);
std::string_view aggregation_name(Aggregation a);

// L-layer relational message passing with per-edge sigmoid attention.
//
//   x_i^l = S_l x_i^{l-1}
//         + sum over edges (j -r-> i) of a_ijr W_{l,r} phi(e_r^{l-1}, x_j^{l-1})
//   a_ijr = sigmoid(w_att . [x_i ; x_j ; e_r] + b_att)
//   e^l   = e^{l-1} U_l
//
// Stored edges carry messages in both directions. ReLU separates layers.
// The readout is mean_i ReLU(f(x_i^L)).
class SemanticEncoder {
 public:
  SemanticEncoder() = default;
  SemanticEncoder(ParameterStore& store, std::size_t num_relations,
                  std::size_t dim, std::size_t num_layers, DetRng& init,
                  Aggregation phi);

  struct Output {
    ad::Var node_embeddings;  // X^L
    ad::Var readout;          // h_sem, 1 x dim
  };

  // `x0` is |nodes| x dim; `relation_embeddings` has a row per relation id
  // that occurs in `sub.edges`.
  Output encode(const EnclosingSubgraph& sub, const ad::Var& x0,
                const ad::Var& relation_embeddings) const;

  std::size_t num_layers() const { return layers_.size(); }

  struct Layer {
    Parameter self_loop;
    std::vector<Parameter> relation;  // one dim x dim transform per relation
    Parameter relation_update;
  };

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  Parameter attention_weight;  // 3 dim x 1
  Parameter attention_bias;    // 1 x 1
  Parameter readout_weight;    // dim x dim
  Parameter readout_bias;      // 1 x dim

 private:
  std::vector<Layer> layers_;
  std::size_t dim_ = 0;
  Aggregation phi_ = Aggregation::kSum;
};

}  // namespace s2dn

#endif  // S2DN_SMOOTHING_HPP_
