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

// The full scorer: semantic branch (smoothing + relational message passing)
// and structural branch (refining + GCN) joined by a two-layer classifier.

#ifndef S2DN_MODEL_HPP_
#define S2DN_MODEL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "s2dn/config.hpp"
#include "s2dn/parameters.hpp"
#include "s2dn/refining.hpp"
#include "s2dn/smoothing.hpp"
#include "s2dn/subgraph.hpp"

namespace s2dn {

// Smoothing outputs shared by every example of a batch.
struct SmoothingState {
  ad::Var assignment;  // R~
  ad::Var smoothed;    // E~
  ad::Var original;    // E
  std::vector<RelationId> hard_labels;
};

// sum_r KL(softmax(E~_r) || softmax(E_r)) / |R|, softmax over the feature axis.
ad::Var kl_term(const ad::Var& smoothed, const ad::Var& original);

// Mean binary cross-entropy with p clamped to [1e-7, 1 - 1e-7].
ad::Var bce_term(std::span<const ad::Var> probabilities, std::span<const double> labels);

class S2DNModel {
 public:
  S2DNModel(ModelConfig config, std::size_t num_relations);

  S2DNModel(S2DNModel&&) = default;
  S2DNModel& operator=(S2DNModel&&) = default;
  S2DNModel(const S2DNModel&) = delete;
  S2DNModel& operator=(const S2DNModel&) = delete;

  const ModelConfig& config() const { return config_; }
  std::size_t num_relations() const { return num_relations_; }
  ParameterStore& parameters() { return store_; }
  const ParameterStore& parameters() const { return store_; }

  // Identity assignment when smoothing is disabled.
  SmoothingState smoothing_state(Mode mode, DetRng* noise) const;

  struct Forward {
    ad::Var probability;  // 1 x 1
    ad::Var logit;        // 1 x 1, pre-sigmoid
    ad::Var h_sem;
    ad::Var h_str;
    RefinedSubgraph refined;
    EnclosingSubgraph relabeled;
  };

  // `noise` feeds the concrete relaxation in train mode.
  Forward forward(const EnclosingSubgraph& sub, const SmoothingState& state,
                  Mode mode, DetRng* noise) const;

  // Deterministic (infer-mode) link probability.
  double score(const EnclosingSubgraph& sub) const;
  double score(const EnclosingSubgraph& sub, const SmoothingState& state) const;
  std::vector<double> score_batch(std::span<const EnclosingSubgraph> subs,
                                  unsigned threads = 1) const;

  // Composite objective: BCE + KL + lambda * sum ||theta||^2.
  ad::Var loss(std::span<const ad::Var> probabilities, std::span<const double> labels,
               const SmoothingState& state) const;
  ad::Var regularizer() const;

  // Refined subgraph the model would use at inference.
  RefinedSubgraph refine_for_export(const EnclosingSubgraph& sub) const;

  RelationSmoother& smoother() { return smoother_; }
  SemanticEncoder& semantic() { return semantic_; }
  StructureRefiner& refiner() { return refiner_; }
  GcnEncoder& gcn() { return gcn_; }
  Parameter& classifier_out_bias() { return cls_b2_; }

 private:
  ad::Var project(const EnclosingSubgraph& sub) const;

  ModelConfig config_;
  std::size_t num_relations_ = 0;
  ParameterStore store_;
  Parameter proj_w_, proj_b_;
  RelationSmoother smoother_;
  SemanticEncoder semantic_;
  StructureRefiner refiner_;
  GcnEncoder gcn_;
  Parameter cls_w1_, cls_b1_, cls_w2_, cls_b2_;
};

double parameter_norm(const Parameter& p);

}  // namespace s2dn

#endif  // S2DN_MODEL_HPP_
