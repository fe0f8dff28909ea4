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

#ifndef S2DN_REFINING_HPP_
#define S2DN_REFINING_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "s2dn/parameters.hpp"
#include "s2dn/subgraph.hpp"

namespace s2dn {

enum class Estimator { kAttention, kMlp, kWeightedCosine, kCosine };
enum class CandidatePolicy { kAuto, kObservedEdges, kAllPairs };
enum class Provenance { kOriginal, kAdded };

Estimator parse_estimator(std::string_view name);
std::string_view estimator_name(Estimator e);
CandidatePolicy parse_candidate_policy(std::string_view name);
std::string_view candidate_policy_name(CandidatePolicy p);

// Concrete (relaxed Bernoulli) sample:
//   sigmoid((logit(pi) + logit(eps)) / t), pi clamped to [1e-6, 1 - 1e-6].
double relax_bernoulli(double pi, double eps, double t);

struct RefinedEdge {
  LocalIndex i = 0;  // i < j
  LocalIndex j = 0;
  double weight = 0.0;
  Provenance provenance = Provenance::kOriginal;
};

struct RefinedSubgraph {
  std::vector<EntityId> nodes;
  std::vector<RefinedEdge> edges;
};

// Edge reliability F(Z_i, Z_j). All variants are symmetric in (i, j).
//   attention        sigmoid(Z_i A Z_j^T / sqrt(dim) + c), A = (B + B^T) / 2
//   mlp              sigmoid of a two-layer perceptron on [Z_i ; Z_j],
//                    averaged over both argument orders
//   weighted-cosine  sigmoid(cos(w * Z_i, w * Z_j))
//   cosine           (cos(Z_i, Z_j) + 1) / 2
// Cosine variants treat a zero vector as cos = 0.
class ReliabilityEstimator {
 public:
  ReliabilityEstimator() = default;
  ReliabilityEstimator(ParameterStore& store, Estimator kind, std::size_t dim,
                       DetRng& init);

  // Rows of `zi`, `zj` are paired; returns a P x 1 column of probabilities.
  ad::Var probabilities(const ad::Var& zi, const ad::Var& zj) const;
  double estimate(const Eigen::RowVectorXd& zi, const Eigen::RowVectorXd& zj) const;

  Estimator kind() const { return kind_; }

  Parameter bilinear;      // attention: B (dim x dim)
  Parameter offset;        // attention: c (1 x 1)
  Parameter hidden_weight; // mlp: 2 dim x dim
  Parameter hidden_bias;   // mlp: 1 x dim
  Parameter out_weight;    // mlp: dim x 1
  Parameter out_bias;      // mlp: 1 x 1
  Parameter feature_weight;  // weighted-cosine: 1 x dim

 private:
  Estimator kind_ = Estimator::kAttention;
  std::size_t dim_ = 0;
};

struct RefinerOptions {
  Estimator estimator = Estimator::kAttention;
  double temperature = 0.5;
  double threshold = 0.5;
  CandidatePolicy policy = CandidatePolicy::kAuto;
  // kAuto switches from all-pairs to observed edges above this size.
  std::size_t all_pairs_max_nodes = 64;
};

class StructureRefiner {
 public:
  StructureRefiner() = default;
  StructureRefiner(ParameterStore& store, std::size_t dim, DetRng& init,
                   RefinerOptions options);

  // Z = W2 ReLU(W1 x + b1) + b2 row-wise.
  ad::Var encode_nodes(const ad::Var& x0) const;

  // Unordered candidate pairs (i < j) under the configured policy, with a
  // flag telling whether the pair is an observed edge.
  std::vector<std::pair<LocalIndex, LocalIndex>> candidates(
      const EnclosingSubgraph& sub, std::vector<bool>* observed) const;

  struct Output {
    RefinedSubgraph graph;
    ad::Var weights;  // kept x 1, aligned with graph.edges; undefined if empty
  };

  Output refine(const EnclosingSubgraph& sub, const ad::Var& z, Mode mode,
                DetRng* rng) const;

  // Same as `refine` but with caller-supplied candidate probabilities
  // (P x 1, aligned with `candidates(sub, ...)`).
  Output refine_with_probabilities(const EnclosingSubgraph& sub,
                                   const ad::Var& probabilities, Mode mode,
                                   DetRng* rng) const;

  const RefinerOptions& options() const { return options_; }
  const ReliabilityEstimator& estimator() const { return estimator_; }

  Parameter enc_w1, enc_b1, enc_w2, enc_b2;

 private:
  RefinerOptions options_;
  ReliabilityEstimator estimator_;
};

// Unit-weight refined graph holding exactly the observed undirected edges.
RefinedSubgraph unrefined(const EnclosingSubgraph& sub);

// Subgraph JSON line whose "edges" are the refined pairs [i,j], followed by
// "weights" (%.17g) and "provenance" ("original" / "added") after "d_v".
std::string serialize_refined(const EnclosingSubgraph& sub, const RefinedSubgraph& ref);

// L-layer symmetric-normalized GCN over the weighted refined adjacency with
// self loops: H' = D^-1/2 (A + I) D^-1/2 H W + b, ReLU between layers.
// The readout is mean_i sigmoid(f(h_i^L)).
class GcnEncoder {
 public:
  GcnEncoder() = default;
  GcnEncoder(ParameterStore& store, std::size_t dim, std::size_t num_layers,
             DetRng& init);

  // `weights` is |edges| x 1 (may be undefined when `edges` is empty).
  ad::Var encode(std::size_t num_nodes, std::span<const RefinedEdge> edges,
                 const ad::Var& weights, const ad::Var& x0) const;

  struct Layer {
    Parameter weight;
    Parameter bias;
  };
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  Parameter readout_weight;
  Parameter readout_bias;

 private:
  std::vector<Layer> layers_;
  std::size_t dim_ = 0;
};

}  // namespace s2dn

#endif  // S2DN_REFINING_HPP_
