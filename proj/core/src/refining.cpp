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

#include "s2dn/refining.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "s2dn/errors.hpp"

namespace s2dn {

namespace {

constexpr double kPiClamp = 1e-6;

double logit(double p) { return std::log(p) - std::log1p(-p); }

ad::Var logit_var(const ad::Var& p) {
  return ad::sub(ad::log(p), ad::log(ad::add_scalar(ad::scale(p, -1.0), 1.0)));
}

std::set<std::pair<LocalIndex, LocalIndex>> observed_pairs(const EnclosingSubgraph& sub) {
  std::set<std::pair<LocalIndex, LocalIndex>> pairs;
  for (const auto& e : sub.edges) {
    if (e.src == e.dst) continue;
    pairs.emplace(std::min(e.src, e.dst), std::max(e.src, e.dst));
  }
  return pairs;
}

}  // namespace

Estimator parse_estimator(std::string_view name) {
  if (name == "attention") return Estimator::kAttention;
  if (name == "mlp") return Estimator::kMlp;
  if (name == "weighted-cosine") return Estimator::kWeightedCosine;
  if (name == "cosine") return Estimator::kCosine;
  throw ConfigError("unknown estimator '" + std::string(name) +
                    "' (expected attention, mlp, weighted-cosine or cosine)");
}

std::string_view estimator_name(Estimator e) {
  switch (e) {
    case Estimator::kAttention: return "attention";
    case Estimator::kMlp: return "mlp";
    case Estimator::kWeightedCosine: return "weighted-cosine";
    case Estimator::kCosine: return "cosine";
  }
  return "attention";
}

CandidatePolicy parse_candidate_policy(std::string_view name) {
  if (name == "auto") return CandidatePolicy::kAuto;
  if (name == "observed-edges") return CandidatePolicy::kObservedEdges;
  if (name == "all-pairs") return CandidatePolicy::kAllPairs;
  throw ConfigError("unknown candidate policy '" + std::string(name) +
                    "' (expected auto, observed-edges or all-pairs)");
}

std::string_view candidate_policy_name(CandidatePolicy p) {
  switch (p) {
    case CandidatePolicy::kAuto: return "auto";
    case CandidatePolicy::kObservedEdges: return "observed-edges";
    case CandidatePolicy::kAllPairs: return "all-pairs";
  }
  return "auto";
}

double relax_bernoulli(double pi, double eps, double t) {
  if (!(t > 0.0)) throw ArgumentError("relax_bernoulli: temperature must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("relax_bernoulli: eps must lie in (0,1)");
  pi = std::clamp(pi, kPiClamp, 1.0 - kPiClamp);
  double z = (logit(pi) + logit(eps)) / t;
  return 1.0 / (1.0 + std::exp(-z));
}

ReliabilityEstimator::ReliabilityEstimator(ParameterStore& store, Estimator kind,
                                           std::size_t dim, DetRng& init)
    : kind_(kind), dim_(dim) {
  const auto d = static_cast<ad::Index>(dim);
  switch (kind) {
    case Estimator::kAttention:
      bilinear = store.add("refiner.attention.B", Matrix::Identity(d, d));
      offset = store.add("refiner.attention.c", Matrix::Zero(1, 1));
      break;
    case Estimator::kMlp:
      hidden_weight = store.add("refiner.mlp.W1", xavier_uniform(2 * d, d, init));
      hidden_bias = store.add("refiner.mlp.b1", Matrix::Zero(1, d));
      out_weight = store.add("refiner.mlp.W2", xavier_uniform(d, 1, init));
      out_bias = store.add("refiner.mlp.b2", Matrix::Zero(1, 1));
      break;
    case Estimator::kWeightedCosine:
      feature_weight = store.add("refiner.cosine.w", Matrix::Ones(1, d));
      break;
    case Estimator::kCosine:
      break;
  }
}

ad::Var ReliabilityEstimator::probabilities(const ad::Var& zi, const ad::Var& zj) const {
  if (zi.rows() != zj.rows() || zi.cols() != zj.cols()) {
    throw ShapeError("estimate_reliability: Z_i and Z_j must have equal shapes");
  }
  switch (kind_) {
    case Estimator::kAttention: {
      ad::Var b = bilinear.var();
      ad::Var a = ad::scale(ad::add(b, ad::transpose(b)), 0.5);
      ad::Var s = ad::rows_dot(ad::matmul(zi, a), zj);
      s = ad::scale(s, 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(dim_, 1))));
      return ad::sigmoid(ad::add_row(s, offset.var()));
    }
    case Estimator::kMlp: {
      auto score = [this](const ad::Var& x, const ad::Var& y) {
        std::vector<ad::Var> parts{x, y};
        ad::Var h = ad::relu(ad::add_row(
            ad::matmul(ad::concat_cols(parts), hidden_weight.var()), hidden_bias.var()));
        return ad::add_row(ad::matmul(h, out_weight.var()), out_bias.var());
      };
      return ad::sigmoid(ad::scale(ad::add(score(zi, zj), score(zj, zi)), 0.5));
    }
    case Estimator::kWeightedCosine: {
      ad::Var w = feature_weight.var();
      return ad::sigmoid(ad::rows_cosine(ad::mul_row(zi, w), ad::mul_row(zj, w)));
    }
    case Estimator::kCosine:
      return ad::add_scalar(ad::scale(ad::rows_cosine(zi, zj), 0.5), 0.5);
  }
  throw ArgumentError("unknown estimator");
}

double ReliabilityEstimator::estimate(const Eigen::RowVectorXd& zi,
                                      const Eigen::RowVectorXd& zj) const {
  if (zi.size() != zj.size()) {
    throw ShapeError("estimate_reliability: vectors differ in dimension");
  }
  Matrix a = zi;
  Matrix b = zj;
  return probabilities(ad::Var::constant(a), ad::Var::constant(b)).scalar();
}

StructureRefiner::StructureRefiner(ParameterStore& store, std::size_t dim,
                                   DetRng& init, RefinerOptions options)
    : options_(options) {
  if (!(options_.temperature > 0.0)) throw ConfigError("concrete temperature must be positive");
  if (!(options_.threshold > 0.0 && options_.threshold < 1.0)) {
    throw ConfigError("prune threshold must lie in (0,1)");
  }
  const auto d = static_cast<ad::Index>(dim);
  enc_w1 = store.add("refiner.encoder.W1", xavier_uniform(d, d, init));
  enc_b1 = store.add("refiner.encoder.b1", Matrix::Zero(1, d));
  enc_w2 = store.add("refiner.encoder.W2", xavier_uniform(d, d, init));
  enc_b2 = store.add("refiner.encoder.b2", Matrix::Zero(1, d));
  estimator_ = ReliabilityEstimator(store, options_.estimator, dim, init);
}

ad::Var StructureRefiner::encode_nodes(const ad::Var& x0) const {
  ad::Var h = ad::relu(ad::add_row(ad::matmul(x0, enc_w1.var()), enc_b1.var()));
  return ad::add_row(ad::matmul(h, enc_w2.var()), enc_b2.var());
}

std::vector<std::pair<LocalIndex, LocalIndex>> StructureRefiner::candidates(
    const EnclosingSubgraph& sub, std::vector<bool>* observed) const {
  auto pairs = observed_pairs(sub);
  const std::size_t n = sub.nodes.size();
  bool all_pairs = options_.policy == CandidatePolicy::kAllPairs ||
                   (options_.policy == CandidatePolicy::kAuto &&
                    n <= options_.all_pairs_max_nodes);
  std::vector<std::pair<LocalIndex, LocalIndex>> out;
  if (observed) observed->clear();
  if (all_pairs) {
    if (n >= 2) out.reserve(n * (n - 1) / 2);
    for (LocalIndex i = 0; i < n; ++i) {
      for (LocalIndex j = i + 1; j < n; ++j) {
        out.emplace_back(i, j);
        if (observed) observed->push_back(pairs.contains({i, j}));
      }
    }
  } else {
    out.assign(pairs.begin(), pairs.end());
    if (observed) observed->assign(out.size(), true);
  }
  return out;
}

StructureRefiner::Output StructureRefiner::refine(const EnclosingSubgraph& sub,
                                                  const ad::Var& z, Mode mode,
                                                  DetRng* rng) const {
  if (sub.nodes.empty()) throw ShapeError("refine_structure: empty subgraph");
  if (z.rows() != static_cast<ad::Index>(sub.nodes.size())) {
    throw ShapeError("refine_structure: one embedding row per node required");
  }
  auto cand = candidates(sub, nullptr);
  if (cand.empty()) return {RefinedSubgraph{sub.nodes, {}}, ad::Var()};
  std::vector<std::uint32_t> is, js;
  is.reserve(cand.size());
  js.reserve(cand.size());
  for (const auto& [i, j] : cand) {
    is.push_back(i);
    js.push_back(j);
  }
  ad::Var pi = estimator_.probabilities(ad::gather_rows(z, is), ad::gather_rows(z, js));
  return refine_with_probabilities(sub, pi, mode, rng);
}

StructureRefiner::Output StructureRefiner::refine_with_probabilities(
    const EnclosingSubgraph& sub, const ad::Var& probabilities, Mode mode,
    DetRng* rng) const {
  std::vector<bool> observed;
  auto cand = candidates(sub, &observed);
  Output out;
  out.graph.nodes = sub.nodes;
  if (cand.empty()) return out;
  if (probabilities.rows() != static_cast<ad::Index>(cand.size()) ||
      probabilities.cols() != 1) {
    throw ShapeError("refine_structure: expected " + std::to_string(cand.size()) +
                     "x1 candidate probabilities");
  }

  ad::Var w = probabilities;
  if (mode == Mode::kTrain) {
    if (!rng) throw ArgumentError("refine_structure: train mode needs an rng");
    Matrix noise(static_cast<ad::Index>(cand.size()), 1);
    for (ad::Index e = 0; e < noise.rows(); ++e) noise(e, 0) = logit(rng->uniform_open01());
    ad::Var pc = ad::clamp(probabilities, kPiClamp, 1.0 - kPiClamp);
    w = ad::sigmoid(ad::scale(ad::add(logit_var(pc), ad::Var::constant(std::move(noise))),
                              1.0 / options_.temperature));
  }

  std::vector<std::uint32_t> kept;
  for (std::size_t e = 0; e < cand.size(); ++e) {
    double weight = w.value()(static_cast<ad::Index>(e), 0);
    if (!std::isfinite(weight)) throw NumericError("refine_structure: non-finite edge weight");
    if (weight < options_.threshold) continue;
    kept.push_back(static_cast<std::uint32_t>(e));
    out.graph.edges.push_back({cand[e].first, cand[e].second, weight,
                               observed[e] ? Provenance::kOriginal : Provenance::kAdded});
  }
  if (!kept.empty()) out.weights = ad::gather_rows(w, kept);
  return out;
}

RefinedSubgraph unrefined(const EnclosingSubgraph& sub) {
  RefinedSubgraph out;
  out.nodes = sub.nodes;
  for (const auto& [i, j] : observed_pairs(sub)) {
    out.edges.push_back({i, j, 1.0, Provenance::kOriginal});
  }
  return out;
}

std::string serialize_refined(const EnclosingSubgraph& sub, const RefinedSubgraph& ref) {
  EnclosingSubgraph head = sub;
  head.edges.clear();
  std::string base = serialize_subgraph(head);
  // Splice the refined pairs into the empty "edges" array.
  const std::string marker = "\"edges\":[]";
  auto pos = base.find(marker);
  std::string edges = "\"edges\":[";
  std::string weights = ",\"weights\":[";
  std::string provenance = ",\"provenance\":[";
  char buf[64];
  for (std::size_t e = 0; e < ref.edges.size(); ++e) {
    const auto& r = ref.edges[e];
    if (e) {
      edges.push_back(',');
      weights.push_back(',');
      provenance.push_back(',');
    }
    edges += "[" + std::to_string(r.i) + "," + std::to_string(r.j) + "]";
    std::snprintf(buf, sizeof buf, "%.17g", r.weight);
    weights += buf;
    provenance += r.provenance == Provenance::kOriginal ? "\"original\"" : "\"added\"";
  }
  edges.push_back(']');
  base.replace(pos, marker.size(), edges);
  base.pop_back();
  return base + weights + "]" + provenance + "]}";
}

GcnEncoder::GcnEncoder(ParameterStore& store, std::size_t dim,
                       std::size_t num_layers, DetRng& init)
    : dim_(dim) {
  if (num_layers == 0) throw ArgumentError("gcn encoder needs >= 1 layer");
  const auto d = static_cast<ad::Index>(dim);
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::string prefix = "gcn.layer" + std::to_string(l) + ".";
    layers_.push_back({store.add(prefix + "W", xavier_uniform(d, d, init)),
                       store.add(prefix + "b", Matrix::Zero(1, d))});
  }
  readout_weight = store.add("gcn.readout.W", xavier_uniform(d, d, init));
  readout_bias = store.add("gcn.readout.b", Matrix::Zero(1, d));
}

ad::Var GcnEncoder::encode(std::size_t num_nodes, std::span<const RefinedEdge> edges,
                           const ad::Var& weights, const ad::Var& x0) const {
  const auto n = static_cast<ad::Index>(num_nodes);
  if (n == 0) throw ShapeError("gcn_encode: empty subgraph");
  if (x0.rows() != n || x0.cols() != static_cast<ad::Index>(dim_)) {
    throw ShapeError("gcn_encode: node features must be " + std::to_string(n) + "x" +
                     std::to_string(dim_));
  }
  if (!edges.empty() &&
      (!weights.defined() || weights.rows() != static_cast<ad::Index>(edges.size()) ||
       weights.cols() != 1)) {
    throw ShapeError("gcn_encode: one weight per refined edge required");
  }

  std::vector<std::uint32_t> is, js;
  for (const auto& e : edges) {
    if (e.i >= num_nodes || e.j >= num_nodes) throw ShapeError("gcn_encode: edge out of range");
    is.push_back(e.i);
    js.push_back(e.j);
  }

  // deg_i = 1 + sum of incident weights; the self loop carries weight 1.
  ad::Var inv_sqrt, self_coef, coef;
  if (edges.empty()) {
    self_coef = ad::Var::constant(Matrix::Ones(n, 1));
  } else {
    std::vector<ad::Var> inc{ad::scatter_add_rows(weights, is, n),
                             ad::scatter_add_rows(weights, js, n)};
    ad::Var deg = ad::add_scalar(ad::sum_vars(inc), 1.0);
    inv_sqrt = ad::pow_scalar(deg, -0.5);
    self_coef = ad::pow_scalar(deg, -1.0);
    coef = ad::mul(weights, ad::mul(ad::gather_rows(inv_sqrt, is), ad::gather_rows(inv_sqrt, js)));
  }

  ad::Var h = x0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    std::vector<ad::Var> terms{ad::mul_col(h, self_coef)};
    if (!edges.empty()) {
      terms.push_back(ad::scatter_add_rows(ad::mul_col(ad::gather_rows(h, js), coef), is, n));
      terms.push_back(ad::scatter_add_rows(ad::mul_col(ad::gather_rows(h, is), coef), js, n));
    }
    h = ad::add_row(ad::matmul(ad::sum_vars(terms), layers_[l].weight.var()),
                    layers_[l].bias.var());
    if (l + 1 < layers_.size()) h = ad::relu(h);
  }
  return ad::mean_rows(
      ad::sigmoid(ad::add_row(ad::matmul(h, readout_weight.var()), readout_bias.var())));
}

}  // namespace s2dn
