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

// Math-core properties, gradient checks, the extraction oracle and
// determinism. Needs no external data.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "criteria.hpp"
#include "s2dn/eval.hpp"
#include "s2dn/model.hpp"
#include "s2dn/noise.hpp"
#include "s2dn/refining.hpp"
#include "s2dn/smoothing.hpp"
#include "s2dn/subgraph.hpp"
#include "support/fixtures.hpp"

#ifdef S2DN_HAVE_CLI
#include "cli.hpp"
#endif

namespace s2dn::acceptance {
namespace {

namespace fs = std::filesystem;

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ad::Var weighted_sum(const ad::Var& v) {
  Matrix w(v.rows(), v.cols());
  for (ad::Index i = 0; i < w.size(); ++i) w.data()[i] = 0.3 + 0.1 * static_cast<double>(i % 7);
  return ad::sum(ad::mul(v, ad::Var::constant(std::move(w))));
}

Outcome math_core() {
  DetRng rng(1);
  double worst_sum = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    Eigen::VectorXd logits(2 + static_cast<Eigen::Index>(rng.uniform_int(8)));
    for (Eigen::Index i = 0; i < logits.size(); ++i) logits(i) = 10 * rng.uniform01() - 5;
    double tau = 0.05 + 2 * rng.uniform01();
    auto soft = gumbel_softmax(logits, tau, &rng, false);
    if ((soft.array() < 0).any()) return fail("negative soft assignment");
    worst_sum = std::max(worst_sum, std::abs(soft.sum() - 1.0));
    auto hard = gumbel_softmax(logits, tau, &rng, true);
    if ((hard.array() == 1.0).count() != 1 || hard.sum() != 1.0) return fail("hard output not one-hot");
    Eigen::Index best;
    logits.maxCoeff(&best);
    auto cold = gumbel_softmax(logits, 1e-4, nullptr, false);
    if (std::abs(cold(best) - 1.0) > 1e-6 && (logits.array() == logits(best)).count() == 1) {
      // Only a near-tie can stop the limit from reaching the argmax.
      Eigen::VectorXd rest = logits;
      rest(best) = -1e300;
      if (logits(best) - rest.maxCoeff() > 1e-2) return fail("tau->0 does not reach argmax");
    }
  }
  if (worst_sum > 1e-6) return fail("row sum off by " + fmt("%.3g", worst_sum));

  if (std::abs(relax_bernoulli(0.8, 0.5, 1.0) - 0.8) > 1e-12) return fail("relax(0.8,0.5,1)");
  for (double t : {0.1, 0.5, 1.0, 3.0}) {
    if (relax_bernoulli(0.5, 0.5, t) != 0.5) return fail("relax(0.5,0.5,t)");
  }
  for (int trial = 0; trial < 10000; ++trial) {
    double a = rng.uniform01(), b = rng.uniform01();
    double eps = rng.uniform_open01(), t = 0.05 + 2 * rng.uniform01();
    double lo = std::min(a, b), hi = std::max(a, b);
    if (relax_bernoulli(lo, eps, t) > relax_bernoulli(hi, eps, t)) {
      return fail("relax_bernoulli not monotone in pi");
    }
  }

  double min_kl = 1.0;
  for (int trial = 0; trial < 500; ++trial) {
    Matrix e(4, 6), f(4, 6);
    for (ad::Index i = 0; i < e.size(); ++i) {
      e.data()[i] = 6 * rng.uniform01() - 3;
      f.data()[i] = 6 * rng.uniform01() - 3;
    }
    if (kl_term(ad::Var::constant(e), ad::Var::constant(e)).scalar() != 0.0) {
      return fail("KL(E,E) != 0");
    }
    min_kl = std::min(min_kl, kl_term(ad::Var::constant(e), ad::Var::constant(f)).scalar());
  }
  if (min_kl < 0.0) return fail("negative KL");
  return pass("row sums within " + fmt("%.1e", worst_sum) + ", 10^4 monotone draws, min KL " +
              fmt("%.3g", min_kl));
}

Outcome gradients() {
  auto g = testing::five_node_graph();
  auto sub = extract_enclosing(g, {0, 2, 2}, 2, true, 1);
  const auto n = static_cast<ad::Index>(sub.num_nodes());
  double module_worst = 0.0, e2e_worst = 0.0;
  std::string module_name;
  auto note = [&](double err, double& worst, const std::string& name) {
    if (err > worst) {
      worst = err;
      if (&worst == &module_worst) module_name = name;
    }
  };

  {
    ParameterStore store;
    DetRng init(2);
    RelationSmoother sm(store, 3, 4, init, {1.0, false, false});
    note(testing::finite_difference_check(
             [&] { return weighted_sum(sm.forward(Mode::kInfer, nullptr).smoothed); },
             store.all())
             .max_rel_error,
         module_worst, "smoother");
  }
  for (auto phi : {Aggregation::kSum, Aggregation::kProduct}) {
    ParameterStore store;
    DetRng init(3);
    SemanticEncoder enc(store, 3, 4, 2, init, phi);
    auto x0 = ad::Var::constant(xavier_uniform(n, 4, init));
    auto e = ad::Var::constant(xavier_uniform(3, 4, init));
    note(testing::finite_difference_check(
             [&] { return ad::sum_squares(enc.encode(sub, x0, e).readout); }, store.all())
             .max_rel_error,
         module_worst, "rgnn");
  }
  for (auto est : {Estimator::kAttention, Estimator::kMlp, Estimator::kWeightedCosine,
                   Estimator::kCosine}) {
    RefinerOptions opts;
    opts.estimator = est;
    opts.threshold = 0.05;
    // Cosine is not differentiable at a zero node encoding (dead ReLU rows),
    // so draw initializations until every encoded row is away from zero.
    std::unique_ptr<ParameterStore> holder;
    StructureRefiner refiner;
    GcnEncoder gcn;
    ad::Var x0;
    for (std::uint64_t seed = 4;; ++seed) {
      holder = std::make_unique<ParameterStore>();
      DetRng init(seed);
      refiner = StructureRefiner(*holder, 4, init, opts);
      gcn = GcnEncoder(*holder, 4, 2, init);
      x0 = ad::Var::constant(xavier_uniform(n, 4, init));
      if (refiner.encode_nodes(x0).value().rowwise().norm().minCoeff() > 1e-3) break;
    }
    ParameterStore& store = *holder;
    note(testing::finite_difference_check(
             [&] {
               DetRng rng(9);
               auto out = refiner.refine(sub, refiner.encode_nodes(x0), Mode::kTrain, &rng);
               return weighted_sum(gcn.encode(sub.num_nodes(), out.graph.edges, out.weights, x0));
             },
             store.all())
             .max_rel_error,
         module_worst, std::string("refiner/") + std::string(estimator_name(est)));
  }

  for (int variant = 0; variant < 3; ++variant) {
    auto cfg = testing::tiny_config(2);
    cfg.dim = 4;
    cfg.hard_smoothing = false;
    cfg.lambda = 0.01;
    cfg.disable_smoothing = variant == 1;
    cfg.disable_refining = variant == 2;
    S2DNModel model(cfg, g.num_relations());
    std::vector<EnclosingSubgraph> subs{sub, extract_enclosing(g, {1, 0, 4}, 2, true, 0)};
    std::vector<double> labels{1.0, 0.0};
    note(testing::finite_difference_check(
             [&] {
               DetRng noise(5);
               auto state = model.smoothing_state(Mode::kTrain, &noise);
               std::vector<ad::Var> ps;
               for (const auto& s : subs) {
                 ps.push_back(model.forward(s, state, Mode::kTrain, &noise).probability);
               }
               return model.loss(ps, labels, state);
             },
             model.parameters().all())
             .max_rel_error,
         e2e_worst, "end-to-end");
  }
  std::string detail = "module max rel err " + fmt("%.2e", module_worst) + " (" + module_name +
                       "), end-to-end " + fmt("%.2e", e2e_worst);
  return check(module_worst < 1e-4 && e2e_worst < 1e-3, detail);
}

Outcome extraction_oracle() {
  DetRng rng(2026);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 2 + rng.uniform_int(49);
    auto g = testing::random_graph(rng, n, 1 + rng.uniform_int(4), 0.3 * rng.uniform01());
    std::uint32_t k = 1 + static_cast<std::uint32_t>(rng.uniform_int(4));
    Triple target{static_cast<EntityId>(rng.uniform_int(n)), 0,
                  static_cast<EntityId>(rng.uniform_int(n))};
    if (!g.triples().empty() && rng.uniform01() < 0.5) {
      target = g.triples()[rng.uniform_int(g.triples().size())];
    }
    bool drop = rng.uniform01() < 0.5;
    if (extract_enclosing(g, target, k, drop, 1) !=
        testing::brute_force_enclosing(g, target, k, drop, 1)) {
      return fail("mismatch on random graph " + std::to_string(trial));
    }
  }

  // Leakage: write positive caches, read them back, scan every line.
  auto dir = testing::temp_dir("acceptance_o1");
  std::size_t lines = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    DetRng grng(seed);
    auto g = testing::random_graph(grng, 40, 3, 0.08);
    std::vector<ExtractionRequest> reqs;
    for (const auto& t : g.triples()) reqs.push_back({t, 1, true});
    auto path = dir / ("pos" + std::to_string(seed) + ".jsonl");
    write_subgraph_cache(extract_batch(g, reqs, 2, 2), path);
    for (const auto& s : read_subgraph_cache(path)) {
      ++lines;
      for (const auto& e : s.edges) {
        if (s.nodes[e.src] == s.target.head && s.nodes[e.dst] == s.target.tail &&
            e.rel == s.target.rel) {
          return fail("positive cache line contains its target triple");
        }
      }
    }
  }
  return pass("200 random graphs match the all-pairs oracle; " + std::to_string(lines) +
              " positive cache lines leak-free");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  auto dir = testing::temp_dir("acceptance_d1");
  const auto smoke = testing::fixture_path("smoke30.tsv");
  const auto contam = testing::fixture_path("contam100.tsv");
  std::string mode;
#ifdef S2DN_HAVE_CLI
  mode = "cli";
  std::ostringstream sink;
  for (const char* tag : {"a", "b"}) {
    std::string t(tag);
    if (cli::run({"prepare", smoke.string(), "--k", "2", "--seed", "5", "--out",
                  (dir / ("prep_" + t + ".jsonl")).string()},
                 sink, sink) != 0 ||
        cli::run({"contaminate", contam.string(), "--noise-kind", "structural", "--noise-ratio",
                  "0.35", "--seed", "5", "--out", (dir / ("noise_" + t + ".tsv")).string()},
                 sink, sink) != 0) {
      return fail("cli run failed: " + sink.str());
    }
  }
#else
  mode = "library";
  for (const char* tag : {"a", "b"}) {
    std::string t(tag);
    auto g = load_graph(smoke);
    std::vector<ExtractionRequest> reqs;
    for (std::size_t i = 0; i < g.triples().size(); ++i) {
      reqs.push_back({g.triples()[i], 1, true});
      DetRng rng(derive_seed(5, i));
      for (const auto& neg : sample_negatives(g, g.triples()[i], 1, CorruptMode::kTail, rng)) {
        reqs.push_back({neg, 0, false});
      }
    }
    write_subgraph_cache(extract_batch(g, reqs, 2), dir / ("prep_" + t + ".jsonl"));
    save_graph(contaminate(load_graph(contam), {NoiseKind::kStructural, 0.35, 5}),
               dir / ("noise_" + t + ".tsv"));
  }
#endif
  if (slurp(dir / "prep_a.jsonl").empty() || slurp(dir / "prep_a.jsonl") != slurp(dir / "prep_b.jsonl")) {
    return fail("prepare output differs between runs");
  }
  if (slurp(dir / "noise_a.tsv") != slurp(dir / "noise_b.tsv")) {
    return fail("contaminate output differs between runs");
  }

  auto g = load_graph(smoke);
  S2DNModel model(testing::tiny_config(2), g.num_relations());
  std::vector<Triple> test(g.triples().begin(), g.triples().begin() + 10);
  EvalOptions opt;
  opt.num_negatives = 5;
  opt.seed = 5;
  auto a = evaluate_ranking(model, g, test, opt);
  opt.threads = 4;
  auto b = evaluate_ranking(model, g, test, opt);
  std::ostringstream ca, cb;
  write_ranking_csv(a, ca);
  write_ranking_csv(b, cb);
  if (ca.str() != cb.str() || a.mrr != b.mrr || a.hits10 != b.hits10) {
    return fail("evaluate_ranking differs between runs");
  }
  return pass("prepare, contaminate (" + mode + ") and evaluate_ranking identical across runs");
}

}  // namespace
}  // namespace s2dn::acceptance

int main() {
  using namespace s2dn::acceptance;
  Reporter r(std::cout);
  r.run("P1", "math-core property suite", 60, math_core);
  r.run("P2", "finite-difference gradient suite", 300, gradients);
  r.run("O1", "extraction oracle and leakage suite", 120, extraction_oracle);
  r.run("D1", "determinism of prepare/contaminate/evaluate", 0, determinism);
  return r.exit_code();
}
