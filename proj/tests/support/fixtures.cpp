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

#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace s2dn::testing {

namespace {

constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max() / 4;

std::vector<std::vector<std::uint32_t>> floyd_warshall(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<std::uint32_t>> d(n, std::vector<std::uint32_t>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [a, b] : edges) {
    d[a][b] = std::min<std::uint32_t>(d[a][b], 1);
    d[b][a] = std::min<std::uint32_t>(d[b][a], 1);
  }
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        d[i][j] = std::min(d[i][j], d[i][m] + d[m][j]);
      }
    }
  }
  return d;
}

}  // namespace

KnowledgeGraph graph_from(const std::vector<Row>& rows) {
  std::vector<NamedTriple> named;
  for (const auto& [h, r, t] : rows) named.push_back({h, r, t});
  return build_graph(named, nullptr, nullptr);
}

KnowledgeGraph random_graph(DetRng& rng, std::size_t n, std::size_t r, double density) {
  Vocabulary ents, rels;
  for (std::size_t i = 0; i < n; ++i) ents.add("e" + std::to_string(i));
  for (std::size_t i = 0; i < r; ++i) rels.add("r" + std::to_string(i));
  std::vector<Triple> triples;
  for (EntityId i = 0; i < n; ++i) {
    for (EntityId j = 0; j < n; ++j) {
      if (i == j || rng.uniform01() >= density) continue;
      triples.push_back({i, static_cast<RelationId>(rng.uniform_int(r)), j});
    }
  }
  return KnowledgeGraph(std::move(ents), std::move(rels), std::move(triples));
}

EnclosingSubgraph brute_force_enclosing(const KnowledgeGraph& graph, const Triple& target,
                                        std::uint32_t k, bool drop_target_edge, int label) {
  const std::size_t n = graph.num_entities();
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (const auto& t : graph.triples()) all.emplace_back(t.head, t.tail);
  auto d = floyd_warshall(n, all);

  EnclosingSubgraph sub;
  sub.target = target;
  sub.label = label;
  sub.k = k;
  for (EntityId i = 0; i < n; ++i) {
    bool in = (d[i][target.head] <= k && d[i][target.tail] <= k) || i == target.head ||
              i == target.tail;
    if (in) sub.nodes.push_back(i);
  }
  auto local = [&](EntityId e) -> long {
    auto it = std::find(sub.nodes.begin(), sub.nodes.end(), e);
    return it == sub.nodes.end() ? -1 : it - sub.nodes.begin();
  };
  std::set<LocalEdge> edges;
  for (const auto& t : graph.triples()) {
    long a = local(t.head), b = local(t.tail);
    if (a >= 0 && b >= 0) {
      edges.insert({static_cast<LocalIndex>(a), t.rel, static_cast<LocalIndex>(b)});
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> induced;
  for (const auto& e : edges) induced.emplace_back(e.src, e.dst);
  auto dl = floyd_warshall(sub.nodes.size(), induced);
  const auto lu = static_cast<std::size_t>(local(target.head));
  const auto lv = static_cast<std::size_t>(local(target.tail));
  for (std::size_t i = 0; i < sub.nodes.size(); ++i) {
    sub.d_u.push_back(std::min<std::uint32_t>(dl[i][lu], k));
    sub.d_v.push_back(std::min<std::uint32_t>(dl[i][lv], k));
  }
  for (const auto& e : edges) {
    bool is_target = e.rel == target.rel && ((e.src == lu && e.dst == lv) ||
                                             (e.src == lv && e.dst == lu));
    if (drop_target_edge && is_target) continue;
    sub.edges.push_back(e);
  }
  return sub;
}

PlantedDataset planted_dataset(std::size_t train_families, std::size_t test_families,
                               std::uint64_t seed) {
  DetRng rng(seed);
  const Vocabulary rels({"parent", "grandparent", "sibling", "spouse"});
  auto family = [&](const std::string& prefix, std::size_t families, Vocabulary& ents,
                    std::vector<Triple>& graph, std::vector<Triple>& held) {
    for (std::size_t f = 0; f < families; ++f) {
      const std::string p = prefix + std::to_string(f) + "_";
      auto id = [&](const std::string& s) { return ents.add(p + s); };
      EntityId root = id("root");
      EntityId kids[2] = {id("a"), id("b")};
      EntityId grand[2][2] = {{id("a0"), id("a1")}, {id("b0"), id("b1")}};
      graph.push_back({kids[0], 2, kids[1]});
      for (int c = 0; c < 2; ++c) {
        graph.push_back({root, 0, kids[c]});
        graph.push_back({grand[c][0], 2, grand[c][1]});
        for (int g = 0; g < 2; ++g) graph.push_back({kids[c], 0, grand[c][g]});
      }
      const std::size_t hold = rng.uniform_int(4);
      for (std::size_t g = 0; g < 4; ++g) {
        Triple t{root, 1, grand[g / 2][g % 2]};
        (g == hold ? held : graph).push_back(t);
      }
      EntityId partner = id("spouse");
      graph.push_back({root, 3, partner});
    }
  };
  PlantedDataset ds;
  Vocabulary train_ents, test_ents;
  std::vector<Triple> train_triples, test_triples;
  family("f", train_families, train_ents, train_triples, ds.valid);
  family("t", test_families, test_ents, test_triples, ds.test);
  ds.train = KnowledgeGraph(train_ents, rels, std::move(train_triples));
  ds.test_graph = KnowledgeGraph(test_ents, rels, std::move(test_triples));
  return ds;
}

std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(S2DN_FIXTURE_DIR) / name;
}

ModelConfig tiny_config(std::uint32_t k) {
  ModelConfig c;
  c.dim = 8;
  c.k = k;
  c.num_layers = 2;
  c.learning_rate = 0.01;
  c.batch_size = 4;
  c.lambda = 1e-4;
  c.epochs = 5;
  c.seed = 7;
  c.val_max_queries = 10;
  return c;
}

GradCheck finite_difference_check(const std::function<ad::Var()>& loss,
                                  const std::vector<Parameter>& params, double h) {
  for (auto p : params) p.zero_grad();
  ad::backward(loss());
  GradCheck out;
  for (auto p : params) {
    Matrix analytic = p.grad();
    Matrix numeric(analytic.rows(), analytic.cols());
    for (ad::Index i = 0; i < p.value().size(); ++i) {
      double& x = p.value().data()[i];
      const double saved = x;
      x = saved + h;
      double up = loss().scalar();
      x = saved - h;
      double down = loss().scalar();
      x = saved;
      numeric.data()[i] = (up - down) / (2.0 * h);
    }
    double scale = std::max(analytic.norm(), numeric.norm());
    double err = scale < 1e-9 ? 0.0 : (analytic - numeric).norm() / scale;
    if (err > out.max_rel_error || out.worst.empty()) {
      if (err >= out.max_rel_error) {
        out.max_rel_error = err;
        out.worst = p.name();
      }
    }
  }
  return out;
}

KnowledgeGraph five_node_graph() {
  return graph_from({{"a", "r0", "b"},
                     {"b", "r1", "c"},
                     {"a", "r2", "c"},
                     {"c", "r0", "d"},
                     {"d", "r1", "e"},
                     {"b", "r2", "d"},
                     {"e", "r0", "a"}});
}

std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("s2dn_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace s2dn::testing
