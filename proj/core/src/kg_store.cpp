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

#include "s2dn/kg_store.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>

#include "s2dn/errors.hpp"

namespace s2dn {

Vocabulary::Vocabulary(std::vector<std::string> names) {
  for (auto& n : names) add(n);
}

std::uint32_t Vocabulary::add(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

KnowledgeGraph::KnowledgeGraph(Vocabulary entities, Vocabulary relations,
                               std::vector<Triple> triples)
    : entities_(std::move(entities)),
      relations_(std::move(relations)),
      triples_(std::move(triples)) {
  const std::size_t n = entities_.size();
  std::vector<std::size_t> degree(n, 0);
  for (const auto& t : triples_) {
    if (t.head >= n || t.tail >= n || t.rel >= relations_.size()) {
      throw ArgumentError("triple (" + std::to_string(t.head) + "," +
                          std::to_string(t.rel) + "," +
                          std::to_string(t.tail) +
                          ") references an id outside the vocabulary");
    }
    ++degree[t.head];
    ++degree[t.tail];
    triple_set_.insert(t);
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t e = 0; e < n; ++e) offsets_[e + 1] = offsets_[e] + degree[e];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& t : triples_) {
    adjacency_[cursor[t.head]++] = {t.tail, t.rel, EdgeDirection::kOut};
    adjacency_[cursor[t.tail]++] = {t.head, t.rel, EdgeDirection::kIn};
  }
  for (std::size_t e = 0; e < n; ++e) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[e]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[e + 1]));
  }
}

std::vector<NamedTriple> read_tsv(std::istream& in) {
  std::vector<NamedTriple> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto first = line.find('\t');
    auto second =
        first == std::string::npos ? std::string::npos : line.find('\t', first + 1);
    if (second == std::string::npos ||
        line.find('\t', second + 1) != std::string::npos) {
      throw ParseError(line_no, "expected 3 tab-separated fields");
    }
    NamedTriple row{line.substr(0, first),
                    line.substr(first + 1, second - first - 1),
                    line.substr(second + 1)};
    if (row.head.empty() || row.rel.empty() || row.tail.empty()) {
      throw ParseError(line_no, "empty field");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<NamedTriple> read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_tsv(in);
}

namespace {

std::uint32_t resolve(Vocabulary& vocab, bool strict, const std::string& name,
                      std::size_t line, const char* kind) {
  if (strict) {
    auto id = vocab.find(name);
    if (!id) {
      throw VocabularyError("row " + std::to_string(line) + ": unknown " +
                            kind + " '" + name + "'");
    }
    return *id;
  }
  return vocab.add(name);
}

}  // namespace

KnowledgeGraph build_graph(std::span<const NamedTriple> rows,
                           const Vocabulary* entity_vocab,
                           const Vocabulary* relation_vocab) {
  Vocabulary entities = entity_vocab ? *entity_vocab : Vocabulary{};
  Vocabulary relations = relation_vocab ? *relation_vocab : Vocabulary{};
  std::vector<Triple> triples;
  triples.reserve(rows.size());
  std::size_t line = 0;
  for (const auto& row : rows) {
    ++line;
    Triple t;
    t.head = resolve(entities, entity_vocab != nullptr, row.head, line, "entity");
    t.rel = resolve(relations, relation_vocab != nullptr, row.rel, line,
                    "relation");
    t.tail = resolve(entities, entity_vocab != nullptr, row.tail, line, "entity");
    triples.push_back(t);
  }
  return KnowledgeGraph(std::move(entities), std::move(relations),
                        std::move(triples));
}

KnowledgeGraph load_graph(const std::filesystem::path& path,
                          const Vocabulary* entity_vocab,
                          const Vocabulary* relation_vocab) {
  auto rows = read_tsv(path);
  return build_graph(rows, entity_vocab, relation_vocab);
}

void write_graph(const KnowledgeGraph& graph, std::ostream& out) {
  const auto& ents = graph.entities();
  const auto& rels = graph.relations();
  for (const auto& t : graph.triples()) {
    out << ents.name(t.head) << '\t' << rels.name(t.rel) << '\t'
        << ents.name(t.tail) << '\n';
  }
}

void save_graph(const KnowledgeGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_graph(graph, out);
  if (!out) throw IoError("write failed for " + path.string());
}

void write_vocabulary(const Vocabulary& vocab, std::ostream& out) {
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    out << vocab.name(i) << '\t' << i << '\n';
  }
}

SplitReport check_inductive_split(const KnowledgeGraph& train,
                                  const KnowledgeGraph& test) {
  SplitReport report;
  for (const auto& name : test.entities().names()) {
    if (train.entities().find(name)) report.overlapping_entities.push_back(name);
  }
  for (const auto& name : test.relations().names()) {
    if (!train.relations().find(name)) {
      report.unseen_test_relations.push_back(name);
    }
  }
  report.disjoint = report.overlapping_entities.empty();
  return report;
}

std::vector<Triple> sample_negatives(const KnowledgeGraph& graph,
                                     const Triple& triple, std::size_t n,
                                     CorruptMode mode, DetRng& rng) {
  const EntityId anchor = mode == CorruptMode::kTail ? triple.head : triple.tail;
  const EntityId answer = mode == CorruptMode::kTail ? triple.tail : triple.head;
  const EdgeDirection wanted =
      mode == CorruptMode::kTail ? EdgeDirection::kOut : EdgeDirection::kIn;

  // Known completions of the anchor under this relation are filtered.
  std::unordered_set<EntityId> known{answer};
  if (anchor < graph.num_entities()) {
    for (const auto& nb : graph.neighbors(anchor)) {
      if (nb.rel == triple.rel && nb.direction == wanted) known.insert(nb.neighbor);
    }
  }

  std::vector<EntityId> pool;
  pool.reserve(graph.num_entities());
  for (EntityId e = 0; e < graph.num_entities(); ++e) {
    if (!known.contains(e)) pool.push_back(e);
  }
  if (pool.size() < n) {
    throw SamplingExhaustedError(
        "only " + std::to_string(pool.size()) + " filtered candidates for (" +
        std::to_string(triple.head) + "," + std::to_string(triple.rel) + "," +
        std::to_string(triple.tail) + "), need " + std::to_string(n));
  }

  // Partial Fisher-Yates over the ascending candidate pool.
  std::vector<Triple> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto j = i + static_cast<std::size_t>(rng.uniform_int(pool.size() - i));
    std::swap(pool[i], pool[j]);
    Triple neg = triple;
    (mode == CorruptMode::kTail ? neg.tail : neg.head) = pool[i];
    out.push_back(neg);
  }
  return out;
}

}  // namespace s2dn
