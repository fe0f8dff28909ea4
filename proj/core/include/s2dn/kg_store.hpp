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

#ifndef S2DN_KG_STORE_HPP_
#define S2DN_KG_STORE_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "s2dn/rng.hpp"

namespace s2dn {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triple {
  EntityId head = 0;
  RelationId rel = 0;
  EntityId tail = 0;

  auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = (static_cast<std::uint64_t>(t.head) << 32) ^ t.tail;
    h ^= static_cast<std::uint64_t>(t.rel) * 0x9E3779B97F4A7C15ULL;
    h ^= h >> 29;
    return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ULL);
  }
};

using TripleSet = std::unordered_set<Triple, TripleHash>;

enum class EdgeDirection : std::uint8_t {
  kOut = 0,  // the indexed entity is the head
  kIn = 1,   // the indexed entity is the tail
};

struct Neighbor {
  EntityId neighbor = 0;
  RelationId rel = 0;
  EdgeDirection direction = EdgeDirection::kOut;

  auto operator<=>(const Neighbor&) const = default;
};

// Dense name <-> id mapping; ids are assigned in insertion order.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> names);

  // Returns the existing id or appends the name.
  std::uint32_t add(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const Vocabulary& other) const {
    return names_ == other.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

// Immutable triple store with CSR adjacency and a membership index.
// Inverse relations are never materialized: each triple appears once in
// the adjacency of its head (kOut) and once in that of its tail (kIn).
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  // Throws ArgumentError if any id is out of vocabulary range.
  KnowledgeGraph(Vocabulary entities, Vocabulary relations,
                 std::vector<Triple> triples);

  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  const Vocabulary& entities() const { return entities_; }
  const Vocabulary& relations() const { return relations_; }

  // File order, duplicates retained.
  const std::vector<Triple>& triples() const { return triples_; }
  // Deduplicated membership index.
  const TripleSet& triple_set() const { return triple_set_; }
  bool contains(const Triple& t) const { return triple_set_.contains(t); }

  // Sorted by (neighbor, rel, direction).
  std::span<const Neighbor> neighbors(EntityId e) const {
    return {adjacency_.data() + offsets_[e], offsets_[e + 1] - offsets_[e]};
  }

 private:
  Vocabulary entities_;
  Vocabulary relations_;
  std::vector<Triple> triples_;
  TripleSet triple_set_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
};

// One parsed `head<TAB>relation<TAB>tail` row.
struct NamedTriple {
  std::string head;
  std::string rel;
  std::string tail;
};

std::vector<NamedTriple> read_tsv(std::istream& in);
std::vector<NamedTriple> read_tsv(const std::filesystem::path& path);

// Resolves names into ids. A vocabulary passed as `nullptr` is grown in
// first-appearance order; a supplied one is strict and unknown names raise
// VocabularyError.
KnowledgeGraph build_graph(std::span<const NamedTriple> rows,
                           const Vocabulary* entity_vocab,
                           const Vocabulary* relation_vocab);

KnowledgeGraph load_graph(const std::filesystem::path& path,
                          const Vocabulary* entity_vocab = nullptr,
                          const Vocabulary* relation_vocab = nullptr);

// Writes the triple list back as TSV with names resolved.
void write_graph(const KnowledgeGraph& graph, std::ostream& out);
void save_graph(const KnowledgeGraph& graph, const std::filesystem::path& path);

// Two-column `name<TAB>id` export.
void write_vocabulary(const Vocabulary& vocab, std::ostream& out);

struct SplitReport {
  bool disjoint = true;
  std::vector<std::string> overlapping_entities;
  std::vector<std::string> unseen_test_relations;
};

SplitReport check_inductive_split(const KnowledgeGraph& train,
                                  const KnowledgeGraph& test);

enum class CorruptMode { kTail, kHead };

// Draws `n` distinct filtered corruptions of `triple` from the graph's
// entity pool. Throws SamplingExhaustedError if fewer than `n` survive the
// filter.
std::vector<Triple> sample_negatives(const KnowledgeGraph& graph,
                                     const Triple& triple, std::size_t n,
                                     CorruptMode mode, DetRng& rng);

}  // namespace s2dn

#endif  // S2DN_KG_STORE_HPP_
