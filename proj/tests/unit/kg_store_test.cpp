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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "s2dn/errors.hpp"
#include "support/fixtures.hpp"

namespace s2dn {
namespace {

using testing::graph_from;

TEST(KgStoreTest, FirstAppearanceIndexing) {
  std::istringstream in("a\tr\tb\n");
  auto g = build_graph(read_tsv(in), nullptr, nullptr);
  EXPECT_EQ(g.num_entities(), 2u);
  EXPECT_EQ(g.num_relations(), 1u);
  ASSERT_EQ(g.triples().size(), 1u);
  EXPECT_EQ(g.triples()[0], (Triple{0, 0, 1}));
}

TEST(KgStoreTest, ArityViolationNamesLine) {
  std::istringstream in("a\tr\tb\na\tr\n");
  try {
    read_tsv(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream first("a\tr\n");
  EXPECT_THROW(read_tsv(first), ParseError);
  std::istringstream extra("a\tr\tb\tc\n");
  EXPECT_THROW(read_tsv(extra), ParseError);
  std::istringstream empty_field("a\t\tb\n");
  EXPECT_THROW(read_tsv(empty_field), ParseError);
}

TEST(KgStoreTest, CarriageReturnsAndBlankLinesTolerated) {
  std::istringstream in("a\tr\tb\r\n\nb\tr\tc\n");
  auto rows = read_tsv(in);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].tail, "b");
}

TEST(KgStoreTest, StrictVocabularyRejectsUnknownNames) {
  auto g = graph_from({{"a", "r", "b"}});
  std::vector<NamedTriple> rows{{"a", "r", "zzz"}};
  EXPECT_THROW(build_graph(rows, &g.entities(), &g.relations()), VocabularyError);
  std::vector<NamedTriple> rel_rows{{"a", "q", "b"}};
  EXPECT_THROW(build_graph(rel_rows, &g.entities(), &g.relations()), VocabularyError);
}

TEST(KgStoreTest, MissingFileIsIoError) {
  EXPECT_THROW(load_graph("/nonexistent/path/train.txt"), IoError);
}

TEST(KgStoreTest, DuplicatesKeptInListCountedOnceInSet) {
  auto g = graph_from({{"a", "r", "b"}, {"a", "r", "b"}, {"b", "r", "a"}});
  EXPECT_EQ(g.triples().size(), 3u);
  EXPECT_EQ(g.triple_set().size(), 2u);
}

TEST(KgStoreTest, AdjacencyIsCompleteAndSorted) {
  DetRng rng(5);
  auto g = testing::random_graph(rng, 20, 3, 0.2);
  for (const auto& t : g.triples()) {
    auto out = g.neighbors(t.head);
    auto in = g.neighbors(t.tail);
    EXPECT_TRUE(std::find(out.begin(), out.end(), Neighbor{t.tail, t.rel, EdgeDirection::kOut}) !=
                out.end());
    EXPECT_TRUE(std::find(in.begin(), in.end(), Neighbor{t.head, t.rel, EdgeDirection::kIn}) !=
                in.end());
  }
  std::size_t total = 0;
  for (EntityId e = 0; e < g.num_entities(); ++e) {
    auto nb = g.neighbors(e);
    EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    total += nb.size();
  }
  EXPECT_EQ(total, 2 * g.triples().size());
}

TEST(KgStoreTest, RejectsOutOfRangeIds) {
  EXPECT_THROW(KnowledgeGraph(Vocabulary({"a"}), Vocabulary({"r"}), {{0, 0, 1}}), ArgumentError);
  EXPECT_THROW(KnowledgeGraph(Vocabulary({"a", "b"}), Vocabulary({"r"}), {{0, 1, 1}}),
               ArgumentError);
}

TEST(KgStoreTest, RoundTripThroughTsv) {
  auto g = graph_from({{"x", "p", "y"}, {"y", "q", "z"}, {"x", "p", "y"}});
  std::ostringstream out;
  write_graph(g, out);
  EXPECT_EQ(out.str(), "x\tp\ty\ny\tq\tz\nx\tp\ty\n");
  std::istringstream in(out.str());
  auto g2 = build_graph(read_tsv(in), nullptr, nullptr);
  EXPECT_EQ(g2.triples(), g.triples());
  EXPECT_EQ(g2.entities(), g.entities());
}

TEST(KgStoreTest, VocabularyExport) {
  auto g = graph_from({{"x", "p", "y"}});
  std::ostringstream out;
  write_vocabulary(g.entities(), out);
  EXPECT_EQ(out.str(), "x\t0\ny\t1\n");
}

TEST(KgStoreTest, InductiveSplitReport) {
  auto train = graph_from({{"a", "r", "b"}, {"b", "s", "c"}});
  auto same = check_inductive_split(train, train);
  EXPECT_FALSE(same.disjoint);
  EXPECT_EQ(same.overlapping_entities.size(), 3u);

  auto test = graph_from({{"x", "r", "y"}, {"y", "novel", "z"}});
  auto rep = check_inductive_split(train, test);
  EXPECT_TRUE(rep.disjoint);
  ASSERT_EQ(rep.unseen_test_relations.size(), 1u);
  EXPECT_EQ(rep.unseen_test_relations[0], "novel");
}

TEST(KgStoreTest, FilteredTailCorruptionHandExample) {
  // Entities 0..3; (0,0,1) is the positive and (0,0,2) is filtered.
  KnowledgeGraph g(Vocabulary({"e0", "e1", "e2", "e3"}), Vocabulary({"r"}),
                   {{0, 0, 1}, {0, 0, 2}});
  DetRng rng(1);
  auto negs = sample_negatives(g, {0, 0, 1}, 2, CorruptMode::kTail, rng);
  std::set<Triple> got(negs.begin(), negs.end());
  EXPECT_EQ(got, (std::set<Triple>{{0, 0, 0}, {0, 0, 3}}));
  DetRng rng2(1);
  EXPECT_THROW(sample_negatives(g, {0, 0, 1}, 3, CorruptMode::kTail, rng2),
               SamplingExhaustedError);
}

TEST(KgStoreTest, NegativesAreFilteredDistinctAndDeterministic) {
  DetRng gen(9);
  auto g = testing::random_graph(gen, 40, 3, 0.15);
  for (std::size_t i = 0; i < 20 && i < g.triples().size(); ++i) {
    const Triple& t = g.triples()[i];
    for (auto mode : {CorruptMode::kTail, CorruptMode::kHead}) {
      DetRng a(i), b(i);
      auto negs = sample_negatives(g, t, 10, mode, a);
      EXPECT_EQ(negs, sample_negatives(g, t, 10, mode, b));
      std::set<Triple> uniq(negs.begin(), negs.end());
      EXPECT_EQ(uniq.size(), 10u);
      for (const auto& n : negs) {
        EXPECT_FALSE(g.contains(n));
        EXPECT_EQ(n.rel, t.rel);
        if (mode == CorruptMode::kTail) EXPECT_EQ(n.head, t.head);
        else EXPECT_EQ(n.tail, t.tail);
      }
    }
  }
}

}  // namespace
}  // namespace s2dn
