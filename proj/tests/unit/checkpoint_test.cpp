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

#include "s2dn/checkpoint.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

#include "s2dn/errors.hpp"
#include "support/fixtures.hpp"

namespace s2dn {
namespace {

class CheckpointTest : public ::testing::Test {
 protected:
  void SetUp() override {
    graph = testing::five_node_graph();
    for (const auto& t : graph.triples()) subs.push_back(extract_enclosing(graph, t, 2, true, 1));
  }
  std::string saved(const S2DNModel& m) {
    std::ostringstream out;
    save_checkpoint(m, graph.relations(), out);
    return out.str();
  }
  std::vector<double> scores(const S2DNModel& m) {
    std::vector<double> s;
    for (const auto& sub : subs) s.push_back(m.score(sub));
    return s;
  }
  KnowledgeGraph graph;
  std::vector<EnclosingSubgraph> subs;
};

TEST_F(CheckpointTest, RoundTripIsBitExact) {
  auto cfg = testing::tiny_config();
  cfg.estimator = Estimator::kMlp;
  S2DNModel model(cfg, graph.num_relations());
  // Move away from the seeded initialization so the load cannot pass by accident.
  DetRng rng(77);
  for (auto p : model.parameters().all()) {
    for (ad::Index i = 0; i < p.value().size(); ++i) p.value().data()[i] += rng.uniform01() - 0.5;
  }
  std::istringstream in(saved(model));
  auto loaded = load_checkpoint(in);
  EXPECT_EQ(loaded.model.config(), model.config());
  EXPECT_EQ(loaded.relations, graph.relations());
  auto a = scores(model);
  auto b = scores(loaded.model);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(std::memcmp(&a[i], &b[i], sizeof(double)), 0);
  }
}

TEST_F(CheckpointTest, PathRoundTripAndLoadInto) {
  S2DNModel model(testing::tiny_config(), graph.num_relations());
  model.classifier_out_bias().value()(0, 0) = 1.25;
  auto path = testing::temp_dir("ckpt") / "model.ckpt";
  save_checkpoint(model, graph.relations(), path);
  S2DNModel target(testing::tiny_config(), graph.num_relations());
  load_checkpoint_into(target, path);
  EXPECT_EQ(scores(target), scores(model));
  EXPECT_THROW(load_checkpoint(path.parent_path() / "missing.ckpt"), IoError);
}

TEST_F(CheckpointTest, TruncationIsAnError) {
  S2DNModel model(testing::tiny_config(), graph.num_relations());
  const std::string bytes = saved(model);
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{10}, std::size_t{19},
                          std::size_t{40}, bytes.size() / 2, bytes.size() - 1}) {
    std::istringstream in(bytes.substr(0, cut));
    EXPECT_THROW(load_checkpoint(in), CheckpointError) << cut;
  }
}

TEST_F(CheckpointTest, TrailingBytesAndBadMagic) {
  S2DNModel model(testing::tiny_config(), graph.num_relations());
  std::string bytes = saved(model);
  std::istringstream extra(bytes + "x");
  EXPECT_THROW(load_checkpoint(extra), CheckpointError);
  std::string bad = bytes;
  bad[0] = 'Z';
  std::istringstream in(bad);
  EXPECT_THROW(load_checkpoint(in), CheckpointError);
}

TEST_F(CheckpointTest, VersionMismatch) {
  S2DNModel model(testing::tiny_config(), graph.num_relations());
  std::string bytes = saved(model);
  ASSERT_EQ(bytes.substr(0, 8), "S2DNCKPT");
  bytes[8] = 2;  // little-endian u32 version
  std::istringstream in(bytes);
  try {
    load_checkpoint(in);
    FAIL();
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
}

TEST_F(CheckpointTest, DimensionMismatchLeavesModelUntouched) {
  auto big = testing::tiny_config();
  big.dim = 64;
  S2DNModel source(big, graph.num_relations());
  auto small = testing::tiny_config();
  small.dim = 32;
  S2DNModel target(small, graph.num_relations());
  auto before = scores(target);
  std::istringstream in(saved(source));
  try {
    load_checkpoint_into(target, in);
    FAIL();
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("dimension mismatch"), std::string::npos);
  }
  EXPECT_EQ(scores(target), before);
}

TEST_F(CheckpointTest, FailedLoadIntoIsAtomic) {
  S2DNModel source(testing::tiny_config(), graph.num_relations());
  source.classifier_out_bias().value()(0, 0) = 4.0;
  auto cfg = testing::tiny_config();
  cfg.seed = 99;
  S2DNModel target(cfg, graph.num_relations());
  auto before = scores(target);
  std::string bytes = saved(source);
  std::istringstream in(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(load_checkpoint_into(target, in), CheckpointError);
  EXPECT_EQ(scores(target), before);
}

}  // namespace
}  // namespace s2dn
