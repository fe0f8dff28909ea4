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

#include "s2dn/config.hpp"

#include <gtest/gtest.h>

#include "s2dn/errors.hpp"

namespace s2dn {
namespace {

TEST(ConfigTest, DefaultsMatchTheWordNetSetup) {
  ModelConfig c;
  EXPECT_EQ(c.dim, 64u);
  EXPECT_EQ(c.k, 4u);
  EXPECT_DOUBLE_EQ(c.learning_rate, 0.1);
  EXPECT_EQ(c.batch_size, 8u);
  EXPECT_DOUBLE_EQ(c.lambda, 0.5);
  EXPECT_EQ(c.estimator, Estimator::kAttention);
  EXPECT_EQ(defaults_for_dataset("WN18RR_v1"), c);
  EXPECT_EQ(defaults_for_dataset(""), c);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(ConfigTest, PerDatasetDefaults) {
  auto fb = defaults_for_dataset("fb15k-237_v2_ind");
  EXPECT_EQ(fb.k, 3u);
  EXPECT_DOUBLE_EQ(fb.learning_rate, 0.0005);
  EXPECT_EQ(fb.batch_size, 32u);
  EXPECT_DOUBLE_EQ(fb.lambda, 0.1);
  auto nell = defaults_for_dataset("NELL-995_v3");
  EXPECT_EQ(nell.k, 2u);
  EXPECT_DOUBLE_EQ(nell.learning_rate, 0.001);
  EXPECT_THROW(defaults_for_dataset("yago"), ConfigError);
}

TEST(ConfigTest, JsonRoundTrip) {
  ModelConfig c;
  c.dim = 12;
  c.k = 2;
  c.tau = 0.3;
  c.estimator = Estimator::kWeightedCosine;
  c.candidate_policy = CandidatePolicy::kObservedEdges;
  c.phi = Aggregation::kProduct;
  c.disable_refining = true;
  c.seed = 123456789012345ULL;
  c.use_query_relation = false;
  EXPECT_EQ(model_config_from_json(model_config_to_json(c)), c);
}

TEST(ConfigTest, PartialJsonOverridesBase) {
  ModelConfig base = defaults_for_dataset("nell");
  auto c = model_config_from_json(R"({"dim": 16, "estimator": "mlp"})", base);
  EXPECT_EQ(c.dim, 16u);
  EXPECT_EQ(c.estimator, Estimator::kMlp);
  EXPECT_EQ(c.k, base.k);
}

TEST(ConfigTest, UnknownKeyIsNamed) {
  try {
    model_config_from_json(R"({"dim": 8, "learning_rat": 0.1})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'learning_rat'"), std::string::npos);
  }
}

TEST(ConfigTest, RejectsBadValues) {
  EXPECT_THROW(model_config_from_json(R"({"dim": -1})"), ConfigError);
  EXPECT_THROW(model_config_from_json(R"({"dim": 1.5})"), ConfigError);
  EXPECT_THROW(model_config_from_json(R"({"tau": "hot"})"), ConfigError);
  EXPECT_THROW(model_config_from_json(R"({"estimator": "dot"})"), ConfigError);
  EXPECT_THROW(model_config_from_json(R"({"prune_threshold": 1.0})"), ConfigError);
  EXPECT_THROW(model_config_from_json("[1,2]"), ConfigError);
  EXPECT_THROW(model_config_from_json("{"), ConfigError);
}

TEST(ConfigTest, BothAblationsRejected) {
  ModelConfig c;
  c.disable_smoothing = true;
  c.disable_refining = true;
  EXPECT_THROW(validate_config(c), ConfigError);
  c.disable_refining = false;
  EXPECT_NO_THROW(validate_config(c));
}

}  // namespace
}  // namespace s2dn
