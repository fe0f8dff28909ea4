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

#ifndef S2DN_CONFIG_HPP_
#define S2DN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "s2dn/refining.hpp"
#include "s2dn/smoothing.hpp"

namespace s2dn {

// Every knob of the model and its training loop. Defaults are the WN18RR
// column of the reference hyperparameter table.
struct ModelConfig {
  std::size_t dim = 64;
  std::uint32_t k = 4;
  std::size_t num_layers = 3;
  double tau = 1.0;
  double concrete_temperature = 0.5;
  double prune_threshold = 0.5;
  double lambda = 0.5;
  double learning_rate = 0.1;
  std::size_t batch_size = 8;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  bool disable_smoothing = false;
  bool disable_refining = false;
  Estimator estimator = Estimator::kAttention;
  CandidatePolicy candidate_policy = CandidatePolicy::kAuto;
  std::size_t all_pairs_max_nodes = 64;
  Aggregation phi = Aggregation::kSum;
  bool hard_smoothing = true;
  bool skip_outer_softmax = false;
  bool use_query_relation = true;
  std::size_t negatives_per_positive = 1;
  std::size_t val_max_queries = 50;

  bool operator==(const ModelConfig&) const = default;
};

// Throws ConfigError on any out-of-range value or invalid combination.
void validate_config(const ModelConfig& config);

// Reference values for WN18RR, FB15k-237 and NELL-995 (case-insensitive,
// "_v1".."_v4" suffixes and the default "" accepted).
ModelConfig defaults_for_dataset(std::string_view dataset);

std::string model_config_to_json(const ModelConfig& config);
// Keys missing from `json` keep the values of `base`; unknown keys raise
// ConfigError naming the key.
ModelConfig model_config_from_json(std::string_view json, const ModelConfig& base = {});

}  // namespace s2dn

#endif  // S2DN_CONFIG_HPP_
