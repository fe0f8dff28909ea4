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

#include <algorithm>
#include <cctype>
#include <string>

#include "json.hpp"
#include "s2dn/errors.hpp"

namespace s2dn {

namespace {

using Json = nlohmann::ordered_json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

template <typename T>
T get_as(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

std::size_t get_count(const Json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError("config key '" + key + "' must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

void validate_config(const ModelConfig& c) {
  if (c.dim == 0) throw ConfigError("dim must be positive");
  if (c.k == 0) throw ConfigError("k must be positive");
  if (c.num_layers == 0) throw ConfigError("num_layers must be positive");
  if (!(c.tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(c.concrete_temperature > 0.0)) throw ConfigError("concrete_temperature must be positive");
  if (!(c.prune_threshold > 0.0 && c.prune_threshold < 1.0)) {
    throw ConfigError("prune_threshold must lie in (0,1)");
  }
  if (!(c.lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (c.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (c.disable_smoothing && c.disable_refining) {
    throw ConfigError("disable_smoothing and disable_refining cannot both be set");
  }
}

ModelConfig defaults_for_dataset(std::string_view dataset) {
  std::string name = lower(dataset);
  if (auto pos = name.find("_v"); pos != std::string::npos) name.resize(pos);
  if (auto pos = name.find("_ind"); pos != std::string::npos) name.resize(pos);
  ModelConfig c;
  if (name.empty() || name == "wn18rr") {
    c.k = 4;
    c.learning_rate = 0.1;
    c.batch_size = 8;
    c.lambda = 0.5;
  } else if (name == "fb15k-237" || name == "fb15k237") {
    c.k = 3;
    c.learning_rate = 0.0005;
    c.batch_size = 32;
    c.lambda = 0.1;
  } else if (name == "nell-995" || name == "nell995" || name == "nell") {
    c.k = 2;
    c.learning_rate = 0.001;
    c.batch_size = 8;
    c.lambda = 0.5;
  } else {
    throw ConfigError("unknown dataset '" + std::string(dataset) +
                      "' (expected WN18RR, FB15k-237 or NELL-995)");
  }
  return c;
}

std::string model_config_to_json(const ModelConfig& c) {
  Json j;
  j["dim"] = c.dim;
  j["k"] = c.k;
  j["num_layers"] = c.num_layers;
  j["tau"] = c.tau;
  j["concrete_temperature"] = c.concrete_temperature;
  j["prune_threshold"] = c.prune_threshold;
  j["lambda"] = c.lambda;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["seed"] = c.seed;
  j["disable_smoothing"] = c.disable_smoothing;
  j["disable_refining"] = c.disable_refining;
  j["estimator"] = std::string(estimator_name(c.estimator));
  j["candidate_policy"] = std::string(candidate_policy_name(c.candidate_policy));
  j["all_pairs_max_nodes"] = c.all_pairs_max_nodes;
  j["phi"] = std::string(aggregation_name(c.phi));
  j["hard_smoothing"] = c.hard_smoothing;
  j["skip_outer_softmax"] = c.skip_outer_softmax;
  j["use_query_relation"] = c.use_query_relation;
  j["negatives_per_positive"] = c.negatives_per_positive;
  j["val_max_queries"] = c.val_max_queries;
  return j.dump(2);
}

ModelConfig model_config_from_json(std::string_view text, const ModelConfig& base) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ModelConfig c = base;
  for (const auto& [key, v] : j.items()) {
    if (key == "dim") c.dim = get_count(v, key);
    else if (key == "k") c.k = static_cast<std::uint32_t>(get_count(v, key));
    else if (key == "num_layers") c.num_layers = get_count(v, key);
    else if (key == "tau") c.tau = get_as<double>(v, key);
    else if (key == "concrete_temperature") c.concrete_temperature = get_as<double>(v, key);
    else if (key == "prune_threshold") c.prune_threshold = get_as<double>(v, key);
    else if (key == "lambda") c.lambda = get_as<double>(v, key);
    else if (key == "learning_rate") c.learning_rate = get_as<double>(v, key);
    else if (key == "batch_size") c.batch_size = get_count(v, key);
    else if (key == "epochs") c.epochs = get_count(v, key);
    else if (key == "seed") c.seed = get_count(v, key);
    else if (key == "disable_smoothing") c.disable_smoothing = get_as<bool>(v, key);
    else if (key == "disable_refining") c.disable_refining = get_as<bool>(v, key);
    else if (key == "estimator") c.estimator = parse_estimator(get_as<std::string>(v, key));
    else if (key == "candidate_policy") {
      c.candidate_policy = parse_candidate_policy(get_as<std::string>(v, key));
    } else if (key == "all_pairs_max_nodes") c.all_pairs_max_nodes = get_count(v, key);
    else if (key == "phi") c.phi = parse_aggregation(get_as<std::string>(v, key));
    else if (key == "hard_smoothing") c.hard_smoothing = get_as<bool>(v, key);
    else if (key == "skip_outer_softmax") c.skip_outer_softmax = get_as<bool>(v, key);
    else if (key == "use_query_relation") c.use_query_relation = get_as<bool>(v, key);
    else if (key == "negatives_per_positive") c.negatives_per_positive = get_count(v, key);
    else if (key == "val_max_queries") c.val_max_queries = get_count(v, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  validate_config(c);
  return c;
}

}  // namespace s2dn
