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

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "s2dn/checkpoint.hpp"
#include "s2dn/config.hpp"
#include "s2dn/errors.hpp"
#include "s2dn/eval.hpp"
#include "s2dn/kg_store.hpp"
#include "s2dn/model.hpp"
#include "s2dn/noise.hpp"
#include "s2dn/refining.hpp"
#include "s2dn/subgraph.hpp"
#include "s2dn/training.hpp"

namespace s2dn::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Keys of a run config that are not model hyperparameters.
struct RunConfig {
  std::string dataset;
  std::string train, valid, test, graph, out;
  std::optional<NoiseKind> noise_kind;
  double noise_ratio = 0.0;
  ModelConfig model;
};

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> k;
  std::string dataset;
  std::string noise_kind;
  std::optional<double> noise_ratio;
  std::string estimator;
  bool disable_smoothing = false;
  bool disable_refining = false;
  std::string out;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  return out;
}

RunConfig resolve(const Flags& f) {
  RunConfig rc;
  Json file = Json::object();
  if (!f.config.empty()) {
    try {
      file = Json::parse(read_file(f.config));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("malformed config ") + f.config + ": " + e.what());
    }
    if (!file.is_object()) throw ConfigError("config must be a JSON object");
  }
  auto take_string = [&](const char* key, std::string& dst) {
    if (!file.contains(key)) return;
    if (!file[key].is_string()) throw ConfigError(std::string("config key '") + key + "' must be a string");
    dst = file[key].get<std::string>();
    file.erase(key);
  };
  take_string("dataset", rc.dataset);
  take_string("train", rc.train);
  take_string("valid", rc.valid);
  take_string("test", rc.test);
  take_string("graph", rc.graph);
  take_string("out", rc.out);
  std::string kind;
  take_string("noise_kind", kind);
  if (!kind.empty()) rc.noise_kind = parse_noise_kind(kind);
  if (file.contains("noise_ratio")) {
    if (!file["noise_ratio"].is_number()) throw ConfigError("config key 'noise_ratio' must be a number");
    rc.noise_ratio = file["noise_ratio"].get<double>();
    file.erase("noise_ratio");
  }

  if (!f.dataset.empty()) rc.dataset = f.dataset;
  rc.model = model_config_from_json(file.dump(), defaults_for_dataset(rc.dataset));
  if (f.seed) rc.model.seed = *f.seed;
  if (f.k) rc.model.k = *f.k;
  if (!f.estimator.empty()) rc.model.estimator = parse_estimator(f.estimator);
  if (f.disable_smoothing) rc.model.disable_smoothing = true;
  if (f.disable_refining) rc.model.disable_refining = true;
  if (!f.noise_kind.empty()) rc.noise_kind = parse_noise_kind(f.noise_kind);
  if (f.noise_ratio) rc.noise_ratio = *f.noise_ratio;
  if (!f.out.empty()) rc.out = f.out;
  noise_count(rc.noise_ratio, 0);
  validate_config(rc.model);
  return rc;
}

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON run config");
  app->add_option("--seed", f.seed, "Global seed");
  app->add_option("--k", f.k, "Enclosing-subgraph radius");
  app->add_option("--dataset", f.dataset, "Default hyperparameters: WN18RR, FB15k-237, NELL-995");
  app->add_option("--noise-kind", f.noise_kind, "semantic or structural");
  app->add_option("--noise-ratio", f.noise_ratio, "Fraction of contaminated triples");
  app->add_option("--estimator", f.estimator, "attention, mlp, weighted-cosine or cosine");
  app->add_flag("--disable-smoothing", f.disable_smoothing, "Ablation without semantic smoothing");
  app->add_flag("--disable-refining", f.disable_refining, "Ablation without structure refining");
  app->add_option("--out", f.out, "Output path");
}

fs::path cache_dir() {
  if (const char* env = std::getenv("S2DN_CACHE_DIR"); env && *env) return env;
  return ".s2dn_cache";
}

std::vector<Triple> make_negatives(const KnowledgeGraph& graph, const Triple& pos,
                                   std::size_t count, DetRng& rng) {
  try {
    return sample_negatives(graph, pos, count, CorruptMode::kTail, rng);
  } catch (const SamplingExhaustedError&) {
  }
  return sample_negatives(graph, pos, count, CorruptMode::kHead, rng);
}

// Inference graph plus test triples sharing one entity vocabulary; the
// relation vocabulary is the model's.
struct EvalData {
  KnowledgeGraph graph;
  std::vector<Triple> test;
};

EvalData load_eval_data(const fs::path& graph_path, const fs::path& test_path,
                        const Vocabulary& relations) {
  auto graph_rows = read_tsv(graph_path);
  auto test_rows = read_tsv(test_path);
  Vocabulary entities;
  for (const auto& r : graph_rows) {
    entities.add(r.head);
    entities.add(r.tail);
  }
  for (const auto& r : test_rows) {
    entities.add(r.head);
    entities.add(r.tail);
  }
  EvalData d{build_graph(graph_rows, &entities, &relations), {}};
  d.test = build_graph(test_rows, &entities, &relations).triples();
  return d;
}

std::vector<double> parse_ratios(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("bad ratio '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty ratio list");
  return out;
}

std::vector<NoiseKind> parse_kinds(const std::string& text) {
  std::vector<NoiseKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_noise_kind(item));
  if (out.empty()) throw ConfigError("empty noise-kind list");
  return out;
}

// --- subcommands

int cmd_prepare(const Flags& f, const std::string& train_tsv, const std::string& checkpoint,
                unsigned threads, std::ostream& out) {
  RunConfig rc = resolve(f);
  std::string path = train_tsv.empty() ? rc.train : train_tsv;
  if (path.empty()) throw ConfigError("prepare needs a training TSV");
  auto rows = read_tsv(path);
  std::optional<Vocabulary> relations;
  if (!checkpoint.empty()) relations = load_checkpoint(fs::path(checkpoint)).relations;
  KnowledgeGraph graph = build_graph(rows, nullptr, relations ? &*relations : nullptr);

  const ModelConfig& m = rc.model;
  std::vector<ExtractionRequest> reqs;
  std::size_t positives = 0, negatives = 0;
  for (std::size_t i = 0; i < graph.triples().size(); ++i) {
    const Triple& t = graph.triples()[i];
    reqs.push_back({t, 1, true});
    ++positives;
    DetRng rng(derive_seed(m.seed, i));
    for (const auto& neg : make_negatives(graph, t, m.negatives_per_positive, rng)) {
      reqs.push_back({neg, 0, false});
      ++negatives;
    }
  }
  auto subs = extract_batch(graph, reqs, m.k, threads);

  fs::path dest = rc.out;
  if (dest.empty()) {
    dest = cache_dir() / (fs::path(path).stem().string() + ".k" + std::to_string(m.k) +
                          ".seed" + std::to_string(m.seed) + ".jsonl");
  }
  if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
  write_subgraph_cache(subs, dest);
  out << "prepared " << subs.size() << " subgraphs (" << positives << " positive, "
      << negatives << " negative) -> " << dest.string() << '\n';
  return kExitOk;
}

int cmd_train(const Flags& f, const std::string& train_tsv, const std::string& valid_tsv,
              std::ostream& out, std::ostream& err) {
  RunConfig rc = resolve(f);
  if (!train_tsv.empty()) rc.train = train_tsv;
  if (!valid_tsv.empty()) rc.valid = valid_tsv;
  if (rc.train.empty()) throw ConfigError("train needs a training TSV (positional or config key 'train')");
  if (rc.out.empty()) throw ConfigError("train needs --out <directory>");

  KnowledgeGraph graph = load_graph(rc.train);
  if (rc.noise_kind && rc.noise_ratio > 0.0) {
    graph = contaminate(graph, {*rc.noise_kind, rc.noise_ratio, rc.model.seed});
  }
  std::vector<Triple> valid;
  if (!rc.valid.empty()) {
    valid = build_graph(read_tsv(rc.valid), &graph.entities(), &graph.relations()).triples();
  }

  S2DNModel model(rc.model, graph.num_relations());
  TrainingHooks hooks;
  hooks.on_epoch = [&err](const EpochLog& e) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "epoch %zu loss %.6f val_mrr %.4f\n", e.epoch, e.loss, e.val_mrr);
    err << buf;
  };
  TrainingResult result = train(model, graph, valid, hooks);

  fs::path dir = rc.out;
  fs::create_directories(dir);
  save_checkpoint(model, graph.relations(), dir / "model.ckpt");
  {
    auto log = open_out(dir / "train_log.csv");
    write_training_log(result.log, log);
  }
  {
    auto cfg = open_out(dir / "config.json");
    cfg << model_config_to_json(rc.model) << '\n';
  }
  {
    auto rel = open_out(dir / "relations.tsv");
    write_vocabulary(graph.relations(), rel);
    auto ent = open_out(dir / "entities.tsv");
    write_vocabulary(graph.entities(), ent);
  }
  out << "trained " << result.log.size() << " epochs on " << graph.triples().size()
      << " triples -> " << (dir / "model.ckpt").string() << '\n';
  return kExitOk;
}

int cmd_eval(const Flags& f, const std::string& checkpoint, const std::string& test_tsv,
             const std::string& graph_tsv, std::size_t negatives, const std::string& direction,
             unsigned threads, std::ostream& out) {
  Flags no_model = f;
  no_model.config.clear();
  RunConfig rc = resolve(no_model);
  LoadedCheckpoint ck = load_checkpoint(fs::path(checkpoint));
  EvalData data = load_eval_data(graph_tsv.empty() ? test_tsv : graph_tsv, test_tsv, ck.relations);
  EvalOptions opt;
  opt.num_negatives = negatives;
  opt.direction = parse_direction(direction);
  opt.seed = f.seed ? *f.seed : ck.model.config().seed;
  opt.threads = threads;
  RankingReport report = evaluate_ranking(ck.model, data.graph, data.test, opt);
  if (!rc.out.empty()) {
    auto csv = open_out(rc.out);
    write_ranking_csv(report, csv);
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.4f %.4f %.4f\n", report.hits1, report.hits10, report.mrr);
  out << buf;
  return kExitOk;
}

int cmd_contaminate(const Flags& f, const std::string& train_tsv, std::ostream& out) {
  RunConfig rc = resolve(f);
  std::string path = train_tsv.empty() ? rc.train : train_tsv;
  if (path.empty()) throw ConfigError("contaminate needs a training TSV");
  if (!rc.noise_kind) throw ConfigError("contaminate needs --noise-kind");
  if (rc.out.empty()) throw ConfigError("contaminate needs --out <tsv>");
  KnowledgeGraph graph = load_graph(path);
  KnowledgeGraph noisy = contaminate(graph, {*rc.noise_kind, rc.noise_ratio, rc.model.seed});
  {
    auto tsv = open_out(rc.out);
    write_graph(noisy, tsv);
    if (!tsv) throw IoError("write failed for " + rc.out);
  }
  out << "wrote " << noisy.triples().size() << " triples (" << noise_kind_name(*rc.noise_kind)
      << ", ratio " << rc.noise_ratio << ") -> " << rc.out << '\n';
  return kExitOk;
}

int cmd_heatmap(const Flags& f, const std::string& checkpoint, const std::string& cache,
                std::ostream& out) {
  if (f.out.empty()) throw ConfigError("heatmap needs --out <json>");
  LoadedCheckpoint ck = load_checkpoint(fs::path(checkpoint));
  auto subs = read_subgraph_cache(cache);
  TransitionMatrix tm = transition_matrix(ck.model, subs);
  {
    auto json = open_out(f.out);
    write_transition_json(tm, ck.relations, json);
  }
  out << "transition matrix over " << subs.size() << " subgraphs -> " << f.out << '\n';
  return kExitOk;
}

int cmd_export(const Flags& f, const std::string& checkpoint, const std::string& cache,
               std::ostream& out) {
  if (f.out.empty()) throw ConfigError("export needs --out <jsonl>");
  LoadedCheckpoint ck = load_checkpoint(fs::path(checkpoint));
  auto subs = read_subgraph_cache(cache);
  auto jsonl = open_out(f.out);
  for (const auto& sub : subs) {
    jsonl << serialize_refined(sub, ck.model.refine_for_export(sub)) << '\n';
  }
  if (!jsonl) throw IoError("write failed for " + f.out);
  out << "exported " << subs.size() << " refined subgraphs -> " << f.out << '\n';
  return kExitOk;
}

int cmd_robustness(const Flags& f, const std::string& kinds_text, const std::string& ratios_text,
                   std::size_t negatives, unsigned threads, std::ostream& out,
                   std::ostream& err) {
  RunConfig rc = resolve(f);
  if (rc.train.empty() || rc.test.empty()) {
    throw ConfigError("robustness needs config keys 'train' and 'test'");
  }
  if (rc.out.empty()) throw ConfigError("robustness needs --out <csv>");
  auto kinds = parse_kinds(kinds_text);
  auto ratios = parse_ratios(ratios_text);

  KnowledgeGraph train_graph = load_graph(rc.train);
  std::vector<Triple> valid;
  if (!rc.valid.empty()) {
    valid = build_graph(read_tsv(rc.valid), &train_graph.entities(), &train_graph.relations())
                .triples();
  }
  EvalData data = load_eval_data(rc.graph.empty() ? rc.train : rc.graph, rc.test,
                                 train_graph.relations());

  auto run = [&](const NoiseSpec& spec) {
    KnowledgeGraph g = spec.ratio > 0.0 ? contaminate(train_graph, spec) : train_graph;
    S2DNModel model(rc.model, train_graph.num_relations());
    train(model, g, valid);
    EvalOptions opt;
    opt.num_negatives = negatives;
    opt.seed = rc.model.seed;
    opt.threads = threads;
    double h10 = evaluate_ranking(model, data.graph, data.test, opt).hits10;
    err << noise_kind_name(spec.kind) << " " << spec.ratio << " hits@10 " << h10 << '\n';
    return h10;
  };
  auto rows = robustness_suite(kinds, ratios, rc.model.seed, run);
  {
    auto csv = open_out(rc.out);
    write_robustness_csv(rows, csv);
  }
  write_robustness_csv(rows, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"S2DN: inductive knowledge graph completion with denoised subgraphs", "s2dn"};
  app.require_subcommand(1);

  Flags f;
  std::string pos_a, pos_b, valid, graph, checkpoint, direction = "both";
  std::string kinds = "semantic,structural", ratios = "0,0.15,0.35,0.5";
  std::size_t negatives = 50;
  unsigned threads = 1;

  auto* prepare = app.add_subcommand("prepare", "Extract the subgraph cache for a training TSV");
  add_common(prepare, f);
  prepare->add_option("train", pos_a, "Training TSV");
  prepare->add_option("--checkpoint", checkpoint, "Take the relation vocabulary from a checkpoint");
  prepare->add_option("--threads", threads, "Extraction threads (0 = all cores)");

  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint directory");
  add_common(train_cmd, f);
  train_cmd->add_option("train", pos_a, "Training TSV");
  train_cmd->add_option("--valid", valid, "Validation TSV");

  auto* eval = app.add_subcommand("eval", "Filtered ranking of test triples");
  add_common(eval, f);
  eval->add_option("checkpoint", pos_a, "Checkpoint file")->required();
  eval->add_option("test", pos_b, "Test TSV")->required();
  eval->add_option("--graph", graph, "Inference graph TSV (defaults to the test file)");
  eval->add_option("--negatives", negatives, "Negatives per query and direction");
  eval->add_option("--direction", direction, "tail, head or both");
  eval->add_option("--threads", threads, "Scoring threads (0 = all cores)");

  auto* contaminate_cmd = app.add_subcommand("contaminate", "Inject semantic or structural noise");
  add_common(contaminate_cmd, f);
  contaminate_cmd->add_option("train", pos_a, "Training TSV");

  auto* heatmap = app.add_subcommand("heatmap", "Relation transition matrix as JSON");
  add_common(heatmap, f);
  heatmap->add_option("checkpoint", pos_a, "Checkpoint file")->required();
  heatmap->add_option("cache", pos_b, "Subgraph cache JSONL")->required();

  auto* export_cmd = app.add_subcommand("export", "Refined subgraphs with edge weights as JSONL");
  add_common(export_cmd, f);
  export_cmd->add_option("checkpoint", pos_a, "Checkpoint file")->required();
  export_cmd->add_option("cache", pos_b, "Subgraph cache JSONL")->required();

  auto* robust = app.add_subcommand("robustness", "Hits@10 under increasing noise");
  add_common(robust, f);
  robust->add_option("--kinds", kinds, "Comma-separated noise kinds");
  robust->add_option("--ratios", ratios, "Comma-separated noise ratios");
  robust->add_option("--negatives", negatives, "Negatives per query and direction");
  robust->add_option("--threads", threads, "Scoring threads (0 = all cores)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::Error& e) {
    std::string msg = e.what();
    err << "error: " << msg << '\n';
    return kExitConfig;
  }

  try {
    if (prepare->parsed()) return cmd_prepare(f, pos_a, checkpoint, threads, out);
    if (train_cmd->parsed()) return cmd_train(f, pos_a, valid, out, err);
    if (eval->parsed()) {
      return cmd_eval(f, pos_a, pos_b, graph, negatives, direction, threads, out);
    }
    if (contaminate_cmd->parsed()) return cmd_contaminate(f, pos_a, out);
    if (heatmap->parsed()) return cmd_heatmap(f, pos_a, pos_b, out);
    if (export_cmd->parsed()) return cmd_export(f, pos_a, pos_b, out);
    if (robust->parsed()) return cmd_robustness(f, kinds, ratios, negatives, threads, out, err);
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const s2dn::ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace s2dn::cli
