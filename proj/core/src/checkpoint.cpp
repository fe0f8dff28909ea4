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

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "s2dn/errors.hpp"

namespace s2dn {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<char, 8> kMagic{'S', '2', 'D', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint64_t kMaxHeader = 1ULL << 30;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw CheckpointError(std::string("truncated checkpoint while reading ") + what);
  }
  return v;
}

struct Header {
  ModelConfig config;
  std::size_t num_relations = 0;
  std::vector<std::string> relations;
  struct Tensor {
    std::string name;
    ad::Index rows = 0;
    ad::Index cols = 0;
  };
  std::vector<Tensor> tensors;
};

Header read_header(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size())) throw CheckpointError("truncated checkpoint magic");
  if (magic != kMagic) throw CheckpointError("not an S2DN checkpoint (bad magic)");
  auto version = read_pod<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) +
                          " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  auto len = read_pod<std::uint64_t>(in, "header length");
  if (len > kMaxHeader) throw CheckpointError("checkpoint header too large");
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) {
    throw CheckpointError("truncated checkpoint header");
  }
  Header h;
  try {
    Json j = Json::parse(text);
    h.config = model_config_from_json(j.at("config").dump());
    h.num_relations = j.at("num_relations").get<std::size_t>();
    h.relations = j.at("relations").get<std::vector<std::string>>();
    for (const auto& t : j.at("tensors")) {
      h.tensors.push_back({t.at("name").get<std::string>(), t.at("rows").get<ad::Index>(),
                           t.at("cols").get<ad::Index>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("invalid config in checkpoint: ") + e.what());
  }
  if (h.relations.size() != h.num_relations) {
    throw CheckpointError("checkpoint relation list disagrees with num_relations");
  }
  return h;
}

void read_tensors(S2DNModel& model, const Header& h, std::istream& in) {
  const auto& params = model.parameters().all();
  if (params.size() != h.tensors.size()) {
    throw CheckpointError("checkpoint holds " + std::to_string(h.tensors.size()) +
                          " tensors but the model has " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& t = h.tensors[i];
    Parameter p = params[i];
    if (t.name != p.name()) {
      throw CheckpointError("tensor " + std::to_string(i) + " is '" + t.name +
                            "', expected '" + p.name() + "'");
    }
    if (t.rows != p.value().rows() || t.cols != p.value().cols()) {
      throw CheckpointError("dimension mismatch for '" + t.name + "': checkpoint " +
                            std::to_string(t.rows) + "x" + std::to_string(t.cols) +
                            ", model " + std::to_string(p.value().rows()) + "x" +
                            std::to_string(p.value().cols()));
    }
  }
  // Stage everything so a failed load leaves the model untouched.
  std::vector<Matrix> staged;
  staged.reserve(params.size());
  for (const auto& p : params) {
    Matrix m(p.value().rows(), p.value().cols());
    auto bytes = static_cast<std::streamsize>(m.size() * sizeof(double));
    if (!in.read(reinterpret_cast<char*>(m.data()), bytes)) {
      throw CheckpointError("truncated checkpoint data in '" + p.name() + "'");
    }
    staged.push_back(std::move(m));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw CheckpointError("trailing bytes after checkpoint data");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter p = params[i];
    p.value() = std::move(staged[i]);
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return in;
}

}  // namespace

void save_checkpoint(const S2DNModel& model, const Vocabulary& relations, std::ostream& out) {
  if (relations.size() != model.num_relations()) {
    throw CheckpointError("relation vocabulary size differs from the model");
  }
  Json j;
  j["config"] = Json::parse(model_config_to_json(model.config()));
  j["num_relations"] = model.num_relations();
  j["relations"] = relations.names();
  Json tensors = Json::array();
  for (const auto& p : model.parameters().all()) {
    tensors.push_back({{"name", p.name()}, {"rows", p.value().rows()}, {"cols", p.value().cols()}});
  }
  j["tensors"] = std::move(tensors);
  const std::string header = j.dump();

  out.write(kMagic.data(), kMagic.size());
  write_pod<std::uint32_t>(out, kCheckpointVersion);
  write_pod<std::uint64_t>(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (const auto& p : model.parameters().all()) {
    out.write(reinterpret_cast<const char*>(p.value().data()),
              static_cast<std::streamsize>(p.value().size() * sizeof(double)));
  }
  if (!out) throw IoError("failed to write checkpoint");
}

void save_checkpoint(const S2DNModel& model, const Vocabulary& relations,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create checkpoint " + path.string());
  save_checkpoint(model, relations, out);
}

LoadedCheckpoint load_checkpoint(std::istream& in) {
  Header h = read_header(in);
  LoadedCheckpoint out{S2DNModel(h.config, h.num_relations), Vocabulary(h.relations)};
  read_tensors(out.model, h, in);
  return out;
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  auto in = open_in(path);
  return load_checkpoint(in);
}

void load_checkpoint_into(S2DNModel& model, std::istream& in) {
  Header h = read_header(in);
  if (h.num_relations != model.num_relations()) {
    throw CheckpointError("checkpoint has " + std::to_string(h.num_relations) +
                          " relations, model has " + std::to_string(model.num_relations()));
  }
  if (h.config.dim != model.config().dim) {
    throw CheckpointError("dimension mismatch: checkpoint dim=" + std::to_string(h.config.dim) +
                          ", model dim=" + std::to_string(model.config().dim));
  }
  read_tensors(model, h, in);
}

void load_checkpoint_into(S2DNModel& model, const std::filesystem::path& path) {
  auto in = open_in(path);
  load_checkpoint_into(model, in);
}

}  // namespace s2dn
