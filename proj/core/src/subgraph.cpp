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

#include "s2dn/subgraph.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "s2dn/errors.hpp"

namespace s2dn {

namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// Scratch distance buffer reused across BFS calls on the same thread.
struct BfsScratch {
  std::vector<std::uint32_t> dist;
  std::vector<EntityId> touched;

  void reset(std::size_t n) {
    if (dist.size() < n) dist.assign(n, kUnreached);
    for (auto e : touched) dist[e] = kUnreached;
    touched.clear();
  }
};

thread_local BfsScratch tls_scratch;

void bfs_global(const KnowledgeGraph& graph, EntityId source, std::uint32_t k,
                BfsScratch& s) {
  s.reset(graph.num_entities());
  s.dist[source] = 0;
  s.touched.push_back(source);
  std::size_t head = 0;
  while (head < s.touched.size()) {
    EntityId cur = s.touched[head++];
    std::uint32_t d = s.dist[cur];
    if (d == k) continue;
    for (const auto& nb : graph.neighbors(cur)) {
      if (s.dist[nb.neighbor] == kUnreached) {
        s.dist[nb.neighbor] = d + 1;
        s.touched.push_back(nb.neighbor);
      }
    }
  }
}

std::vector<std::uint32_t> bfs_local(
    const std::vector<std::vector<LocalIndex>>& adj, LocalIndex source,
    std::uint32_t k) {
  std::vector<std::uint32_t> dist(adj.size(), kUnreached);
  std::deque<LocalIndex> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    LocalIndex cur = queue.front();
    queue.pop_front();
    if (dist[cur] >= k) continue;
    for (LocalIndex nb : adj[cur]) {
      if (dist[nb] == kUnreached) {
        dist[nb] = dist[cur] + 1;
        queue.push_back(nb);
      }
    }
  }
  for (auto& d : dist) d = std::min(d, k);
  return dist;
}

[[noreturn]] void format_error(const std::string& what) {
  throw FormatError("invalid subgraph: " + what);
}

}  // namespace

LocalIndex EnclosingSubgraph::local_of(EntityId e) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), e);
  if (it == nodes.end() || *it != e) {
    throw ArgumentError("entity " + std::to_string(e) + " not in subgraph");
  }
  return static_cast<LocalIndex>(it - nodes.begin());
}

void validate_subgraph(const EnclosingSubgraph& sub) {
  if (sub.k < 1) format_error("k must be >= 1");
  if (sub.label != 0 && sub.label != 1) format_error("label must be 0 or 1");
  if (sub.nodes.empty()) format_error("empty node list");
  for (std::size_t i = 1; i < sub.nodes.size(); ++i) {
    if (sub.nodes[i - 1] >= sub.nodes[i]) {
      format_error("nodes not strictly ascending");
    }
  }
  if (!std::binary_search(sub.nodes.begin(), sub.nodes.end(), sub.target.head) ||
      !std::binary_search(sub.nodes.begin(), sub.nodes.end(), sub.target.tail)) {
    format_error("target endpoints missing from nodes");
  }
  const std::size_t n = sub.nodes.size();
  if (sub.d_u.size() != n || sub.d_v.size() != n) {
    format_error("distance arrays do not match node count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (sub.d_u[i] > sub.k || sub.d_v[i] > sub.k) {
      format_error("distance exceeds k");
    }
  }
  if (sub.d_u[sub.local_u()] != 0 || sub.d_v[sub.local_v()] != 0) {
    format_error("endpoint distance must be 0");
  }
  for (std::size_t i = 0; i < sub.edges.size(); ++i) {
    const auto& e = sub.edges[i];
    if (e.src >= n || e.dst >= n) format_error("edge index out of range");
    if (i > 0 && !(sub.edges[i - 1] < e)) {
      format_error("edges not strictly sorted");
    }
  }
}

std::vector<std::pair<EntityId, std::uint32_t>> khop_distances(
    const KnowledgeGraph& graph, EntityId source, std::uint32_t k) {
  if (source >= graph.num_entities()) {
    throw ArgumentError("source entity out of range");
  }
  auto& s = tls_scratch;
  bfs_global(graph, source, k, s);
  std::vector<std::pair<EntityId, std::uint32_t>> out;
  out.reserve(s.touched.size());
  for (auto e : s.touched) out.emplace_back(e, s.dist[e]);
  std::sort(out.begin(), out.end());
  return out;
}

EnclosingSubgraph extract_enclosing(const KnowledgeGraph& graph,
                                    const Triple& target, std::uint32_t k,
                                    bool drop_target_edge, int label) {
  const EntityId u = target.head;
  const EntityId v = target.tail;
  if (u >= graph.num_entities() || v >= graph.num_entities()) {
    throw ArgumentError("target entity out of range");
  }
  if (k < 1) throw ArgumentError("k must be >= 1");

  EnclosingSubgraph sub;
  sub.target = target;
  sub.label = label;
  sub.k = k;

  // N_k(u) as a sorted list, then intersect by probing the BFS from v.
  auto& s = tls_scratch;
  bfs_global(graph, u, k, s);
  std::vector<EntityId> from_u = s.touched;
  std::sort(from_u.begin(), from_u.end());
  bfs_global(graph, v, k, s);
  for (EntityId e : from_u) {
    if (s.dist[e] != kUnreached) sub.nodes.push_back(e);
  }
  // Endpoints are kept even when they fall outside the strict intersection.
  for (EntityId e : {u, v}) {
    auto it = std::lower_bound(sub.nodes.begin(), sub.nodes.end(), e);
    if (it == sub.nodes.end() || *it != e) sub.nodes.insert(it, e);
  }

  const std::size_t n = sub.nodes.size();
  auto local = [&](EntityId e) -> std::int64_t {
    auto it = std::lower_bound(sub.nodes.begin(), sub.nodes.end(), e);
    if (it == sub.nodes.end() || *it != e) return -1;
    return it - sub.nodes.begin();
  };

  for (LocalIndex i = 0; i < n; ++i) {
    for (const auto& nb : graph.neighbors(sub.nodes[i])) {
      if (nb.direction != EdgeDirection::kOut) continue;
      auto j = local(nb.neighbor);
      if (j >= 0) sub.edges.push_back({i, nb.rel, static_cast<LocalIndex>(j)});
    }
  }
  std::sort(sub.edges.begin(), sub.edges.end());
  sub.edges.erase(std::unique(sub.edges.begin(), sub.edges.end()),
                  sub.edges.end());

  // Distances on the induced subgraph, before the target edge is removed.
  std::vector<std::vector<LocalIndex>> adj(n);
  for (const auto& e : sub.edges) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  const auto lu = static_cast<LocalIndex>(local(u));
  const auto lv = static_cast<LocalIndex>(local(v));
  sub.d_u = bfs_local(adj, lu, k);
  sub.d_v = bfs_local(adj, lv, k);

  if (drop_target_edge) {
    std::erase_if(sub.edges, [&](const LocalEdge& e) {
      return e.rel == target.rel && ((e.src == lu && e.dst == lv) ||
                                     (e.src == lv && e.dst == lu));
    });
  }
  return sub;
}

std::vector<EnclosingSubgraph> extract_batch(
    const KnowledgeGraph& graph, std::span<const ExtractionRequest> requests,
    std::uint32_t k, unsigned threads) {
  std::vector<EnclosingSubgraph> out(requests.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(1, requests.size())));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& r = requests[i];
      out[i] = extract_enclosing(graph, r.target, k, r.drop_target_edge, r.label);
    }
  };
  if (threads <= 1) {
    work(0, requests.size());
    return out;
  }
  // Each worker writes a disjoint slice; exceptions are rethrown in order.
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (requests.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      std::size_t begin = t * chunk;
      std::size_t end = std::min(requests.size(), begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

Eigen::MatrixXd featurize(const EnclosingSubgraph& sub) {
  const std::size_t width = sub.k + 1;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(sub.nodes.size()),
      static_cast<Eigen::Index>(2 * width));
  const LocalIndex lu = sub.local_u();
  const LocalIndex lv = sub.local_v();
  for (LocalIndex i = 0; i < sub.nodes.size(); ++i) {
    std::uint32_t du = sub.d_u[i];
    std::uint32_t dv = sub.d_v[i];
    if (i == lu) {
      du = 0;
      dv = 1;
    } else if (i == lv) {
      du = 1;
      dv = 0;
    }
    if (du > sub.k || dv > sub.k) {
      throw NumericError("distance label exceeds k at node " + std::to_string(i));
    }
    x(i, du) = 1.0;
    x(i, static_cast<Eigen::Index>(width + dv)) = 1.0;
  }
  return x;
}

namespace {

void append_uint(std::string& out, std::uint64_t v) {
  std::array<char, 24> buf;
  int len = std::snprintf(buf.data(), buf.size(), "%llu",
                          static_cast<unsigned long long>(v));
  out.append(buf.data(), static_cast<std::size_t>(len));
}

template <typename Seq>
void append_array(std::string& out, const Seq& seq) {
  out.push_back('[');
  bool first = true;
  for (auto v : seq) {
    if (!first) out.push_back(',');
    first = false;
    append_uint(out, v);
  }
  out.push_back(']');
}

}  // namespace

std::string serialize_subgraph(const EnclosingSubgraph& sub) {
  std::string out;
  out.reserve(64 + 8 * sub.nodes.size() + 24 * sub.edges.size());
  out += "{\"target\":[";
  append_uint(out, sub.target.head);
  out.push_back(',');
  append_uint(out, sub.target.rel);
  out.push_back(',');
  append_uint(out, sub.target.tail);
  out += "],\"label\":";
  append_uint(out, static_cast<std::uint64_t>(sub.label));
  out += ",\"k\":";
  append_uint(out, sub.k);
  out += ",\"nodes\":";
  append_array(out, sub.nodes);
  out += ",\"edges\":[";
  for (std::size_t i = 0; i < sub.edges.size(); ++i) {
    if (i) out.push_back(',');
    const auto& e = sub.edges[i];
    out.push_back('[');
    append_uint(out, e.src);
    out.push_back(',');
    append_uint(out, e.rel);
    out.push_back(',');
    append_uint(out, e.dst);
    out.push_back(']');
  }
  out += "],\"d_u\":";
  append_array(out, sub.d_u);
  out += ",\"d_v\":";
  append_array(out, sub.d_v);
  out.push_back('}');
  return out;
}

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint32_t as_u32(const ordered_json& j, const char* what) {
  if (!j.is_number_unsigned() ||
      j.get<std::uint64_t>() > std::numeric_limits<std::uint32_t>::max()) {
    format_error(std::string(what) + " must be a non-negative 32-bit integer");
  }
  return j.get<std::uint32_t>();
}

std::vector<std::uint32_t> as_u32_array(const ordered_json& j, const char* what) {
  if (!j.is_array()) format_error(std::string(what) + " must be an array");
  std::vector<std::uint32_t> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(as_u32(v, what));
  return out;
}

}  // namespace

EnclosingSubgraph parse_subgraph(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) format_error("top level must be an object");
  static constexpr std::array<const char*, 7> kKeys = {
      "target", "label", "k", "nodes", "edges", "d_u", "d_v"};
  std::size_t idx = 0;
  for (auto it = j.begin(); it != j.end(); ++it, ++idx) {
    if (idx >= kKeys.size()) format_error("unknown key '" + it.key() + "'");
    if (it.key() != kKeys[idx]) {
      bool known = std::find_if(kKeys.begin(), kKeys.end(), [&](const char* k) {
                     return it.key() == k;
                   }) != kKeys.end();
      format_error(known ? "key '" + it.key() + "' out of order"
                         : "unknown key '" + it.key() + "'");
    }
  }
  if (idx != kKeys.size()) format_error("missing keys");

  EnclosingSubgraph sub;
  auto target = as_u32_array(j["target"], "target");
  if (target.size() != 3) format_error("target must have 3 entries");
  sub.target = {target[0], target[1], target[2]};
  auto label = as_u32(j["label"], "label");
  sub.label = static_cast<int>(label);
  sub.k = as_u32(j["k"], "k");
  sub.nodes = as_u32_array(j["nodes"], "nodes");
  const auto& edges = j["edges"];
  if (!edges.is_array()) format_error("edges must be an array");
  for (const auto& e : edges) {
    auto triple = as_u32_array(e, "edge");
    if (triple.size() != 3) format_error("edge must have 3 entries");
    sub.edges.push_back({triple[0], triple[1], triple[2]});
  }
  sub.d_u = as_u32_array(j["d_u"], "d_u");
  sub.d_v = as_u32_array(j["d_v"], "d_v");
  validate_subgraph(sub);
  return sub;
}

void write_subgraph_cache(std::span<const EnclosingSubgraph> subs,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& s : subs) out << serialize_subgraph(s) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<EnclosingSubgraph> read_subgraph_cache(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<EnclosingSubgraph> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_subgraph(line));
    } catch (const FormatError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

}  // namespace s2dn
