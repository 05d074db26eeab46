#include "kmsgraph/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace kmsgraph {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "graph validation failed:";
  for (const auto& p : problems) {
    out += "\n  - ";
    out += p;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(join_problems(problems)), problems_(std::move(problems)) {}

WeightedGraph WeightedGraph::validate(const GraphSpec& spec) {
  std::vector<std::string> problems;

  WeightedGraph g;
  g.vertex_ids_ = spec.vertices;
  for (std::size_t i = 0; i < spec.vertices.size(); ++i) {
    const auto& id = spec.vertices[i];
    if (id.empty()) problems.push_back("vertex " + std::to_string(i) + " has an empty id");
    if (!g.vertex_lookup_.emplace(id, i).second)
      problems.push_back("duplicate vertex id '" + id + "'");
  }

  g.out_.resize(spec.vertices.size());
  g.in_.resize(spec.vertices.size());
  for (const auto& es : spec.edges) {
    auto src = g.vertex_index(es.src);
    auto dst = g.vertex_index(es.dst);
    if (!src) problems.push_back("edge '" + es.id + "': unknown vertex '" + es.src + "'");
    if (!dst) problems.push_back("edge '" + es.id + "': unknown vertex '" + es.dst + "'");
    double w = es.weight.value_or(kDefaultEdgeWeight);
    if (!(w > 1.0))
      problems.push_back("edge '" + es.id + "': weight " + std::to_string(w) +
                         " does not exceed 1");
    if (es.id.empty()) problems.push_back("edge with empty id");
    if (g.edge_lookup_.count(es.id))
      problems.push_back("duplicate edge id '" + es.id + "'");
    if (!src || !dst) continue;
    std::size_t e = g.edges_.size();
    g.edge_lookup_.emplace(es.id, e);
    g.edges_.push_back(Edge{es.id, *src, *dst, w});
    g.out_[*src].push_back(e);
    g.in_[*dst].push_back(e);
  }

  g.relative_mask_.assign(spec.vertices.size(), false);
  for (const auto& rid : spec.relative_set) {
    auto v = g.vertex_index(rid);
    if (!v) {
      problems.push_back("relative set: unknown vertex '" + rid + "'");
      continue;
    }
    if (g.relative_mask_[*v]) {
      problems.push_back("relative set: vertex '" + rid + "' listed twice");
      continue;
    }
    g.relative_mask_[*v] = true;
    g.relative_.push_back(*v);
  }
  // Only meaningful once edges resolved; a sink in the relative set is an error
  // because the defining relations hold at relative vertices only.
  if (problems.empty()) {
    for (std::size_t v : g.relative_)
      if (g.out_[v].empty())
        problems.push_back("relative set: vertex '" + g.vertex_ids_[v] +
                           "' emits no edge");
  }

  if (!problems.empty()) throw ValidationError(std::move(problems));

  const std::size_t n = g.vertex_count();
  if (n > 0 && n <= 1024) {
    g.closure_stride_ = (n + 63) / 64;
    g.closure_.assign(n * g.closure_stride_, 0);
    auto bit = [&](std::size_t row, std::size_t col) -> std::uint64_t& {
      return g.closure_[row * g.closure_stride_ + col / 64];
    };
    for (std::size_t v = 0; v < n; ++v) bit(v, v) |= 1ull << (v % 64);
    for (const auto& e : g.edges_) bit(e.src, e.dst) |= 1ull << (e.dst % 64);
    // Floyd-Warshall over bit rows: if v reaches k, fold k's row into v's.
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t v = 0; v < n; ++v)
        if (g.closure_[v * g.closure_stride_ + k / 64] & (1ull << (k % 64)))
          for (std::size_t w = 0; w < g.closure_stride_; ++w)
            g.closure_[v * g.closure_stride_ + w] |= g.closure_[k * g.closure_stride_ + w];
  }
  return g;
}

std::optional<std::size_t> WeightedGraph::vertex_index(const std::string& id) const {
  auto it = vertex_lookup_.find(id);
  if (it == vertex_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> WeightedGraph::edge_index(const std::string& id) const {
  auto it = edge_lookup_.find(id);
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> WeightedGraph::regular_vertices() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < vertex_count(); ++v)
    if (is_regular(v)) out.push_back(v);
  return out;
}

bool WeightedGraph::reaches(std::size_t from, std::size_t to) const {
  if (from == to) return true;
  if (!closure_.empty())
    return closure_[from * closure_stride_ + to / 64] & (1ull << (to % 64));
  std::vector<bool> seen(vertex_count(), false);
  std::deque<std::size_t> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t e : out_[v]) {
      std::size_t w = edges_[e].dst;
      if (w == to) return true;
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  return false;
}

GraphSpec WeightedGraph::spec() const {
  GraphSpec s;
  s.vertices = vertex_ids_;
  for (const auto& e : edges_)
    s.edges.push_back(EdgeSpec{e.id, vertex_ids_[e.src], vertex_ids_[e.dst], e.weight});
  for (std::size_t v : relative_) s.relative_set.push_back(vertex_ids_[v]);
  return s;
}

bool composable(const WeightedGraph& g, std::span<const std::size_t> path) {
  if (path.empty()) return false;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    if (g.edges()[path[i]].dst != g.edges()[path[i + 1]].src) return false;
  return true;
}

double path_weight(const WeightedGraph& g, std::span<const std::size_t> path) {
  double w = 1.0;
  for (std::size_t e : path) w *= g.edges()[e].weight;
  return w;
}

std::size_t path_source(const WeightedGraph& g, std::span<const std::size_t> path) {
  return g.edges()[path.front()].src;
}

std::size_t path_range(const WeightedGraph& g, std::span<const std::size_t> path) {
  return g.edges()[path.back()].dst;
}

GraphSpec parse_graph_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError({std::string("JSON parse error: ") + ex.what()});
  }
  GraphSpec spec;
  try {
    for (const auto& v : j.at("vertices")) spec.vertices.push_back(v.get<std::string>());
    if (j.contains("edges"))
      for (const auto& e : j["edges"]) {
        EdgeSpec es;
        es.id = e.at("id").get<std::string>();
        es.src = e.at("src").get<std::string>();
        es.dst = e.at("dst").get<std::string>();
        if (e.contains("weight")) es.weight = e["weight"].get<double>();
        spec.edges.push_back(std::move(es));
      }
    if (j.contains("relative_set"))
      for (const auto& r : j["relative_set"]) spec.relative_set.push_back(r.get<std::string>());
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError({std::string("graph JSON malformed: ") + ex.what()});
  }
  return spec;
}

std::string graph_to_json(const WeightedGraph& g) {
  nlohmann::ordered_json j;
  j["vertices"] = nlohmann::ordered_json::array();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) j["vertices"].push_back(g.vertex_id(v));
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) {
    nlohmann::ordered_json je;
    je["id"] = e.id;
    je["src"] = g.vertex_id(e.src);
    je["dst"] = g.vertex_id(e.dst);
    je["weight"] = e.weight;
    j["edges"].push_back(std::move(je));
  }
  j["relative_set"] = nlohmann::ordered_json::array();
  for (std::size_t v : g.relative_set()) j["relative_set"].push_back(g.vertex_id(v));
  return j.dump(2);
}

WeightedGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return WeightedGraph::validate(parse_graph_json(buf.str()));
}

}  // namespace kmsgraph
