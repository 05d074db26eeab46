#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace kmsgraph {

/** Base class for every error thrown by this library. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Input graph failed validation; problems() lists every violated invariant. */
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/** Edge as given by the user; weight defaults to e when absent. */
struct EdgeSpec {
  std::string id;
  std::string src;
  std::string dst;
  std::optional<double> weight;
};

/** Unvalidated description of a weighted graph with a distinguished vertex set. */
struct GraphSpec {
  std::vector<std::string> vertices;
  std::vector<EdgeSpec> edges;
  std::vector<std::string> relative_set;
};

struct Edge {
  std::string id;
  std::size_t src;     // index into vertex table
  std::size_t dst;     // index into vertex table
  double weight;       // > 1
};

inline constexpr double kDefaultEdgeWeight = std::numbers::e;

/**
 * Finite directed multigraph with edge weights > 1 and a distinguished set of
 * regular vertices (the relative set). Vertices and edges keep their
 * declaration order; all per-index accessors use that order.
 *
 * Edges are read source-to-range: an edge e goes from s(e) = src to
 * r(e) = dst, and a path e1 e2 ... en is composable when r(ei) = s(ei+1).
 */
class WeightedGraph {
 public:
  /** Checks every structural invariant; throws ValidationError listing all failures. */
  static WeightedGraph validate(const GraphSpec& spec);

  std::size_t vertex_count() const { return vertex_ids_.size(); }
  const std::string& vertex_id(std::size_t v) const { return vertex_ids_[v]; }
  std::optional<std::size_t> vertex_index(const std::string& id) const;

  const std::vector<Edge>& edges() const { return edges_; }
  std::optional<std::size_t> edge_index(const std::string& id) const;

  /** Indices of edges leaving / entering v, in declaration order. */
  const std::vector<std::size_t>& out_edges(std::size_t v) const { return out_[v]; }
  const std::vector<std::size_t>& in_edges(std::size_t v) const { return in_[v]; }

  bool is_relative(std::size_t v) const { return relative_mask_[v]; }
  const std::vector<std::size_t>& relative_set() const { return relative_; }

  /** A vertex is regular when it emits at least one edge (finite graphs only here). */
  bool is_regular(std::size_t v) const { return !out_[v].empty(); }
  std::vector<std::size_t> regular_vertices() const;

  /** Existence of a path from one vertex to another, length 0 allowed. */
  bool reaches(std::size_t from, std::size_t to) const;

  /** Round-trips through validate() to the identical graph. */
  GraphSpec spec() const;

 private:
  WeightedGraph() = default;

  std::vector<std::string> vertex_ids_;
  std::unordered_map<std::string, std::size_t> vertex_lookup_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> edge_lookup_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::size_t> relative_;
  std::vector<bool> relative_mask_;

  // Transitive closure as packed bit rows, built eagerly up to 1024 vertices;
  // larger graphs answer reaches() by BFS on demand.
  std::vector<std::uint64_t> closure_;
  std::size_t closure_stride_ = 0;
};

/** True when the edge sequence is nonempty and consecutively composable. */
bool composable(const WeightedGraph& g, std::span<const std::size_t> path);

/** Product of N(e) along the path; 1 for the empty path. */
double path_weight(const WeightedGraph& g, std::span<const std::size_t> path);

std::size_t path_source(const WeightedGraph& g, std::span<const std::size_t> path);
std::size_t path_range(const WeightedGraph& g, std::span<const std::size_t> path);

/** Parse the JSON graph format: {"vertices": [...], "edges": [{"id","src","dst","weight"?}], "relative_set": [...]}. */
GraphSpec parse_graph_json(const std::string& text);

/** Serialize with stable key order and shortest round-trip floats. */
std::string graph_to_json(const WeightedGraph& g);

WeightedGraph load_graph_file(const std::string& path);

}  // namespace kmsgraph
