#include "kmsgraph/measures.hpp"

#include <cmath>

#include "kmsgraph/oracle.hpp"

namespace kmsgraph {
namespace {

void require_path(const WeightedGraph& g, std::span<const std::size_t> edges) {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i] >= g.edges().size()) throw InvalidPathError("edge index out of range");
    if (i + 1 < edges.size() &&
        g.edges()[edges[i]].dst != g.edges()[edges[i + 1]].src) {
      throw InvalidPathError("edges do not compose");
    }
  }
}

void require_state(const WeightedGraph& g, std::span<const double> m) {
  if (m.size() != g.vertex_count()) throw Error("state vector has wrong length");
}

}  // namespace

double cylinder_mass(const WeightedGraph& g, double beta, std::span<const double> m,
                     std::span<const std::size_t> edges) {
  require_state(g, m);
  if (edges.empty()) throw InvalidPathError("empty path has no single cylinder; use the vertex form");
  require_path(g, edges);
  double w = 1.0;
  for (std::size_t e : edges) w *= std::pow(g.edges()[e].weight, -beta);
  return w * m[path_range(g, edges)];
}

double cylinder_mass_at_vertex(std::span<const double> m, std::size_t v) {
  if (v >= m.size()) throw InvalidPathError("vertex index out of range");
  return m[v];
}

double atom_mass_at_vertex(const WeightedGraph& g, double beta,
                           std::span<const double> m, std::size_t v) {
  require_state(g, m);
  if (v >= g.vertex_count()) throw InvalidPathError("vertex index out of range");
  if (g.is_relative(v)) {
    throw NotBoundaryPathError("vertex " + g.vertex_id(v) +
                               " is relative; its empty path is not a boundary point");
  }
  return defect(g, beta, m)[v];
}

double atom_mass(const WeightedGraph& g, double beta, std::span<const double> m,
                 std::span<const std::size_t> edges) {
  require_state(g, m);
  if (edges.empty()) throw InvalidPathError("empty path has no edge form; use the vertex form");
  require_path(g, edges);
  std::size_t r = path_range(g, edges);
  if (g.is_relative(r)) {
    throw NotBoundaryPathError("path range " + g.vertex_id(r) +
                               " is relative; the path is not a boundary point");
  }
  double w = 1.0;
  for (std::size_t e : edges) w *= std::pow(g.edges()[e].weight, -beta);
  return w * defect(g, beta, m)[r];
}

double finite_mass(const WeightedGraph& g, double beta, std::span<const double> m,
                   std::size_t L) {
  require_state(g, m);
  std::vector<double> s = defect(g, beta, m);
  std::vector<double> z = oracle_all_paths_sums(g, beta, L);
  double total = 0.0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.is_relative(v) || s[v] <= 0.0) continue;
    total += s[v] * z[v];
  }
  return total;
}

}  // namespace kmsgraph
