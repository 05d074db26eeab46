#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "kmsgraph/graph.hpp"

namespace kmstest {

using namespace kmsgraph;

inline GraphSpec o_n_spec(std::size_t n) {
  GraphSpec s;
  s.vertices = {"v"};
  for (std::size_t j = 1; j <= n; ++j) {
    s.edges.push_back({"e" + std::to_string(j), "v", "v", {}});
  }
  return s;
}

inline WeightedGraph o_n(std::size_t n) { return WeightedGraph::validate(o_n_spec(n)); }

inline WeightedGraph two_cycle() {
  GraphSpec s;
  s.vertices = {"v0", "v1"};
  s.edges = {{"a", "v0", "v1", {}}, {"b", "v1", "v0", {}}};
  return WeightedGraph::validate(s);
}

inline WeightedGraph edgeless(std::size_t k) {
  GraphSpec s;
  for (std::size_t i = 0; i < k; ++i) s.vertices.push_back("v" + std::to_string(i));
  return WeightedGraph::validate(s);
}

struct RandomGraphOptions {
  std::size_t min_vertices = 2;
  std::size_t max_vertices = 8;
  std::size_t max_parallel = 3;
  double extra_edge_factor = 1.0;   // expected edges ~ factor * vertices
  double min_weight = 1.5;          // bounded away from 1 so tails die fast
  double max_weight = 7.389;        // e^2
  double relative_prob = 0.0;       // per emitting vertex
};

inline WeightedGraph random_graph(std::mt19937_64& rng, const RandomGraphOptions& opt) {
  std::uniform_int_distribution<std::size_t> nv(opt.min_vertices, opt.max_vertices);
  std::size_t n = nv(rng);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> weight(opt.min_weight, opt.max_weight);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  GraphSpec s;
  for (std::size_t i = 0; i < n; ++i) s.vertices.push_back("v" + std::to_string(i));
  std::size_t target = 1 + static_cast<std::size_t>(opt.extra_edge_factor * double(n));
  std::vector<std::vector<std::size_t>> parallel(n, std::vector<std::size_t>(n, 0));
  std::size_t made = 0;
  for (std::size_t tries = 0; made < target && tries < 20 * target; ++tries) {
    std::size_t a = pick(rng), b = pick(rng);
    if (parallel[a][b] >= opt.max_parallel) continue;
    ++parallel[a][b];
    s.edges.push_back({"e" + std::to_string(made), "v" + std::to_string(a),
                       "v" + std::to_string(b), weight(rng)});
    ++made;
  }
  if (s.edges.empty()) {
    s.edges.push_back({"e0", "v0", "v" + std::to_string(n - 1), weight(rng)});
  }
  if (opt.relative_prob > 0.0) {
    std::vector<bool> emits(n, false);
    for (const EdgeSpec& e : s.edges) {
      emits[std::stoul(e.src.substr(1))] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (emits[i] && unit(rng) < opt.relative_prob) {
        s.relative_set.push_back("v" + std::to_string(i));
      }
    }
  }
  return WeightedGraph::validate(s);
}

/**
 * All-paths sum into v through one dense long double solve over the
 * ancestors of v. Deliberately shares nothing with the library's two-solve
 * route, so agreement between them is informative. Caller must pick beta
 * with the governing spectral radius safely below 1.
 */
inline double solve_z_direct(const WeightedGraph& g, double beta, std::size_t v) {
  std::vector<std::size_t> anc;
  std::vector<std::ptrdiff_t> pos(g.vertex_count(), -1);
  for (std::size_t w = 0; w < g.vertex_count(); ++w) {
    if (g.reaches(w, v)) {
      pos[w] = static_cast<std::ptrdiff_t>(anc.size());
      anc.push_back(w);
    }
  }
  std::size_t n = anc.size();
  std::vector<long double> a(n * n, 0.0L), x(n, 0.0L);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0L;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ei : g.out_edges(anc[i])) {
      const Edge& e = g.edges()[ei];
      if (pos[e.dst] < 0) continue;
      a[i * n + static_cast<std::size_t>(pos[e.dst])] -=
          std::pow(static_cast<long double>(e.weight), -static_cast<long double>(beta));
    }
  }
  x[static_cast<std::size_t>(pos[v])] = 1.0L;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    }
    for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
    std::swap(x[col], x[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r * n + col] == 0.0L) continue;
      long double f = a[r * n + col] / a[col * n + col];
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      x[r] -= f * x[col];
    }
  }
  long double total = 0.0L;
  for (std::size_t i = 0; i < n; ++i) total += x[i] / a[i * n + i];
  return static_cast<double>(total);
}

}  // namespace kmstest
