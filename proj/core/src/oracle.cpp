#include "kmsgraph/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace kmsgraph {

namespace {

struct Frame {
  std::size_t vertex;   // source of the partial path built so far
  std::size_t next_in;  // ordinal of the next in-edge to try
};

bool emit_qualifies(const PathQuery& q, std::size_t start, bool empty) {
  switch (q.selector) {
    case PathClass::AllEndingAt:
      return true;
    case PathClass::FirstHit:
      // Nonempty paths starting at the target revisit it; the empty path is
      // the one element of vE_a*v.
      return empty || start != q.target;
    case PathClass::SimpleLoop:
      return !empty && start == q.target;
    case PathClass::FirstHitFrom:
      if (empty) return q.source == q.target;
      return start == *q.source && start != q.target;
  }
  return false;
}

}  // namespace

std::vector<EnumeratedPath> enumerate_paths(const WeightedGraph& g, const PathQuery& q) {
  if (q.selector == PathClass::FirstHitFrom && !q.source)
    throw Error("FirstHitFrom query without a source vertex");

  std::vector<EnumeratedPath> out;
  std::vector<Frame> stack;
  std::vector<std::size_t> rpath;   // edges of the partial path, last edge first
  std::vector<double> weights;      // running products parallel to rpath

  std::size_t visits = 1;
  stack.push_back(Frame{q.target, 0});
  if (emit_qualifies(q, q.target, true)) out.push_back(EnumeratedPath{{}, 1.0});

  auto emit = [&](std::size_t start) {
    if (!emit_qualifies(q, start, false)) return;
    EnumeratedPath p;
    p.edges.assign(rpath.rbegin(), rpath.rend());
    p.weight = weights.back();
    out.push_back(std::move(p));
  };

  while (!stack.empty()) {
    Frame& f = stack.back();
    // Extending a nonempty non-AllEndingAt path whose source already sits at
    // the target would bury the target in the interior; prune.
    bool extendable =
        rpath.size() < q.max_len &&
        (q.selector == PathClass::AllEndingAt || f.vertex != q.target || rpath.empty());
    if (extendable && f.next_in < g.in_edges(f.vertex).size()) {
      std::size_t e = g.in_edges(f.vertex)[f.next_in++];
      if (++visits > q.cap)
        throw ExplosionCapError("path enumeration exceeded the visited-node cap of " +
                                std::to_string(q.cap));
      rpath.push_back(e);
      weights.push_back((weights.empty() ? 1.0 : weights.back()) * g.edges()[e].weight);
      std::size_t src = g.edges()[e].src;
      stack.push_back(Frame{src, 0});
      emit(src);
    } else {
      stack.pop_back();
      if (!rpath.empty() && stack.size() == rpath.size()) {
        rpath.pop_back();
        weights.pop_back();
      }
    }
  }
  return out;
}

bool path_in_class(const WeightedGraph& g, std::size_t target, PathClass c,
                   std::optional<std::size_t> source,
                   std::span<const std::size_t> edges) {
  if (edges.empty()) {
    switch (c) {
      case PathClass::AllEndingAt: return true;
      case PathClass::FirstHit: return true;
      case PathClass::SimpleLoop: return false;
      case PathClass::FirstHitFrom: return source && *source == target;
    }
  }
  if (!composable(g, edges) || path_range(g, edges) != target) return false;
  std::size_t src = path_source(g, edges);
  bool interior_clean = true;   // no prefix of length 1..n-1 has range target
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (g.edges()[edges[i]].dst == target) interior_clean = false;
  switch (c) {
    case PathClass::AllEndingAt:
      return true;
    case PathClass::FirstHit:
      return interior_clean && src != target;
    case PathClass::SimpleLoop:
      return interior_clean && src == target;
    case PathClass::FirstHitFrom:
      return interior_clean && src != target && source && src == *source;
  }
  return false;
}

TruncatedPartition oracle_partition(const WeightedGraph& g, std::size_t v, double beta,
                                    std::size_t L) {
  const std::size_t n = g.vertex_count();
  TruncatedPartition t{0.0, 1.0, 0.0};   // za starts with the empty path at v

  // First-hit sums by exact length: fh[w] holds the weight^-beta total of
  // first-hit paths w -> v of the current length, for w != v.
  std::vector<double> fh(n, 0.0), fh_next(n, 0.0);
  for (std::size_t w = 0; w < n; ++w) {
    if (w == v) continue;
    for (std::size_t e : g.out_edges(w))
      if (g.edges()[e].dst == v) fh[w] += std::pow(g.edges()[e].weight, -beta);
  }
  double s1 = 0.0;   // simple loops of length 1
  for (std::size_t e : g.out_edges(v))
    if (g.edges()[e].dst == v) s1 += std::pow(g.edges()[e].weight, -beta);

  if (L >= 1) {
    t.zs += s1;
    for (std::size_t w = 0; w < n; ++w)
      if (w != v) t.za += fh[w];
  }
  for (std::size_t k = 2; k <= L; ++k) {
    // Simple loops of length k leave v once and then run a first-hit path home.
    double sk = 0.0;
    for (std::size_t e : g.out_edges(v)) {
      std::size_t d = g.edges()[e].dst;
      if (d != v) sk += std::pow(g.edges()[e].weight, -beta) * fh[d];
    }
    t.zs += sk;

    std::fill(fh_next.begin(), fh_next.end(), 0.0);
    for (std::size_t w = 0; w < n; ++w) {
      if (w == v) continue;
      double acc = 0.0;
      for (std::size_t e : g.out_edges(w)) {
        std::size_t d = g.edges()[e].dst;
        if (d != v) acc += std::pow(g.edges()[e].weight, -beta) * fh[d];
      }
      fh_next[w] = acc;
    }
    fh.swap(fh_next);
    for (std::size_t w = 0; w < n; ++w)
      if (w != v) t.za += fh[w];
  }

  // All paths into v, no restriction: iterate total sums by length.
  std::vector<double> all(n, 0.0), all_next(n, 0.0);
  all[v] = 1.0;
  t.z = 1.0;
  for (std::size_t k = 1; k <= L; ++k) {
    std::fill(all_next.begin(), all_next.end(), 0.0);
    for (std::size_t w = 0; w < n; ++w) {
      double acc = 0.0;
      for (std::size_t e : g.out_edges(w))
        acc += std::pow(g.edges()[e].weight, -beta) * all[g.edges()[e].dst];
      all_next[w] = acc;
    }
    all.swap(all_next);
    for (std::size_t w = 0; w < n; ++w) t.z += all[w];
  }
  return t;
}

double oracle_first_hit_from(const WeightedGraph& g, std::size_t from, std::size_t v,
                             double beta, std::size_t L) {
  if (from == v) return 1.0;   // only the empty path; loops at v are excluded
  const std::size_t n = g.vertex_count();
  std::vector<double> fh(n, 0.0), fh_next(n, 0.0);
  for (std::size_t w = 0; w < n; ++w) {
    if (w == v) continue;
    for (std::size_t e : g.out_edges(w))
      if (g.edges()[e].dst == v) fh[w] += std::pow(g.edges()[e].weight, -beta);
  }
  double total = L >= 1 ? fh[from] : 0.0;
  for (std::size_t k = 2; k <= L; ++k) {
    std::fill(fh_next.begin(), fh_next.end(), 0.0);
    for (std::size_t w = 0; w < n; ++w) {
      if (w == v) continue;
      double acc = 0.0;
      for (std::size_t e : g.out_edges(w)) {
        std::size_t d = g.edges()[e].dst;
        if (d != v) acc += std::pow(g.edges()[e].weight, -beta) * fh[d];
      }
      fh_next[w] = acc;
    }
    fh.swap(fh_next);
    total += fh[from];
  }
  return total;
}

std::vector<double> oracle_all_paths_sums(const WeightedGraph& g, double beta,
                                          std::size_t L) {
  const std::size_t n = g.vertex_count();
  std::vector<double> total(n, 1.0);      // the empty path at each vertex
  std::vector<double> cur(n, 1.0), nxt(n, 0.0);
  for (std::size_t k = 1; k <= L; ++k) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (const auto& e : g.edges())
      nxt[e.dst] += std::pow(e.weight, -beta) * cur[e.src];
    cur.swap(nxt);
    for (std::size_t w = 0; w < n; ++w) total[w] += cur[w];
  }
  return total;
}

}  // namespace kmsgraph
