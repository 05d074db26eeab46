#pragma once

#include <optional>

#include "kmsgraph/graph.hpp"

namespace kmsgraph {

/** Path search exceeded the visited-node cap. */
class ExplosionCapError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kDefaultVisitCap = 10'000'000;

/**
 * Path classes ending at a target vertex v:
 *   AllEndingAt  - every path with range v, the length-0 path v included
 *   FirstHit     - no proper prefix (the length-0 prefix s(u) included) has
 *                  range v, so the path meets v exactly once, at its end
 *   SimpleLoop   - length >= 1, source and range v, no interior visit to v
 *   FirstHitFrom - FirstHit restricted to a fixed source vertex
 */
enum class PathClass { AllEndingAt, FirstHit, SimpleLoop, FirstHitFrom };

struct PathQuery {
  std::size_t target = 0;
  PathClass selector = PathClass::AllEndingAt;
  std::optional<std::size_t> source;          // FirstHitFrom only
  std::size_t max_len = 0;
  std::size_t cap = kDefaultVisitCap;         // visited partial paths, not emitted ones
};

struct EnumeratedPath {
  std::vector<std::size_t> edges;   // edge indices, source first; empty = the path v
  double weight;                    // N(u), product of edge weights
};

/**
 * Explicit-stack DFS backwards from the target. FirstHit and SimpleLoop prune
 * every branch that would put the target in a path's interior, so their
 * searches stay finite on cyclic graphs whenever max_len does the bounding;
 * AllEndingAt relies on max_len and the cap alone.
 */
std::vector<EnumeratedPath> enumerate_paths(const WeightedGraph& g, const PathQuery& q);

/** Class predicates, written against the definitions rather than the enumerator. */
bool path_in_class(const WeightedGraph& g, std::size_t target, PathClass c,
                   std::optional<std::size_t> source,
                   std::span<const std::size_t> edges);

struct TruncatedPartition {
  double zs;   // simple-loop weight^-beta sums, lengths 1..L
  double za;   // first-hit sums, lengths 0..L (the empty path contributes 1)
  double z;    // all-paths sums, lengths 0..L
};

/**
 * Exact truncated partition sums by dynamic programming over (vertex, length).
 * Runs in O(L * |E|) independent of the path count, so cyclic graphs with
 * astronomically many paths are still summable; enumerate_paths stays the
 * route for anything that needs the paths themselves.
 */
TruncatedPartition oracle_partition(const WeightedGraph& g, std::size_t v, double beta,
                                    std::size_t L);

/** Truncated first-hit sum from one vertex into v, lengths 0..L. */
double oracle_first_hit_from(const WeightedGraph& g, std::size_t from, std::size_t v,
                             double beta, std::size_t L);

/** Z_v truncated at L for every vertex at once. */
std::vector<double> oracle_all_paths_sums(const WeightedGraph& g, double beta,
                                          std::size_t L);

}  // namespace kmsgraph
