#pragma once

#include <optional>
#include <string>

#include "kmsgraph/graph.hpp"

namespace kmsgraph {

/** One free-group letter: an edge or its formal inverse. */
struct Letter {
  std::size_t edge = 0;
  bool inv = false;

  bool operator==(const Letter&) const = default;
};

/** Reduced word over the edge alphabet; the factories below keep it reduced. */
struct FreeWord {
  std::vector<Letter> letters;

  std::size_t length() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  bool operator==(const FreeWord&) const = default;
};

/** Cancels adjacent letter-inverse pairs until none remain. */
FreeWord reduce(std::span<const Letter> letters);

FreeWord inverse(const FreeWord& w);

/** Reduced concatenation w1 then w2. */
FreeWord concat(const FreeWord& w1, const FreeWord& w2);

/**
 * Normal form of the partial map a reduced word induces on boundary paths.
 * Words act right to left: the last letter is applied first. The only
 * nonempty maps are x -> ux on the cylinder of r(u) (PathWord), ux -> x on
 * the cylinder of u (InversePathWord), u'x -> ux with r(u) = r(u')
 * (Transposition), and the identity; every other reduced word has empty
 * domain (Null), in particular any with a positive letter after an inverse.
 */
struct WordShape {
  enum class Kind { Identity, PathWord, InversePathWord, Transposition, Null };

  Kind kind = Kind::Null;
  std::vector<std::size_t> out;  // path u, prepended by the map
  std::vector<std::size_t> in;   // path u', stripped by the map
};

WordShape shape(const WeightedGraph& g, const FreeWord& w);

/**
 * A point of the boundary path space, restricted to the finitely
 * representable ones: a finite path whose range is not relative, or an
 * eventually periodic infinite path (cycle nonempty). Canonical form has a
 * primitive cycle and the shortest prefix, so operator== decides equality of
 * the underlying paths; make_boundary_path and apply always return it.
 */
struct BoundaryPath {
  std::size_t base = 0;              // source vertex
  std::vector<std::size_t> prefix;   // edge indices
  std::vector<std::size_t> cycle;    // empty marks a finite path

  bool finite() const { return cycle.empty(); }
  bool operator==(const BoundaryPath&) const = default;
};

/** Validates composability and endpoint rules, then canonicalizes. */
BoundaryPath make_boundary_path(const WeightedGraph& g, std::size_t base,
                                std::vector<std::size_t> prefix,
                                std::vector<std::size_t> cycle);

/** Edge at position i; precondition: i < prefix length for finite paths. */
std::size_t boundary_edge_at(const BoundaryPath& x, std::size_t i);

/**
 * phi_w(x): letters applied right to left, each prepending its edge or
 * stripping a matching leading edge. Absent when x leaves the domain at any
 * step; this never consults shape(), so the two stay independent checks of
 * one another.
 */
std::optional<BoundaryPath> apply(const WeightedGraph& g, const FreeWord& w,
                                  const BoundaryPath& x);

/**
 * Every boundary path with prefix length <= max_prefix and primitive cycle
 * length <= max_cycle, each in canonical form, finite ones included.
 */
std::vector<BoundaryPath> enumerate_boundary_paths(const WeightedGraph& g,
                                                   std::size_t max_prefix,
                                                   std::size_t max_cycle);

/**
 * Some boundary path starting at v: the greedy walk out of v ends at a sink
 * or closes a cycle. Exists for every vertex of a validated graph because
 * relative vertices cannot be sinks.
 */
BoundaryPath boundary_witness_from(const WeightedGraph& g, std::size_t v);

/**
 * Axiom sweep over all reduced words of length <= max_word and the
 * enumerated boundary paths: involution, composition over pairs with
 * |w1| + |w2| <= max_word, orthogonality of edge-inverse domains,
 * semi-saturation (no-cancellation concatenations have nested domains), and
 * shape/apply agreement with a domain witness for every non-Null word.
 */
struct ActionAxiomReport {
  std::size_t words = 0;
  std::size_t paths = 0;
  std::size_t involution_checked = 0;      // (w, x) pairs with phi_w(x) defined
  std::size_t composition_checked = 0;     // (w1, w2, x) chains evaluated
  std::size_t orthogonality_checked = 0;   // paths swept against all inverses
  std::size_t semisaturation_checked = 0;
  std::size_t shape_identity = 0;
  std::size_t shape_path = 0;
  std::size_t shape_inverse = 0;
  std::size_t shape_transposition = 0;
  std::size_t shape_null = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

ActionAxiomReport run_action_axioms(const WeightedGraph& g, std::size_t max_word,
                                    std::size_t max_prefix, std::size_t max_cycle);

}  // namespace kmsgraph
