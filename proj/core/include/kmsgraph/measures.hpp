#pragma once

#include "kmsgraph/classify.hpp"

namespace kmsgraph {

/** Edge sequence is not a composable path of this graph. */
class InvalidPathError : public Error {
 public:
  using Error::Error;
};

/** The path's range lies in the relative set, so its cylinder holds no atom. */
class NotBoundaryPathError : public Error {
 public:
  using Error::Error;
};

/**
 * Mass the state m assigns to the cylinder of a path: N(u)^-beta m(r(u)).
 * The empty path of a vertex is handled by the _at_vertex variant.
 */
double cylinder_mass(const WeightedGraph& g, double beta, std::span<const double> m,
                     std::span<const std::size_t> edges);
double cylinder_mass_at_vertex(std::span<const double> m, std::size_t v);

/**
 * Mass of the single boundary point {u}: N(u)^-beta S(m)(r(u)). Throws
 * NotBoundaryPathError when r(u) is relative, since u then extends and is no
 * boundary point.
 */
double atom_mass(const WeightedGraph& g, double beta, std::span<const double> m,
                 std::span<const std::size_t> edges);
double atom_mass_at_vertex(const WeightedGraph& g, double beta,
                           std::span<const double> m, std::size_t v);

/**
 * Total mass of finite boundary points carried by paths of length <= L:
 * sums S(m)(v) * Z_v^(<=L) over non-relative v via the oracle's truncated
 * all-paths sums.
 */
double finite_mass(const WeightedGraph& g, double beta, std::span<const double> m,
                   std::size_t L);

}  // namespace kmsgraph
