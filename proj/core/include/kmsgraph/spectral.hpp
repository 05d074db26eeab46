#pragma once

#include <functional>
#include <optional>

#include "kmsgraph/graph.hpp"

namespace kmsgraph {

/** A linear solve produced no finite answer outside the boundary band. */
class SingularSolveError : public Error {
 public:
  using Error::Error;
};

/** Convergence classification half-band around decision thresholds. */
inline constexpr double kBoundaryTol = 1e-9;

/** Bisection tolerance for critical and divergence abscissas, in beta. */
inline constexpr double kBetaTol = 1e-12;

enum class Finiteness { Finite, Divergent, Boundary };

/** A nonnegative series value: a number, a certified divergence, or too close to call. */
struct ExtReal {
  Finiteness kind = Finiteness::Divergent;
  double value = 0.0;   // meaningful only when kind == Finite

  static ExtReal finite(double x) { return {Finiteness::Finite, x}; }
  static ExtReal divergent() { return {Finiteness::Divergent, 0.0}; }
  static ExtReal boundary() { return {Finiteness::Boundary, 0.0}; }
  bool is_finite() const { return kind == Finiteness::Finite; }
};

/**
 * Partition values of one vertex at one inverse temperature. zs sums
 * simple loops at v, za sums first-hit paths into v, and z sums everything
 * with range v; when all converge, z = za / (1 - zs) by the unique
 * factorization of a path into a first-hit part and simple loops.
 */
struct PartitionValues {
  ExtReal zs;
  ExtReal za;
  ExtReal z;
  std::optional<double> beta_v;   // divergence abscissa, filled on request
};

/** Dense matrix with entry (i, j) = sum of N(e)^-beta over edges i -> j. */
struct TransferMatrix {
  std::size_t n = 0;
  std::vector<double> a;   // row major, n * n

  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
};

TransferMatrix transfer_matrix(const WeightedGraph& g, double beta);

/**
 * Perron root of a nonnegative matrix. Dense eigensolve up to 64 rows;
 * beyond that a shifted power iteration with Collatz-Wielandt certification,
 * falling back to the eigensolve when the iteration cannot certify (defective
 * or periodic spectra).
 */
double spectral_radius(const TransferMatrix& m);

/** Spectral radius of the transfer matrix restricted to a vertex subset. */
double restricted_radius(const WeightedGraph& g, double beta,
                         std::span<const std::size_t> subset);

/**
 * zs / za / z for one vertex. Each series is classified against the spectral
 * radius of the transfer matrix restricted to the vertices its paths can
 * visit: the mutual-reachability set of v (minus v) for zs, all of v's
 * proper ancestors for za. Values within tol of the radius-1 threshold come
 * back Boundary rather than guessed.
 */
PartitionValues partition_values(const WeightedGraph& g, double beta, std::size_t v,
                                 double tol = kBoundaryTol);

/** z = za / (1 - zs), divergence and boundary bands propagated. */
ExtReal combine_partition(const ExtReal& zs, const ExtReal& za,
                          double tol = kBoundaryTol);

/**
 * inf of the betas where Z_v converges, located by bisecting the Perron root
 * of the ancestor-restricted transfer matrix against 1. Zero when the root is
 * already at most 1 at beta = 0; finite graphs never produce +infinity.
 */
double divergence_abscissa(const WeightedGraph& g, std::size_t v);

/**
 * Weight sums over first-hit paths into v, indexed by start vertex: 1 at v,
 * 0 at vertices that cannot reach v. Requires the governing spectral radius
 * below 1 - tol; throws SingularSolveError otherwise.
 */
std::vector<double> first_hit_sums(const WeightedGraph& g, double beta, std::size_t v,
                                   double tol = kBoundaryTol);

/** Strictly decreasing root finder used for every abscissa in the library. */
double bisect_decreasing(const std::function<double(double)>& f, double target,
                         double lo, double hi, double beta_tol = kBetaTol);

}  // namespace kmsgraph
