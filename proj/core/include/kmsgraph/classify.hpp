#pragma once

#include <cstdint>

#include "kmsgraph/spectral.hpp"

namespace kmsgraph {

/** Operation asked for an equivariant vertex but the vertex is not one. */
class NotEquivariantError : public Error {
 public:
  using Error::Error;
};

/** Operation requires a state vector; membership checks failed. */
class NotAStateError : public Error {
 public:
  using Error::Error;
};

/**
 * Regular: za finite and zs < 1, so the vertex carries a finite-type extreme.
 * Critical: za finite and zs = 1 (within tol), the conservative case.
 * NonEquivariant: anything else; no state charges such a vertex.
 */
enum class VertexClass { Regular, Critical, NonEquivariant };

enum class StateTag { FiniteType, Conservative, Dissipative, Ground, Mixed, Unchecked };

/** A candidate state: vertex masses in declaration order. */
struct StateVector {
  std::vector<double> values;
  double beta = 0.0;
  StateTag tag = StateTag::Unchecked;
};

struct ClassifyOptions {
  double tol = kBoundaryTol;    // convergence-threshold half band
  double tol_m = 1e-9;          // membership residual tolerance
  bool at_critical = false;     // beta came from a root finder; trust zs = 1
};

/** Shared labeling rule; boundary reports ambiguity rather than a third class. */
VertexClass classify_partition(const PartitionValues& pv, double tol, bool& boundary);

struct VertexClassification {
  double beta = 0.0;
  std::vector<VertexClass> labels;
  std::vector<bool> boundary;              // per-vertex ambiguity flags
  std::vector<PartitionValues> partitions;
  // Mutual-reachability classes of critical vertices, each sorted by index.
  std::vector<std::vector<std::size_t>> critical_classes;
};

VertexClassification classify_vertices(const WeightedGraph& g, double beta,
                                       const ClassifyOptions& opts = {});

/**
 * The extreme state attached to an equivariant vertex: normalized first-hit
 * sums into v. Throws NotEquivariantError when v is neither regular nor
 * critical at this beta.
 */
StateVector extreme_state(const WeightedGraph& g, double beta, std::size_t v,
                          const ClassifyOptions& opts = {});

/** S(m)(v) = m(v) - sum over edges leaving v of N(e)^-beta m(r(e)). */
std::vector<double> defect(const WeightedGraph& g, double beta,
                           std::span<const double> m);

struct MembershipReport {
  bool is_member = false;
  double mass = 0.0;
  double m1_residual = 0.0;                                  // |mass - 1|
  std::vector<std::pair<std::size_t, double>> m2_violations; // relative vertex, S(m)
  std::vector<std::pair<std::size_t, double>> m3_violations; // vertex, S(m) < -tol
};

MembershipReport check_membership(const WeightedGraph& g, double beta,
                                  std::span<const double> m, double tol_m = 1e-9);

struct Decomposition {
  std::vector<std::pair<std::size_t, double>> finite_coeffs;       // by vertex
  std::vector<std::pair<std::size_t, double>> conservative_coeffs; // by class index
  double residual_mass = 0.0;
  bool consistent = false;   // residual within tolerance
};

/**
 * Barycentric coordinates of a state: Z_v * S(m)(v) on the regular non-relative
 * vertices, then class masses of the conservative remainder. Throws
 * NotAStateError when m fails membership.
 */
Decomposition decompose(const WeightedGraph& g, double beta, const StateVector& m,
                        const VertexClassification& cls,
                        const ClassifyOptions& opts = {});

enum class DissipativeStatus { Empty, Unknown, FamilySolved };

struct SimplexDescription {
  VertexClassification classification;
  std::vector<std::pair<std::size_t, StateVector>> finite_extremes;       // by vertex
  std::vector<std::pair<std::size_t, StateVector>> conservative_extremes; // by class
  DissipativeStatus dis_status = DissipativeStatus::Empty;
  std::string dis_reason;
  std::vector<std::size_t> no_kms;   // vertices with beta below their abscissa
};

SimplexDescription simplex(const WeightedGraph& g, double beta,
                           const ClassifyOptions& opts = {});

struct GroundStates {
  std::vector<std::size_t> extreme_vertices;   // E^0 minus the relative set
  std::vector<double> abscissas;               // divergence abscissa per extreme
  std::vector<bool> kms_infinity;              // abscissa finite
};

GroundStates ground_states(const WeightedGraph& g);

struct NiceGraphResult {
  std::uint64_t k = 0;   // in-paths per vertex
  std::size_t l = 0;     // path length
  double threshold = 0;  // ln(k) / l; no states strictly below it
};

/**
 * Looks for the smallest l <= max_l such that every vertex receives the same
 * number k >= 1 of length-l paths; requires the constant default weight on
 * every edge. Returns nothing when no such l exists.
 */
std::optional<NiceGraphResult> nice_graph_check(const WeightedGraph& g,
                                                std::size_t max_l = 6);

}  // namespace kmsgraph
