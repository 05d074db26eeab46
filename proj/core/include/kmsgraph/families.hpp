#pragma once

#include "kmsgraph/classify.hpp"

namespace kmsgraph {

/**
 * The infinite-graph corpus. Canonical vertex indexing per family:
 *   Hub            v_0 the hub with loop e_0 and jump edges e_n to each spoke
 *                  v_n; return chain f_n: v_{n+1} -> v_n
 *   BiInfiniteLine integers in the order 0, 1, -1, 2, -2, ...; edges
 *                  e_i: v_i -> v_{i+1} and f_i: v_{i+1} -> v_i
 *   BinaryRay      v_n with double edges e_n, f_n: v_n -> v_{n+1}
 *   LoopRay        v_n with loop e_n and forward edge f_n: v_n -> v_{n+1}
 *   DoubleLoopRay  LoopRay plus a second loop d_0 at v_0
 *   TailOn         v_1, v_2, ... with n loops at v_1 and chain
 *                  f_k: v_{k+1} -> v_k; index i holds v_{i+1}
 *   On             one vertex with n loops
 *   OInfinity      one vertex with countably many loops
 * Every edge carries the default weight e = exp(1).
 */
enum class FamilyKind {
  Hub,
  BiInfiniteLine,
  BinaryRay,
  LoopRay,
  DoubleLoopRay,
  TailOn,
  On,
  OInfinity,
};

/** Toeplitz: R empty. Full: R is the infinite graph's regular vertex set. */
enum class RelativeScenario { Toeplitz, Full };

struct FamilySpec {
  FamilyKind kind = FamilyKind::Hub;
  std::size_t n = 0;   // branching parameter of TailOn and On
  RelativeScenario scenario = RelativeScenario::Toeplitz;
};

/**
 * Names: hub, bi-infinite-line, binary-ray, loop-ray, double-loop-ray,
 * tail-on, on, o-infinity. TailOn and On require n >= 2.
 */
FamilySpec parse_family(const std::string& name, std::size_t n = 0,
                        RelativeScenario scenario = RelativeScenario::Toeplitz);

std::string family_name(FamilyKind kind);

/**
 * Induced subgraph on the first depth vertices of the canonical indexing
 * (for OInfinity, depth counts loops instead). Under the Full scenario the
 * truncation's relative set is the infinite graph's regular vertex set
 * intersected with the vertices still emitting an edge after truncation.
 */
WeightedGraph truncate(const FamilySpec& f, std::size_t depth);

/** Whether vertex index v lies in R on the infinite graph under f.scenario. */
bool family_vertex_relative(const FamilySpec& f, std::size_t v);

/**
 * Closed-form partition values of the infinite graph, divergence markers
 * included; beta_v is always filled. These are the limits of the truncated
 * oracle sums as depth and length grow.
 */
PartitionValues analytic_partitions(const FamilySpec& f, std::size_t v, double beta);

/** Closed-form divergence abscissa; may be 0 or +infinity. */
double analytic_divergence_abscissa(const FamilySpec& f, std::size_t v);

/** One infinite-type state given by a closed form over vertex indices. */
struct FamilyState {
  StateTag tag = StateTag::Unchecked;
  std::string label;
  std::function<double(std::size_t)> value;
};

struct FamilyStates {
  std::vector<FamilyState> states;
  std::string certificate;   // why the list is complete, or why it is empty
};

/**
 * The family's complete list of infinite-type states at beta. Infinite-type
 * states satisfy the eigenvector equation at every vertex, so the same list
 * serves both relative scenarios. Betas within 1e-12 of a family's critical
 * value are evaluated at the critical value.
 */
FamilyStates family_states(const FamilySpec& f, double beta);

/**
 * BiInfiniteLine emptiness certificate. Any infinite-type state normalized
 * to 1 at a vertex solves m(i+1) = m(i)/q - m(i-1) outward from that vertex,
 * a two-parameter family; intersecting the nonnegativity constraints out to
 * |i| <= extent leaves an interval of slopes, and the smallest window mass
 * over that interval bounds the vertex's mass in any state from above. An
 * empty interval certifies that no state charges the vertex at all.
 */
struct LineMassCertificate {
  bool feasible = false;
  double t_lo = 0.0;       // slope interval for m(1) with m(0) = 1
  double t_hi = 0.0;
  double bound = 0.0;      // sup of m(center) over candidate states
  std::size_t extent = 0;  // constraints applied for |i| <= extent
};

LineMassCertificate line_mass_bound(double beta, std::size_t window,
                                    std::size_t extension = 1'000'000);

}  // namespace kmsgraph
