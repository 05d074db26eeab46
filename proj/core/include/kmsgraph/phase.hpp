#pragma once

#include "kmsgraph/classify.hpp"

namespace kmsgraph {

/** Critical data of one vertex. */
struct CriticalBeta {
  double beta_v = 0.0;              // divergence abscissa of the full series
  std::optional<double> beta_crit;  // root of zs(beta) = 1, when one exists
  bool za_finite_at_crit = false;   // first-hit sum converges at the root
};

/**
 * Per-vertex critical temperatures, indexed like the graph's vertices.
 * beta_crit is located by bisecting the strictly decreasing loop sum against
 * 1 to within 1e-12, treating divergence as above the target; it is absent
 * exactly when no cycle passes through the vertex.
 */
std::vector<CriticalBeta> critical_betas(const WeightedGraph& g);

struct PhaseRow {
  double beta = 0.0;
  bool at_exact_critical = false;   // row sits on a root found by bisection
  std::vector<VertexClass> labels;
  std::vector<bool> boundary;       // per-vertex threshold-band warnings
  std::size_t n_fin = 0;            // finite-type extreme states
  std::size_t n_con = 0;            // conservative critical classes
  DissipativeStatus dis_status = DissipativeStatus::Empty;
};

/** Uniform grid beta_min, beta_min + step, ... capped at beta_max. */
std::vector<double> beta_grid(double beta_min, double beta_max, double step);

/**
 * One row per grid point plus one row at every located critical beta, in
 * increasing beta order. A grid point within 1e-12 of a root is evaluated at
 * the root itself; each row is computed independently of the others, so the
 * output cannot depend on evaluation order.
 */
std::vector<PhaseRow> sweep(const WeightedGraph& g, std::vector<double> grid,
                            const ClassifyOptions& opts = {});

std::string class_label(VertexClass c);
std::string dis_label(DissipativeStatus s);

/** CSV with header beta,vertex,class,n_fin,n_con,dis_status,flags. */
std::string sweep_csv(const WeightedGraph& g, const std::vector<PhaseRow>& rows);

}  // namespace kmsgraph
