#include "kmsgraph/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kmsgraph {

VertexClass classify_partition(const PartitionValues& pv, double tol, bool& boundary) {
  boundary = pv.zs.kind == Finiteness::Boundary || pv.za.kind == Finiteness::Boundary;
  if (pv.za.kind == Finiteness::Finite && pv.zs.kind == Finiteness::Finite) {
    if (pv.zs.value < 1.0 - tol) return VertexClass::Regular;
    if (pv.zs.value <= 1.0 + tol) return VertexClass::Critical;
    return VertexClass::NonEquivariant;
  }
  // zs at the threshold with za infinite: no state can charge the vertex, but
  // the configuration sits on the classification boundary; keep the flag up.
  if (pv.zs.kind == Finiteness::Finite && std::abs(pv.zs.value - 1.0) <= tol &&
      pv.za.kind != Finiteness::Finite)
    boundary = true;
  return VertexClass::NonEquivariant;
}

VertexClassification classify_vertices(const WeightedGraph& g, double beta,
                                       const ClassifyOptions& opts) {
  const std::size_t n = g.vertex_count();
  VertexClassification cls;
  cls.beta = beta;
  cls.labels.resize(n);
  cls.boundary.assign(n, false);
  cls.partitions.resize(n);

  for (std::size_t v = 0; v < n; ++v) {
    cls.partitions[v] = partition_values(g, beta, v, opts.tol);
    bool flag = false;
    cls.labels[v] = classify_partition(cls.partitions[v], opts.tol, flag);
    // A zs within the band of 1 is only a trusted Critical when beta came out
    // of a root finder; at arbitrary beta the label stands but stays flagged.
    if (cls.labels[v] == VertexClass::Critical && !opts.at_critical) flag = true;
    cls.boundary[v] = flag;
  }

  std::vector<bool> assigned(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (cls.labels[v] != VertexClass::Critical || assigned[v]) continue;
    std::vector<std::size_t> klass{v};
    assigned[v] = true;
    for (std::size_t w = v + 1; w < n; ++w)
      if (!assigned[w] && cls.labels[w] == VertexClass::Critical && g.reaches(v, w) &&
          g.reaches(w, v)) {
        klass.push_back(w);
        assigned[w] = true;
      }
    cls.critical_classes.push_back(std::move(klass));
  }
  return cls;
}

StateVector extreme_state(const WeightedGraph& g, double beta, std::size_t v,
                          const ClassifyOptions& opts) {
  PartitionValues pv = partition_values(g, beta, v, opts.tol);
  bool flag = false;
  VertexClass label = classify_partition(pv, opts.tol, flag);
  if (label == VertexClass::NonEquivariant)
    throw NotEquivariantError("vertex '" + g.vertex_id(v) +
                              "' is not equivariant at beta = " + std::to_string(beta));

  std::vector<double> h = first_hit_sums(g, beta, v, opts.tol);
  double za = 0.0;
  for (double x : h) za += x;
  StateVector m;
  m.beta = beta;
  m.tag = label == VertexClass::Regular ? StateTag::FiniteType : StateTag::Conservative;
  m.values.resize(h.size());
  for (std::size_t w = 0; w < h.size(); ++w) m.values[w] = h[w] / za;
  return m;
}

std::vector<double> defect(const WeightedGraph& g, double beta,
                           std::span<const double> m) {
  std::vector<double> s(m.begin(), m.end());
  for (const auto& e : g.edges()) s[e.src] -= std::pow(e.weight, -beta) * m[e.dst];
  return s;
}

MembershipReport check_membership(const WeightedGraph& g, double beta,
                                  std::span<const double> m, double tol_m) {
  MembershipReport rep;
  for (double x : m) rep.mass += x;
  rep.m1_residual = std::abs(rep.mass - 1.0);
  std::vector<double> s = defect(g, beta, m);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.is_relative(v) && std::abs(s[v]) > tol_m) rep.m2_violations.emplace_back(v, s[v]);
    if (s[v] < -tol_m) rep.m3_violations.emplace_back(v, s[v]);
  }
  bool nonneg = std::all_of(m.begin(), m.end(), [&](double x) { return x >= -tol_m; });
  rep.is_member = rep.m1_residual <= tol_m && rep.m2_violations.empty() &&
                  rep.m3_violations.empty() && nonneg;
  return rep;
}

Decomposition decompose(const WeightedGraph& g, double beta, const StateVector& m,
                        const VertexClassification& cls, const ClassifyOptions& opts) {
  MembershipReport rep = check_membership(g, beta, m.values, opts.tol_m);
  if (!rep.is_member)
    throw NotAStateError("decompose requires a state: mass residual " +
                         std::to_string(rep.m1_residual) + ", " +
                         std::to_string(rep.m2_violations.size()) + " equality and " +
                         std::to_string(rep.m3_violations.size()) +
                         " positivity violations");

  Decomposition dec;
  std::vector<double> s = defect(g, beta, m.values);
  std::vector<double> remainder(m.values.begin(), m.values.end());

  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (cls.labels[v] != VertexClass::Regular || g.is_relative(v)) continue;
    const PartitionValues& pv = cls.partitions[v];
    double coeff = pv.za.value / (1.0 - pv.zs.value) * s[v];
    dec.finite_coeffs.emplace_back(v, coeff);
    if (std::abs(coeff) > 0.0) {
      std::vector<double> h = first_hit_sums(g, beta, v, opts.tol);
      double za = 0.0;
      for (double x : h) za += x;
      for (std::size_t w = 0; w < remainder.size(); ++w)
        remainder[w] -= coeff * h[w] / za;
    }
  }

  double total = 0.0;
  for (auto& [v, c] : dec.finite_coeffs) total += c;
  for (std::size_t c = 0; c < cls.critical_classes.size(); ++c) {
    std::size_t rep_v = cls.critical_classes[c].front();
    double coeff = remainder[rep_v] * cls.partitions[rep_v].za.value;
    dec.conservative_coeffs.emplace_back(c, coeff);
    total += coeff;
  }
  dec.residual_mass = 1.0 - total;
  dec.consistent = std::abs(dec.residual_mass) <= opts.tol_m;
  return dec;
}

SimplexDescription simplex(const WeightedGraph& g, double beta,
                           const ClassifyOptions& opts) {
  SimplexDescription sd;
  sd.classification = classify_vertices(g, beta, opts);
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (sd.classification.labels[v] == VertexClass::Regular && !g.is_relative(v))
      sd.finite_extremes.emplace_back(v, extreme_state(g, beta, v, opts));
  for (std::size_t c = 0; c < sd.classification.critical_classes.size(); ++c) {
    std::size_t rep = sd.classification.critical_classes[c].front();
    sd.conservative_extremes.emplace_back(c, extreme_state(g, beta, rep, opts));
  }
  sd.dis_status = DissipativeStatus::Empty;
  sd.dis_reason = "finite graphs carry no wandering infinite paths";
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (beta < divergence_abscissa(g, v) - kBetaTol) sd.no_kms.push_back(v);
  return sd;
}

GroundStates ground_states(const WeightedGraph& g) {
  GroundStates gs;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.is_relative(v)) continue;
    gs.extreme_vertices.push_back(v);
    double a = divergence_abscissa(g, v);
    gs.abscissas.push_back(a);
    gs.kms_infinity.push_back(std::isfinite(a));
  }
  return gs;
}

std::optional<NiceGraphResult> nice_graph_check(const WeightedGraph& g,
                                                std::size_t max_l) {
  const std::size_t n = g.vertex_count();
  if (n == 0) return std::nullopt;
  for (const auto& e : g.edges())
    if (std::abs(e.weight - kDefaultEdgeWeight) > 1e-12) return std::nullopt;

  // counts[w*n+v] = number of length-l paths w -> v, saturating at 2^62.
  constexpr std::uint64_t kSat = 1ull << 62;
  std::vector<std::uint64_t> counts(n * n, 0), next(n * n);
  for (std::size_t w = 0; w < n; ++w) counts[w * n + w] = 1;

  for (std::size_t l = 1; l <= max_l; ++l) {
    std::fill(next.begin(), next.end(), 0);
    for (const auto& e : g.edges())
      for (std::size_t v = 0; v < n; ++v) {
        std::uint64_t add = counts[e.dst * n + v];
        std::uint64_t& cell = next[e.src * n + v];
        cell = cell > kSat - add ? kSat : cell + add;
      }
    counts.swap(next);

    std::uint64_t k = 0;
    bool constant = true;
    for (std::size_t v = 0; v < n && constant; ++v) {
      std::uint64_t col = 0;
      for (std::size_t w = 0; w < n; ++w) {
        std::uint64_t add = counts[w * n + v];
        col = col > kSat - add ? kSat : col + add;
      }
      if (v == 0)
        k = col;
      else if (col != k)
        constant = false;
    }
    if (constant && k >= 1 && k < kSat)
      return NiceGraphResult{k, l, std::log(static_cast<double>(k)) / static_cast<double>(l)};
  }
  return std::nullopt;
}

}  // namespace kmsgraph
