#include "kmsgraph/phase.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace kmsgraph {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Loop sum as an extended real: anything not certified finite sits above 1.
double zs_or_inf(const WeightedGraph& g, double beta, std::size_t v) {
  PartitionValues pv = partition_values(g, beta, v);
  return pv.zs.is_finite() ? pv.zs.value : kInf;
}

std::string fmt(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<CriticalBeta> critical_betas(const WeightedGraph& g) {
  std::size_t n = g.vertex_count();
  std::vector<CriticalBeta> out(n);
  for (std::size_t v = 0; v < n; ++v) {
    CriticalBeta cb;
    cb.beta_v = divergence_abscissa(g, v);
    bool on_loop = false;
    for (std::size_t ei : g.out_edges(v)) {
      std::size_t r = g.edges()[ei].dst;
      if (r == v || g.reaches(r, v)) {
        on_loop = true;
        break;
      }
    }
    if (on_loop) {
      // every edge weight exceeds 1, so the loop sum dies off geometrically
      double hi = 1.0;
      while (zs_or_inf(g, hi, v) >= 1.0 && hi < 1e6) hi *= 2.0;
      if (zs_or_inf(g, 0.0, v) >= 1.0) {
        double root = bisect_decreasing(
            [&](double b) { return zs_or_inf(g, b, v); }, 1.0, 0.0, hi);
        cb.beta_crit = root;
        cb.za_finite_at_crit = partition_values(g, root, v).za.is_finite();
      }
    }
    out[v] = cb;
  }
  return out;
}

std::vector<double> beta_grid(double beta_min, double beta_max, double step) {
  if (step <= 0.0) throw Error("sweep step must be positive");
  if (beta_max < beta_min) throw Error("sweep range is empty");
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    double b = beta_min + static_cast<double>(k) * step;
    if (b > beta_max + step * 1e-9) break;
    grid.push_back(std::min(b, beta_max));
  }
  return grid;
}

std::vector<PhaseRow> sweep(const WeightedGraph& g, std::vector<double> grid,
                            const ClassifyOptions& opts) {
  std::vector<double> roots;
  for (const CriticalBeta& cb : critical_betas(g)) {
    if (!cb.beta_crit) continue;
    double r = *cb.beta_crit;
    bool seen = std::any_of(roots.begin(), roots.end(),
                            [r](double x) { return std::abs(x - r) <= kBetaTol; });
    if (!seen) roots.push_back(r);
  }
  struct Point {
    double beta;
    bool critical;
  };
  std::vector<Point> points;
  std::vector<bool> root_used(roots.size(), false);
  for (double b : grid) {
    Point p{b, false};
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (std::abs(b - roots[i]) <= kBetaTol) {
        p = {roots[i], true};
        root_used[i] = true;
        break;
      }
    }
    points.push_back(p);
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (!root_used[i]) points.push_back({roots[i], true});
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const Point& a, const Point& b) { return a.beta < b.beta; });
  std::vector<PhaseRow> rows;
  rows.reserve(points.size());
  for (const Point& p : points) {
    ClassifyOptions o = opts;
    o.at_critical = p.critical;
    SimplexDescription s = simplex(g, p.beta, o);
    PhaseRow row;
    row.beta = p.beta;
    row.at_exact_critical = p.critical;
    row.labels = s.classification.labels;
    row.boundary = s.classification.boundary;
    row.n_fin = s.finite_extremes.size();
    row.n_con = s.conservative_extremes.size();
    row.dis_status = s.dis_status;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string class_label(VertexClass c) {
  switch (c) {
    case VertexClass::Regular: return "Regular";
    case VertexClass::Critical: return "Critical";
    case VertexClass::NonEquivariant: return "NonEquivariant";
  }
  return "?";
}

std::string dis_label(DissipativeStatus s) {
  switch (s) {
    case DissipativeStatus::Empty: return "empty";
    case DissipativeStatus::Unknown: return "unknown";
    case DissipativeStatus::FamilySolved: return "family-solved";
  }
  return "?";
}

std::string sweep_csv(const WeightedGraph& g, const std::vector<PhaseRow>& rows) {
  std::string out = "beta,vertex,class,n_fin,n_con,dis_status,flags\n";
  for (const PhaseRow& row : rows) {
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      out += fmt(row.beta);
      out += ',';
      out += g.vertex_id(v);
      out += ',';
      out += class_label(row.labels[v]);
      out += ',';
      out += std::to_string(row.n_fin);
      out += ',';
      out += std::to_string(row.n_con);
      out += ',';
      out += dis_label(row.dis_status);
      out += ',';
      if (row.boundary[v]) out += "boundary";
      if (row.at_exact_critical) {
        if (row.boundary[v]) out += ';';
        out += "critical-point";
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace kmsgraph
