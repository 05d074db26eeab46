#include "kmsgraph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace kmsgraph {

namespace {

Eigen::MatrixXd to_eigen(const TransferMatrix& m) {
  Eigen::MatrixXd a(m.n, m.n);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) a(i, j) = m.at(i, j);
  return a;
}

double radius_by_eigensolve(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw SingularSolveError("eigensolver failed to converge on a " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " matrix");
  double rho = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    rho = std::max(rho, std::abs(es.eigenvalues()[i]));
  return rho;
}

// Collatz-Wielandt bracketing on the +I shift: for x > 0 and y = (A + I)x,
// min y_i/x_i <= rho(A) + 1 <= max y_i/x_i. The shift keeps x strictly
// positive and removes rotation from periodic spectra.
std::optional<double> radius_by_power_iteration(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd y = a * x + x;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = y[i] / x[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (hi - lo <= 1e-13 * std::max(1.0, hi)) return 0.5 * (lo + hi) - 1.0;
    x = y / y.lpNorm<1>();
  }
  return std::nullopt;
}

double radius(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  if (a.rows() <= 64) return radius_by_eigensolve(a);
  if (auto r = radius_by_power_iteration(a)) return *r;
  return radius_by_eigensolve(a);
}

Eigen::MatrixXd restricted(const WeightedGraph& g, double beta,
                           std::span<const std::size_t> subset) {
  const std::size_t k = subset.size();
  std::vector<std::ptrdiff_t> pos(g.vertex_count(), -1);
  for (std::size_t i = 0; i < k; ++i) pos[subset[i]] = static_cast<std::ptrdiff_t>(i);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  for (const auto& e : g.edges())
    if (pos[e.src] >= 0 && pos[e.dst] >= 0)
      a(pos[e.src], pos[e.dst]) += std::pow(e.weight, -beta);
  return a;
}

// Gaussian elimination with partial pivoting in 80-bit extended precision.
std::optional<std::vector<long double>> solve_extended(std::vector<long double> a,
                                                       std::vector<long double> b,
                                                       std::size_t n) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (a[piv * n + col] == 0.0L) return std::nullopt;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      long double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0L) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<long double> x(n, 0.0L);
  for (std::size_t ri = n; ri-- > 0;) {
    long double s = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri * n + c] * x[c];
    x[ri] = s / a[ri * n + ri];
  }
  for (long double v : x)
    if (!std::isfinite(static_cast<double>(v))) return std::nullopt;
  return x;
}

// Solve (I - B) x = rhs given rho(B) certified < 1. Double LU plus long
// double residual refinement; a large correction signals conditioning past
// ~1e12 and reroutes the whole solve to extended precision.
Eigen::VectorXd solve_neumann(const Eigen::MatrixXd& bhat, const Eigen::VectorXd& rhs) {
  const Eigen::Index n = bhat.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - bhat;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  Eigen::VectorXd x = lu.solve(rhs);

  auto residual = [&](const Eigen::VectorXd& sol) {
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      long double acc = static_cast<long double>(rhs[i]);
      for (Eigen::Index j = 0; j < n; ++j)
        acc -= static_cast<long double>(m(i, j)) * static_cast<long double>(sol[j]);
      r[i] = static_cast<double>(acc);
    }
    return r;
  };

  bool bad = !x.allFinite();
  if (!bad) {
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd dx = lu.solve(residual(x));
      if (!dx.allFinite()) { bad = true; break; }
      x += dx;
      double rel = dx.norm() / std::max(1.0, x.norm());
      if (rel > 1e-4) bad = true;          // conditioning beyond ~1e12
      if (rel < 1e-15 || bad) break;
    }
  }
  if (bad) {
    std::vector<long double> a(static_cast<std::size_t>(n) * n);
    std::vector<long double> b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      b[i] = rhs[i];
      for (Eigen::Index j = 0; j < n; ++j) a[i * n + j] = m(i, j);
    }
    auto sol = solve_extended(std::move(a), std::move(b), n);
    if (!sol) throw SingularSolveError("linear solve for a Neumann series is singular");
    for (Eigen::Index i = 0; i < n; ++i) x[i] = static_cast<double>((*sol)[i]);
  }
  double resid = residual(x).lpNorm<Eigen::Infinity>();
  if (!x.allFinite() || resid > 1e-8 * std::max(1.0, x.lpNorm<Eigen::Infinity>()))
    throw SingularSolveError("linear solve residual " + std::to_string(resid) +
                             " is not trustworthy");
  return x;
}

std::vector<std::size_t> proper_ancestors(const WeightedGraph& g, std::size_t v) {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < g.vertex_count(); ++w)
    if (w != v && g.reaches(w, v)) out.push_back(w);
  return out;
}

}  // namespace

TransferMatrix transfer_matrix(const WeightedGraph& g, double beta) {
  TransferMatrix m;
  m.n = g.vertex_count();
  m.a.assign(m.n * m.n, 0.0);
  for (const auto& e : g.edges()) m.at(e.src, e.dst) += std::pow(e.weight, -beta);
  return m;
}

double spectral_radius(const TransferMatrix& m) { return radius(to_eigen(m)); }

double restricted_radius(const WeightedGraph& g, double beta,
                         std::span<const std::size_t> subset) {
  return radius(restricted(g, beta, subset));
}

PartitionValues partition_values(const WeightedGraph& g, double beta, std::size_t v,
                                 double tol) {
  PartitionValues pv;

  double self = 0.0;   // length-1 loops at v
  for (std::size_t e : g.out_edges(v))
    if (g.edges()[e].dst == v) self += std::pow(g.edges()[e].weight, -beta);

  const auto anc = proper_ancestors(g, v);
  std::vector<std::size_t> mutual;   // ancestors v can also reach
  for (std::size_t w : anc)
    if (g.reaches(v, w)) mutual.push_back(w);

  // zs: simple loops run inside the mutual-reachability set.
  if (mutual.empty()) {
    pv.zs = ExtReal::finite(self);
  } else {
    Eigen::MatrixXd bhat = restricted(g, beta, mutual);
    double rho = radius(bhat);
    if (rho > 1.0 + tol) {
      pv.zs = ExtReal::divergent();
    } else if (rho >= 1.0 - tol) {
      pv.zs = ExtReal::boundary();
    } else {
      std::vector<std::ptrdiff_t> pos(g.vertex_count(), -1);
      for (std::size_t i = 0; i < mutual.size(); ++i) pos[mutual[i]] = i;
      Eigen::VectorXd into_v = Eigen::VectorXd::Zero(mutual.size());
      Eigen::VectorXd from_v = Eigen::VectorXd::Zero(mutual.size());
      for (const auto& e : g.edges()) {
        if (e.dst == v && pos[e.src] >= 0) into_v[pos[e.src]] += std::pow(e.weight, -beta);
        if (e.src == v && pos[e.dst] >= 0) from_v[pos[e.dst]] += std::pow(e.weight, -beta);
      }
      Eigen::VectorXd x = solve_neumann(bhat, into_v);
      pv.zs = ExtReal::finite(self + from_v.dot(x));
    }
  }

  // za: first-hit paths run inside the full proper-ancestor set.
  if (anc.empty()) {
    pv.za = ExtReal::finite(1.0);
  } else {
    Eigen::MatrixXd bhat = restricted(g, beta, anc);
    double rho = radius(bhat);
    if (rho > 1.0 + tol) {
      pv.za = ExtReal::divergent();
    } else if (rho >= 1.0 - tol) {
      pv.za = ExtReal::boundary();
    } else {
      std::vector<std::ptrdiff_t> pos(g.vertex_count(), -1);
      for (std::size_t i = 0; i < anc.size(); ++i) pos[anc[i]] = i;
      Eigen::VectorXd into_v = Eigen::VectorXd::Zero(anc.size());
      for (const auto& e : g.edges())
        if (e.dst == v && pos[e.src] >= 0) into_v[pos[e.src]] += std::pow(e.weight, -beta);
      Eigen::VectorXd x = solve_neumann(bhat, into_v);
      pv.za = ExtReal::finite(1.0 + x.sum());
    }
  }

  pv.z = combine_partition(pv.zs, pv.za, tol);
  return pv;
}

ExtReal combine_partition(const ExtReal& zs, const ExtReal& za, double tol) {
  if (za.kind == Finiteness::Divergent || zs.kind == Finiteness::Divergent) {
    return ExtReal::divergent();
  }
  if (za.kind == Finiteness::Boundary || zs.kind == Finiteness::Boundary) {
    return ExtReal::boundary();
  }
  if (zs.value > 1.0 + tol) return ExtReal::divergent();
  if (zs.value >= 1.0 - tol) return ExtReal::boundary();
  return ExtReal::finite(za.value / (1.0 - zs.value));
}

double divergence_abscissa(const WeightedGraph& g, std::size_t v) {
  std::vector<std::size_t> anc = proper_ancestors(g, v);
  anc.push_back(v);
  std::sort(anc.begin(), anc.end());
  auto rho = [&](double beta) { return radius(restricted(g, beta, anc)); };
  if (rho(0.0) <= 1.0) return 0.0;
  double hi = 1.0;
  while (rho(hi) >= 1.0) {
    hi *= 2.0;
    if (hi > 1e6) throw Error("divergence abscissa bracket failed to close");
  }
  return bisect_decreasing(rho, 1.0, 0.0, hi);
}

std::vector<double> first_hit_sums(const WeightedGraph& g, double beta, std::size_t v,
                                   double tol) {
  const auto anc = proper_ancestors(g, v);
  std::vector<double> sums(g.vertex_count(), 0.0);
  sums[v] = 1.0;
  if (anc.empty()) return sums;

  Eigen::MatrixXd bhat = restricted(g, beta, anc);
  double rho = radius(bhat);
  if (rho >= 1.0 - tol)
    throw SingularSolveError(
        "first-hit sums requested where the governing spectral radius is " +
        std::to_string(rho));
  std::vector<std::ptrdiff_t> pos(g.vertex_count(), -1);
  for (std::size_t i = 0; i < anc.size(); ++i) pos[anc[i]] = i;
  Eigen::VectorXd into_v = Eigen::VectorXd::Zero(anc.size());
  for (const auto& e : g.edges())
    if (e.dst == v && pos[e.src] >= 0) into_v[pos[e.src]] += std::pow(e.weight, -beta);
  Eigen::VectorXd x = solve_neumann(bhat, into_v);
  for (std::size_t i = 0; i < anc.size(); ++i) sums[anc[i]] = x[i];
  return sums;
}

double bisect_decreasing(const std::function<double(double)>& f, double target,
                         double lo, double hi, double beta_tol) {
  // Invariant kept: f(lo) >= target >= f(hi); lo may sit exactly on the root.
  while (hi - lo > beta_tol) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) >= target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace kmsgraph
