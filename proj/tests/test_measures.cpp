#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kmsgraph/measures.hpp"
#include "kmsgraph/oracle.hpp"
#include "helpers.hpp"

using namespace kmsgraph;
using kmstest::two_cycle;

namespace {

double beta_with_radius(const WeightedGraph& g, double level) {
  auto rho = [&](double b) { return spectral_radius(transfer_matrix(g, b)); };
  if (rho(0.0) <= level) return 0.0;
  double hi = 1.0;
  while (rho(hi) > level && hi < 1e6) hi *= 2.0;
  return bisect_decreasing(rho, level, 0.0, hi);
}

WeightedGraph funnel(bool relative_u) {
  GraphSpec s;
  s.vertices = {"u", "v"};
  s.edges = {{"l", "u", "u", {}}, {"c", "u", "v", {}}};
  if (relative_u) s.relative_set = {"u"};
  return WeightedGraph::validate(s);
}

}  // namespace

TEST_CASE("cylinder masses on the two cycle") {
  WeightedGraph g = two_cycle();
  double q = std::exp(-1.0);
  StateVector m = extreme_state(g, 1.0, 0);
  // Normalized first hit sums into v0 are (1, q) / (1 + q).
  CHECK(m.values[0] == doctest::Approx(1.0 / (1.0 + q)).epsilon(1e-12));
  std::vector<std::size_t> a{0};
  CHECK(cylinder_mass(g, 1.0, m.values, a) ==
        doctest::Approx(q * m.values[1]).epsilon(1e-12));
  CHECK(cylinder_mass_at_vertex(m.values, 1) == m.values[1]);
  std::vector<std::size_t> aa{0, 0};
  CHECK_THROWS_AS(cylinder_mass(g, 1.0, m.values, aa), InvalidPathError);
}

TEST_CASE("cylinders split over extensions exactly where the defect vanishes") {
  std::mt19937_64 rng(808);
  kmstest::RandomGraphOptions opt;
  opt.max_vertices = 6;
  opt.extra_edge_factor = 1.2;
  for (int trial = 0; trial < 12; ++trial) {
    WeightedGraph g = kmstest::random_graph(rng, opt);
    double beta = beta_with_radius(g, 0.6) + 0.2;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      StateVector m = extreme_state(g, beta, v);
      std::vector<double> s = defect(g, beta, m.values);
      for (std::size_t w = 0; w < g.vertex_count(); ++w) {
        PathQuery query;
        query.target = w;
        query.selector = PathClass::AllEndingAt;
        query.max_len = 3;
        for (const EnumeratedPath& p : enumerate_paths(g, query)) {
          if (g.out_edges(w).empty()) continue;
          double whole = p.edges.empty()
                             ? cylinder_mass_at_vertex(m.values, w)
                             : cylinder_mass(g, beta, m.values, p.edges);
          double split = 0.0;
          for (std::size_t ei : g.out_edges(w)) {
            std::vector<std::size_t> ext = p.edges;
            ext.push_back(ei);
            split += cylinder_mass(g, beta, m.values, ext);
          }
          double gap = whole - split;
          if (std::abs(s[w]) < 1e-10) {
            CHECK(std::abs(gap) < 1e-10);
          } else {
            // The gap is exactly the atom of the path's boundary point.
            double atom = p.edges.empty()
                              ? atom_mass_at_vertex(g, beta, m.values, w)
                              : atom_mass(g, beta, m.values, p.edges);
            CHECK(gap == doctest::Approx(atom).epsilon(1e-10));
            CHECK(gap > 0.0);
          }
        }
      }
    }
  }
}

TEST_CASE("cylinder masses scale by the prefix weight") {
  std::mt19937_64 rng(818);
  kmstest::RandomGraphOptions opt;
  opt.extra_edge_factor = 1.5;
  std::size_t pairs = 0;
  for (int trial = 0; trial < 10 && pairs < 1000; ++trial) {
    WeightedGraph g = kmstest::random_graph(rng, opt);
    double beta = beta_with_radius(g, 0.7) + 0.1;
    StateVector m = extreme_state(g, beta, 0);
    std::uniform_int_distribution<std::size_t> len(1, 4);
    std::uniform_int_distribution<std::size_t> start(0, g.vertex_count() - 1);
    for (int attempt = 0; attempt < 400 && pairs < 1000; ++attempt) {
      std::vector<std::size_t> u, w;
      std::size_t cur = start(rng);
      auto walk = [&](std::vector<std::size_t>& path, std::size_t steps) {
        for (std::size_t i = 0; i < steps; ++i) {
          const auto& out = g.out_edges(cur);
          if (out.empty()) return;
          std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
          std::size_t ei = out[pick(rng)];
          path.push_back(ei);
          cur = g.edges()[ei].dst;
        }
      };
      walk(u, len(rng));
      if (u.empty()) continue;
      walk(w, len(rng));
      std::vector<std::size_t> uw = u;
      uw.insert(uw.end(), w.begin(), w.end());
      double tail = w.empty() ? cylinder_mass_at_vertex(m.values, cur)
                              : cylinder_mass(g, beta, m.values, w);
      double lhs = cylinder_mass(g, beta, m.values, uw);
      double rhs = std::pow(path_weight(g, u), -beta) * tail;
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      ++pairs;
    }
  }
  CHECK(pairs >= 1000);
}

TEST_CASE("atoms over extensions recover the cylinder of a finite type state") {
  WeightedGraph g = funnel(false);
  double beta = 1.0;
  double q = std::exp(-beta);
  StateVector m = extreme_state(g, beta, 1);

  // Boundary points inside the cylinder of the empty path at u are the
  // paths l^k c; their atoms form a geometric series converging to m(u).
  double sum = atom_mass_at_vertex(g, beta, m.values, 0);
  CHECK(std::abs(sum) < 1e-14);   // the defect vanishes away from v
  PathQuery query;
  query.target = 1;
  query.selector = PathClass::AllEndingAt;
  query.max_len = 30;
  for (const EnumeratedPath& p : enumerate_paths(g, query))
    if (!p.edges.empty()) sum += atom_mass(g, beta, m.values, p.edges);
  CHECK(sum == doctest::Approx(m.values[0]).epsilon(1e-10));

  CHECK(finite_mass(g, beta, m.values, 30) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("relative ranges admit no atoms") {
  WeightedGraph g = funnel(true);
  StateVector m = extreme_state(g, 1.0, 1);
  CHECK_THROWS_AS(atom_mass_at_vertex(g, 1.0, m.values, 0), NotBoundaryPathError);
  std::vector<std::size_t> loop{0};
  CHECK_THROWS_AS(atom_mass(g, 1.0, m.values, loop), NotBoundaryPathError);
  std::vector<std::size_t> exit{1};
  CHECK_NOTHROW(atom_mass(g, 1.0, m.values, exit));
  // Relative vertices never contribute to the finite part either.
  CHECK(finite_mass(g, 1.0, m.values, 30) ==
        doctest::Approx(1.0).epsilon(1e-10));
}
