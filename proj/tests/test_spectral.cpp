#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kmsgraph/oracle.hpp"
#include "kmsgraph/spectral.hpp"
#include "helpers.hpp"

using namespace kmsgraph;
using kmstest::o_n;
using kmstest::two_cycle;

namespace {

// Bisect the full transfer matrix Perron root down to the given level. Every
// restriction of the matrix has a radius at most this level at the returned
// beta, which makes truncation tails controllable in the comparisons below.
double beta_with_radius(const WeightedGraph& g, double level) {
  auto rho = [&](double b) { return spectral_radius(transfer_matrix(g, b)); };
  if (rho(0.0) <= level) return 0.0;
  double hi = 1.0;
  while (rho(hi) > level && hi < 1e6) hi *= 2.0;
  return bisect_decreasing(rho, level, 0.0, hi);
}

}  // namespace

TEST_CASE("transfer matrix entries sum parallel edge weights") {
  GraphSpec s;
  s.vertices = {"v0", "v1"};
  s.edges = {{"a", "v0", "v1", 2.0}, {"b", "v0", "v1", 4.0}, {"c", "v1", "v0", 2.0}};
  WeightedGraph g = WeightedGraph::validate(s);
  TransferMatrix m = transfer_matrix(g, 1.0);
  CHECK(m.n == 2);
  CHECK(m.at(0, 1) == doctest::Approx(0.5 + 0.25));
  CHECK(m.at(1, 0) == doctest::Approx(0.5));
  CHECK(m.at(0, 0) == 0.0);
  CHECK(spectral_radius(m) == doctest::Approx(std::sqrt(0.75 * 0.5)));
}

TEST_CASE("spectral radius matches closed forms") {
  CHECK(spectral_radius(transfer_matrix(o_n(3), 0.5)) ==
        doctest::Approx(3.0 * std::exp(-0.5)).epsilon(1e-12));
  // A directed k-cycle has radius e^-beta regardless of k; exercise the
  // power-iteration path with one too large for the dense eigensolve.
  const int k = 100;
  GraphSpec s;
  for (int i = 0; i < k; ++i) s.vertices.push_back("v" + std::to_string(i));
  for (int i = 0; i < k; ++i)
    s.edges.push_back({"e" + std::to_string(i), "v" + std::to_string(i),
                       "v" + std::to_string((i + 1) % k), {}});
  WeightedGraph cycle = WeightedGraph::validate(s);
  CHECK(spectral_radius(transfer_matrix(cycle, 0.7)) ==
        doctest::Approx(std::exp(-0.7)).epsilon(1e-9));
}

TEST_CASE("restricted radius drops forbidden vertices") {
  WeightedGraph g = two_cycle();
  std::vector<std::size_t> only_v0{0};
  CHECK(restricted_radius(g, 1.0, only_v0) == 0.0);
  std::vector<std::size_t> both{0, 1};
  CHECK(restricted_radius(g, 1.0, both) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("partition values classify the three convergence regimes") {
  WeightedGraph g = o_n(2);
  double crit = std::numbers::ln2;
  PartitionValues lo = partition_values(g, 0.9 * crit, 0);
  CHECK(lo.zs.kind == Finiteness::Finite);   // a single first return always sums
  CHECK(lo.z.kind == Finiteness::Divergent);
  PartitionValues hi = partition_values(g, 1.1 * crit, 0);
  REQUIRE(hi.z.is_finite());
  double q = 2.0 * std::exp(-1.1 * crit);
  CHECK(hi.z.value == doctest::Approx(1.0 / (1.0 - q)).epsilon(1e-12));
  PartitionValues at = partition_values(g, crit, 0);
  REQUIRE(at.zs.is_finite());   // two simple loops always sum
  CHECK(at.zs.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(at.z.kind == Finiteness::Boundary);
}

TEST_CASE("matrix engine agrees with the truncated oracle") {
  std::mt19937_64 rng(404);
  kmstest::RandomGraphOptions opt;
  for (int trial = 0; trial < 40; ++trial) {
    WeightedGraph g = kmstest::random_graph(rng, opt);
    double base = beta_with_radius(g, 0.6);
    std::uniform_real_distribution<double> scale(1.0, 2.0);
    double beta = base * scale(rng) + 0.1;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      PartitionValues pv = partition_values(g, beta, v);
      REQUIRE(pv.zs.is_finite());
      REQUIRE(pv.za.is_finite());
      REQUIRE(pv.z.is_finite());
      TruncatedPartition tp = oracle_partition(g, v, beta, 60);
      CHECK(pv.zs.value == doctest::Approx(tp.zs).epsilon(1e-8));
      CHECK(pv.za.value == doctest::Approx(tp.za).epsilon(1e-8));
      CHECK(pv.z.value == doctest::Approx(tp.z).epsilon(1e-8));
      // Factorization against an elimination solve that shares nothing with
      // the two-series route inside partition_values.
      double direct = kmstest::solve_z_direct(g, beta, v);
      CHECK(pv.z.value == doctest::Approx(direct).epsilon(1e-10));
      CHECK(pv.z.value ==
            doctest::Approx(pv.za.value / (1.0 - pv.zs.value)).epsilon(1e-10));
    }
  }
}

TEST_CASE("series are monotone in beta and finiteness moves upward") {
  std::mt19937_64 rng(505);
  kmstest::RandomGraphOptions opt;
  opt.max_vertices = 6;
  for (int trial = 0; trial < 25; ++trial) {
    WeightedGraph g = kmstest::random_graph(rng, opt);
    std::uniform_real_distribution<double> pick(0.05, 3.0);
    double b1 = pick(rng), b2 = pick(rng);
    if (b1 > b2) std::swap(b1, b2);
    b2 += 0.1;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      PartitionValues p1 = partition_values(g, b1, v);
      PartitionValues p2 = partition_values(g, b2, v);
      if (p1.zs.is_finite() && p2.zs.is_finite())
        CHECK(p2.zs.value <= p1.zs.value + 1e-12);
      if (p1.z.is_finite()) {
        // Convergence at a lower beta persists at every higher one.
        CHECK(p2.z.kind != Finiteness::Divergent);
        if (p2.z.is_finite()) CHECK(p2.z.value <= p1.z.value + 1e-9);
      }
    }
  }
}

TEST_CASE("divergence abscissa separates the convergence regimes") {
  WeightedGraph g3 = o_n(3);
  double b = divergence_abscissa(g3, 0);
  CHECK(b == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(partition_values(g3, b + 0.05, 0).z.is_finite());
  CHECK(partition_values(g3, b - 0.05, 0).z.kind == Finiteness::Divergent);

  // Two cycle edges weigh e each, so Z converges exactly above beta = 0.
  WeightedGraph g = two_cycle();
  CHECK(divergence_abscissa(g, 0) == doctest::Approx(0.0).epsilon(1e-10));

  WeightedGraph iso = kmstest::edgeless(1);
  CHECK(divergence_abscissa(iso, 0) == 0.0);
}

TEST_CASE("abscissa coincides with the restricted radius crossing") {
  std::mt19937_64 rng(606);
  kmstest::RandomGraphOptions opt;
  opt.max_vertices = 6;
  opt.extra_edge_factor = 1.3;
  for (int trial = 0; trial < 20; ++trial) {
    WeightedGraph g = kmstest::random_graph(rng, opt);
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      double b = divergence_abscissa(g, v);
      std::vector<std::size_t> anc;
      for (std::size_t w = 0; w < g.vertex_count(); ++w)
        if (g.reaches(w, v)) anc.push_back(w);
      if (b == 0.0) {
        CHECK(restricted_radius(g, 0.0, anc) <= 1.0 + 1e-9);
      } else {
        CHECK(restricted_radius(g, b - 0.05, anc) > 1.0);
        CHECK(restricted_radius(g, b + 0.05, anc) < 1.0);
      }
    }
  }
}

TEST_CASE("first hit sums feed the factorization identity") {
  WeightedGraph g = two_cycle();
  std::vector<double> h = first_hit_sums(g, 1.0, 0);
  REQUIRE(h.size() == 2);
  CHECK(h[0] == 1.0);
  CHECK(h[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // First hits avoid the target in their interior, so the loop through v0
  // never governs: the sums stay finite even at beta = 0.
  CHECK(first_hit_sums(g, 0.0, 0)[1] == doctest::Approx(1.0).epsilon(1e-12));

  // A loop that dodges the target does govern and can sit at radius one.
  GraphSpec s;
  s.vertices = {"u", "v"};
  s.edges = {{"l", "u", "u", {}}, {"c", "u", "v", {}}};
  WeightedGraph funnel = WeightedGraph::validate(s);
  std::vector<double> hv = first_hit_sums(funnel, 1.0, 1);
  double q = std::exp(-1.0);
  CHECK(hv[0] == doctest::Approx(q / (1.0 - q)).epsilon(1e-12));
  CHECK_THROWS_AS(first_hit_sums(funnel, 0.0, 1), SingularSolveError);
}

TEST_CASE("combine partition propagates divergence and boundary bands") {
  ExtReal z = combine_partition(ExtReal::finite(0.5), ExtReal::finite(2.0));
  REQUIRE(z.is_finite());
  CHECK(z.value == doctest::Approx(4.0));
  CHECK(combine_partition(ExtReal::divergent(), ExtReal::finite(1.0)).kind ==
        Finiteness::Divergent);
  CHECK(combine_partition(ExtReal::finite(0.5), ExtReal::divergent()).kind ==
        Finiteness::Divergent);
  CHECK(combine_partition(ExtReal::finite(1.0), ExtReal::finite(1.0)).kind ==
        Finiteness::Boundary);
  CHECK(combine_partition(ExtReal::boundary(), ExtReal::finite(1.0)).kind ==
        Finiteness::Boundary);
}

TEST_CASE("bisection finds roots of decreasing maps") {
  double r = bisect_decreasing([](double x) { return 10.0 - x; }, 4.0, 0.0, 20.0);
  CHECK(r == doctest::Approx(6.0).epsilon(1e-10));
}
