#include "kmsgraph/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kmsgraph {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool near(double beta, double target) { return std::abs(beta - target) <= kBetaTol; }

// sum_{j=0}^{k} r^j
double geom_sum(double r, std::size_t k) {
  if (std::abs(r - 1.0) < 1e-12) return static_cast<double>(k + 1);
  return (std::pow(r, static_cast<double>(k) + 1.0) - 1.0) / (r - 1.0);
}

long long line_position(std::size_t k) {
  return (k % 2 == 1) ? static_cast<long long>((k + 1) / 2)
                      : -static_cast<long long>(k / 2);
}

std::string vid(long long i) { return "v" + std::to_string(i); }

void require_single_vertex(const FamilySpec& f, std::size_t v) {
  if (v != 0) throw Error(family_name(f.kind) + " has a single vertex; index must be 0");
}

void require_branching(const FamilySpec& f) {
  if ((f.kind == FamilyKind::TailOn || f.kind == FamilyKind::On) && f.n < 2) {
    throw Error(family_name(f.kind) + " requires branching parameter n >= 2");
  }
}

}  // namespace

FamilySpec parse_family(const std::string& name, std::size_t n,
                        RelativeScenario scenario) {
  FamilySpec f;
  f.n = n;
  f.scenario = scenario;
  if (name == "hub") {
    f.kind = FamilyKind::Hub;
  } else if (name == "bi-infinite-line" || name == "line") {
    f.kind = FamilyKind::BiInfiniteLine;
  } else if (name == "binary-ray") {
    f.kind = FamilyKind::BinaryRay;
  } else if (name == "loop-ray") {
    f.kind = FamilyKind::LoopRay;
  } else if (name == "double-loop-ray") {
    f.kind = FamilyKind::DoubleLoopRay;
  } else if (name == "tail-on") {
    f.kind = FamilyKind::TailOn;
  } else if (name == "on") {
    f.kind = FamilyKind::On;
  } else if (name == "o-infinity" || name == "o-inf") {
    f.kind = FamilyKind::OInfinity;
  } else {
    throw Error("unknown family: " + name);
  }
  require_branching(f);
  return f;
}

std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Hub: return "hub";
    case FamilyKind::BiInfiniteLine: return "bi-infinite-line";
    case FamilyKind::BinaryRay: return "binary-ray";
    case FamilyKind::LoopRay: return "loop-ray";
    case FamilyKind::DoubleLoopRay: return "double-loop-ray";
    case FamilyKind::TailOn: return "tail-on";
    case FamilyKind::On: return "on";
    case FamilyKind::OInfinity: return "o-infinity";
  }
  return "?";
}

WeightedGraph truncate(const FamilySpec& f, std::size_t depth) {
  if (depth == 0) throw Error("family truncation needs depth >= 1");
  require_branching(f);
  GraphSpec s;
  switch (f.kind) {
    case FamilyKind::Hub: {
      for (std::size_t k = 0; k < depth; ++k) s.vertices.push_back(vid(k));
      s.edges.push_back({"e0", "v0", "v0", {}});
      for (std::size_t k = 1; k < depth; ++k) {
        s.edges.push_back({"e" + std::to_string(k), "v0", vid(k), {}});
      }
      for (std::size_t k = 1; k < depth; ++k) {
        s.edges.push_back({"f" + std::to_string(k - 1), vid(k), vid(k - 1), {}});
      }
      break;
    }
    case FamilyKind::BiInfiniteLine: {
      long long lo = 0, hi = 0;
      for (std::size_t k = 0; k < depth; ++k) {
        long long p = line_position(k);
        s.vertices.push_back(vid(p));
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
      for (long long i = lo; i < hi; ++i) {
        s.edges.push_back({"e" + std::to_string(i), vid(i), vid(i + 1), {}});
      }
      for (long long i = lo; i < hi; ++i) {
        s.edges.push_back({"f" + std::to_string(i), vid(i + 1), vid(i), {}});
      }
      break;
    }
    case FamilyKind::BinaryRay: {
      for (std::size_t k = 0; k < depth; ++k) s.vertices.push_back(vid(k));
      for (std::size_t k = 0; k + 1 < depth; ++k) {
        s.edges.push_back({"e" + std::to_string(k), vid(k), vid(k + 1), {}});
        s.edges.push_back({"f" + std::to_string(k), vid(k), vid(k + 1), {}});
      }
      break;
    }
    case FamilyKind::LoopRay:
    case FamilyKind::DoubleLoopRay: {
      for (std::size_t k = 0; k < depth; ++k) s.vertices.push_back(vid(k));
      for (std::size_t k = 0; k < depth; ++k) {
        s.edges.push_back({"e" + std::to_string(k), vid(k), vid(k), {}});
      }
      if (f.kind == FamilyKind::DoubleLoopRay) {
        s.edges.push_back({"d0", "v0", "v0", {}});
      }
      for (std::size_t k = 0; k + 1 < depth; ++k) {
        s.edges.push_back({"f" + std::to_string(k), vid(k), vid(k + 1), {}});
      }
      break;
    }
    case FamilyKind::TailOn: {
      for (std::size_t k = 1; k <= depth; ++k) s.vertices.push_back(vid(k));
      for (std::size_t j = 1; j <= f.n; ++j) {
        s.edges.push_back({"e" + std::to_string(j), "v1", "v1", {}});
      }
      for (std::size_t k = 1; k < depth; ++k) {
        s.edges.push_back({"f" + std::to_string(k), vid(k + 1), vid(k), {}});
      }
      break;
    }
    case FamilyKind::On: {
      s.vertices.push_back("v");
      for (std::size_t j = 1; j <= f.n; ++j) {
        s.edges.push_back({"e" + std::to_string(j), "v", "v", {}});
      }
      break;
    }
    case FamilyKind::OInfinity: {
      s.vertices.push_back("v");
      for (std::size_t j = 1; j <= depth; ++j) {  // depth counts loops here
        s.edges.push_back({"e" + std::to_string(j), "v", "v", {}});
      }
      break;
    }
  }
  if (f.scenario == RelativeScenario::Full) {
    std::unordered_map<std::string, std::size_t> outdeg;
    for (const EdgeSpec& e : s.edges) ++outdeg[e.src];
    for (std::size_t k = 0; k < s.vertices.size(); ++k) {
      if (family_vertex_relative(f, k) && outdeg[s.vertices[k]] > 0) {
        s.relative_set.push_back(s.vertices[k]);
      }
    }
  }
  return WeightedGraph::validate(s);
}

bool family_vertex_relative(const FamilySpec& f, std::size_t v) {
  if (f.scenario == RelativeScenario::Toeplitz) return false;
  switch (f.kind) {
    case FamilyKind::Hub: return v >= 1;     // the hub vertex emits infinitely
    case FamilyKind::OInfinity: return false;
    default: return true;
  }
}

PartitionValues analytic_partitions(const FamilySpec& f, std::size_t v, double beta) {
  if (beta < 0) throw Error("beta must be nonnegative");
  require_branching(f);
  const double q = std::exp(-beta);
  const double ln2 = std::numbers::ln2;
  PartitionValues pv;
  switch (f.kind) {
    case FamilyKind::Hub: {
      pv.beta_v = ln2;
      if (beta == 0.0) {
        pv.zs = ExtReal::divergent();
        pv.za = ExtReal::divergent();
        break;
      }
      if (v == 0) {
        pv.zs = ExtReal::finite(q / (1.0 - q));
        pv.za = ExtReal::finite(1.0 / (1.0 - q));
        break;
      }
      // A loop at spoke v_n descends to the hub, circles it through spokes
      // below n only (descents from higher spokes hit v_n and end the loop),
      // then first-hits v_n either by the direct jump or through any higher
      // spoke. Wander weight per hub return: w = q (1 - q^n) / (1 - q);
      // first-hit ascent weight: q / (1 - q). Everything collapses to
      //   zs = q^(n+1) / (1 - 2q + q^(n+1)).
      double qn = std::pow(q, static_cast<double>(v));
      double w = q * (1.0 - qn) / (1.0 - q);
      if (w >= 1.0) {
        pv.zs = ExtReal::divergent();
        pv.za = ExtReal::divergent();
      } else {
        double denom = 1.0 - 2.0 * q + q * qn;   // (1 - w)(1 - q)
        pv.zs = ExtReal::finite(q * qn / denom);
        // First hits: the empty path, pure descents from above, and paths
        // that reach the hub from below n, wander, and ascend.
        pv.za = ExtReal::finite(1.0 + q / (1.0 - q) +
                                q * (1.0 - qn) / ((1.0 - q) * denom));
      }
      break;
    }
    case FamilyKind::BiInfiniteLine: {
      pv.beta_v = ln2;
      if (beta > ln2 + kBetaTol) {
        double s = std::sqrt(1.0 - 4.0 * q * q);
        double first_passage = (1.0 - s) / (2.0 * q);
        pv.zs = ExtReal::finite(1.0 - s);
        pv.za = ExtReal::finite(1.0 + 2.0 * first_passage / (1.0 - first_passage));
      } else if (beta >= ln2 - kBetaTol) {
        pv.zs = ExtReal::finite(1.0);
        pv.za = ExtReal::divergent();
      } else {
        pv.zs = ExtReal::divergent();
        pv.za = ExtReal::divergent();
      }
      break;
    }
    case FamilyKind::BinaryRay: {
      pv.beta_v = 0.0;
      pv.zs = ExtReal::finite(0.0);
      pv.za = ExtReal::finite(geom_sum(2.0 * q, v));
      break;
    }
    case FamilyKind::LoopRay: {
      pv.beta_v = 0.0;
      if (beta == 0.0) {
        pv.zs = ExtReal::finite(1.0);
        pv.za = (v == 0) ? ExtReal::finite(1.0) : ExtReal::divergent();
      } else {
        pv.zs = ExtReal::finite(q);
        pv.za = ExtReal::finite(geom_sum(q / (1.0 - q), v));
      }
      break;
    }
    case FamilyKind::DoubleLoopRay: {
      pv.beta_v = ln2;
      if (v == 0) {
        pv.zs = ExtReal::finite(2.0 * q);
        pv.za = ExtReal::finite(1.0);
      } else {
        pv.zs = ExtReal::finite(q);
        if (beta > ln2 + kBetaTol) {
          double a = q / (1.0 - q);
          pv.za = ExtReal::finite(
              1.0 + (geom_sum(a, v - 1) - 1.0) +
              std::pow(q, static_cast<double>(v)) /
                  ((1.0 - 2.0 * q) * std::pow(1.0 - q, static_cast<double>(v) - 1.0)));
        } else {
          pv.za = ExtReal::divergent();  // the double loop pumps the hit sums
        }
      }
      break;
    }
    case FamilyKind::TailOn: {
      double nd = static_cast<double>(f.n);
      if (v == 0) {
        pv.beta_v = std::log(nd);
        pv.zs = ExtReal::finite(nd * q);
      } else {
        pv.beta_v = 0.0;
        pv.zs = ExtReal::finite(0.0);
      }
      pv.za = (beta == 0.0) ? ExtReal::divergent() : ExtReal::finite(1.0 / (1.0 - q));
      break;
    }
    case FamilyKind::On: {
      require_single_vertex(f, v);
      pv.beta_v = std::log(static_cast<double>(f.n));
      pv.zs = ExtReal::finite(static_cast<double>(f.n) * q);
      pv.za = ExtReal::finite(1.0);
      break;
    }
    case FamilyKind::OInfinity: {
      require_single_vertex(f, v);
      pv.beta_v = kInf;
      pv.zs = ExtReal::divergent();
      pv.za = ExtReal::finite(1.0);
      break;
    }
  }
  pv.z = combine_partition(pv.zs, pv.za);
  // closed forms are exact: a loop sum of exactly 1 makes z a true divergence
  if (pv.zs.kind == Finiteness::Finite && pv.zs.value == 1.0 &&
      pv.z.kind == Finiteness::Boundary) {
    pv.z = ExtReal::divergent();
  }
  return pv;
}

double analytic_divergence_abscissa(const FamilySpec& f, std::size_t v) {
  require_branching(f);
  switch (f.kind) {
    case FamilyKind::Hub:
    case FamilyKind::BiInfiniteLine:
    case FamilyKind::DoubleLoopRay:
      return std::numbers::ln2;
    case FamilyKind::BinaryRay:
    case FamilyKind::LoopRay:
      return 0.0;
    case FamilyKind::TailOn:
      return v == 0 ? std::log(static_cast<double>(f.n)) : 0.0;
    case FamilyKind::On:
      require_single_vertex(f, v);
      return std::log(static_cast<double>(f.n));
    case FamilyKind::OInfinity:
      require_single_vertex(f, v);
      return kInf;
  }
  return kInf;
}

FamilyStates family_states(const FamilySpec& f, double beta) {
  if (beta < 0) throw Error("beta must be nonnegative");
  require_branching(f);
  FamilyStates out;
  const double ln2 = std::numbers::ln2;
  const double q = std::exp(-beta);
  switch (f.kind) {
    case FamilyKind::Hub: {
      if (near(beta, ln2)) {
        out.states.push_back({StateTag::Conservative, "hub critical state",
                              [](std::size_t k) {
                                return std::ldexp(1.0, -static_cast<int>(k) - 1);
                              }});
        out.certificate =
            "every infinite path returns to the hub, so the whole graph is one "
            "conservative critical class with eigenvector m(v_k) = 2^-(k+1)";
      } else if (beta < ln2) {
        out.certificate = "no states of any type below ln 2: every vertex is "
                          "non-equivariant there";
      } else {
        out.certificate = "no infinite-type states above ln 2: every vertex is "
                          "regular and the simplex is purely finite type";
      }
      break;
    }
    case FamilyKind::BiInfiniteLine: {
      if (beta < ln2 - kBetaTol) {
        out.certificate =
            "no states at all: first-hit sums diverge at every vertex, and the "
            "eigenvector cone is empty (line_mass_bound reports infeasible)";
      } else if (near(beta, ln2)) {
        LineMassCertificate c = line_mass_bound(beta, 400);
        out.certificate =
            "no states: any infinite-type solution normalized at a vertex keeps "
            "total mass above 1/bound, forcing that vertex's mass below " +
            std::to_string(c.bound) + "; the bound vanishes as the window grows";
      } else {
        out.certificate =
            "no infinite-type states above ln 2: a nonnegative eigenvector "
            "solution grows without bound in one direction, so it cannot sum to 1";
      }
      break;
    }
    case FamilyKind::BinaryRay: {
      if (beta < ln2 - kBetaTol) {
        double r = std::exp(beta) / 2.0;
        out.states.push_back({StateTag::Dissipative, "binary-ray dissipative state",
                              [r](std::size_t k) {
                                return (1.0 - r) * std::pow(r, static_cast<double>(k));
                              }});
        out.certificate =
            "unique infinite-type state: the eigenvector recursion fixes "
            "m(v_k) = (exp(beta)/2)^k m(v_0), summable exactly when beta < ln 2; "
            "every infinite path wanders, so it is dissipative";
      } else {
        out.certificate =
            "empty: the eigenvector recursion forces ratio exp(beta)/2 >= 1, "
            "which cannot sum to 1";
      }
      break;
    }
    case FamilyKind::LoopRay: {
      if (beta <= kBetaTol) {
        out.states.push_back({StateTag::Conservative, "loop-ray critical state",
                              [](std::size_t k) { return k == 0 ? 1.0 : 0.0; }});
        out.certificate =
            "at beta = 0 the only critical class is {v_0}; the conservative "
            "state is the point mass there";
      } else if (beta < ln2 - kBetaTol) {
        double a = q / (1.0 - q);
        out.states.push_back({StateTag::Dissipative, "loop-ray dissipative state",
                              [a](std::size_t k) {
                                return std::pow(a, -(static_cast<double>(k) + 1.0)) *
                                       (a - 1.0);
                              }});
        out.certificate =
            "unique infinite-type state m(v_k) = a^-(k+1)(a-1) with "
            "a = exp(-beta)/(1-exp(-beta)); mass escapes along the ray, so it "
            "is dissipative";
      } else {
        out.certificate =
            "empty: with a = exp(-beta)/(1-exp(-beta)) <= 1 the eigenvector "
            "tail a^-(k+1) is not summable";
      }
      break;
    }
    case FamilyKind::DoubleLoopRay: {
      if (near(beta, ln2)) {
        out.states.push_back({StateTag::Conservative, "double-loop critical state",
                              [](std::size_t k) { return k == 0 ? 1.0 : 0.0; }});
        out.certificate =
            "subinvariance at v_0 pins all mass there: m(v_0) >= m(v_0) + "
            "m(v_1)/2 forces m(v_1) = 0 and the chain collapses; the "
            "dissipative set is empty at every beta";
      } else if (beta < ln2) {
        out.certificate = "no states below ln 2; the dissipative set is empty "
                          "at every beta";
      } else {
        out.certificate = "finite type only above ln 2; the dissipative set is "
                          "empty at every beta";
      }
      break;
    }
    case FamilyKind::TailOn: {
      double nd = static_cast<double>(f.n);
      double lnn = std::log(nd);
      if (near(beta, lnn)) {
        out.states.push_back({StateTag::Conservative, "tail critical state",
                              [nd](std::size_t k) {
                                return (nd - 1.0) *
                                       std::pow(nd, -(static_cast<double>(k) + 1.0));
                              }});
        out.certificate =
            "the loop vertex v_1 is the only critical class and every infinite "
            "path eventually circles it, so the unique infinite-type state is "
            "conservative with m(v_k) = (n-1) n^-k";
      } else {
        out.certificate =
            "empty: v_1 is the only cycle vertex and it is critical exactly at "
            "ln n; every infinite path recurs there, so nothing is dissipative";
      }
      break;
    }
    case FamilyKind::On: {
      double lnn = std::log(static_cast<double>(f.n));
      if (near(beta, lnn)) {
        out.states.push_back({StateTag::Conservative, "critical state",
                              [](std::size_t) { return 1.0; }});
        out.certificate = "the single vertex is critical exactly at ln n";
      } else if (beta < lnn) {
        out.certificate = "empty: the vertex is non-equivariant below ln n";
      } else {
        out.certificate = "empty: the vertex is regular above ln n and the "
                          "simplex is purely finite type";
      }
      break;
    }
    case FamilyKind::OInfinity: {
      out.certificate =
          "empty at every beta: the loop sum diverges for all beta, so no "
          "vertex is ever equivariant; the ground state exists but its vertex "
          "has an infinite divergence abscissa";
      break;
    }
  }
  return out;
}

LineMassCertificate line_mass_bound(double beta, std::size_t window,
                                    std::size_t extension) {
  LineMassCertificate cert;
  cert.extent = std::max(window, extension);
  const long double q = std::exp(-static_cast<long double>(beta));
  long double t_lo = -std::numeric_limits<long double>::infinity();
  long double t_hi = std::numeric_limits<long double>::infinity();
  long double sum_a = 1.0L;  // running window mass of the basis solutions
  long double sum_b = 0.0L;
  bool feasible = true;
  for (int side = 0; side < 2 && feasible; ++side) {
    long double pa = 1.0L, pb = 0.0L;  // m at the center
    long double ca, cb;                // m one step out
    if (side == 0) {
      ca = 0.0L;
      cb = 1.0L;  // m(1) = t
    } else {
      ca = 1.0L / q;
      cb = -1.0L;  // m(-1) = m(0)/q - m(1)
    }
    for (std::size_t i = 1; i <= cert.extent; ++i) {
      if (cb > 0.0L) {
        t_lo = std::max(t_lo, -ca / cb);
      } else if (cb < 0.0L) {
        t_hi = std::min(t_hi, -ca / cb);
      } else if (ca < 0.0L) {
        feasible = false;
        break;
      }
      if (t_lo > t_hi) {
        feasible = false;
        break;
      }
      sum_a += ca;
      sum_b += cb;
      // stopping early only drops constraints and mass, which stays sound
      if (std::abs(ca) > 1e280L || std::abs(cb) > 1e280L) break;
      long double na = ca / q - pa;
      long double nb = cb / q - pb;
      pa = ca;
      pb = cb;
      ca = na;
      cb = nb;
    }
  }
  if (!feasible || t_lo > t_hi) {
    cert.feasible = false;
    cert.bound = 0.0;
    return cert;
  }
  cert.feasible = true;
  cert.t_lo = static_cast<double>(t_lo);
  cert.t_hi = static_cast<double>(t_hi);
  long double mass_lo = sum_a + sum_b * t_lo;
  long double mass_hi = sum_a + sum_b * t_hi;
  long double least = std::min(mass_lo, mass_hi);
  if (least < 1.0L) least = 1.0L;  // the center vertex alone already holds 1
  cert.bound = static_cast<double>(1.0L / least);
  return cert;
}

}  // namespace kmsgraph
