#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>

#include "kmsgraph/families.hpp"
#include "kmsgraph/measures.hpp"
#include "kmsgraph/oracle.hpp"
#include "kmsgraph/paction.hpp"
#include "kmsgraph/phase.hpp"

namespace {

using kmsgraph::Error;
using kmsgraph::ExtReal;
using kmsgraph::Finiteness;
using kmsgraph::WeightedGraph;
using ojson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;        // input failed validation
constexpr int kExitInconclusive = 3;   // cap hit or boundary-band ambiguity
constexpr int kExitUsage = 64;

// Accepts a plain decimal or the exact literal ln(k), so critical
// temperatures like ln 2 can be requested without decimal drift.
double parse_beta(const std::string& text) {
  try {
    if (text.size() > 4 && text.compare(0, 3, "ln(") == 0 && text.back() == ')') {
      std::string inner = text.substr(3, text.size() - 4);
      std::size_t used = 0;
      double k = std::stod(inner, &used);
      if (used != inner.size() || k <= 0) throw Error("cannot parse beta: " + text);
      return std::log(k);
    }
    std::size_t used = 0;
    double b = std::stod(text, &used);
    if (used != text.size()) throw Error("cannot parse beta: " + text);
    return b;
  } catch (const std::invalid_argument&) {
    throw Error("cannot parse beta: " + text);
  } catch (const std::out_of_range&) {
    throw Error("beta out of range: " + text);
  }
}

std::size_t visit_cap() {
  const char* s = std::getenv("KMS_GRAPH_CAP");
  if (s == nullptr || *s == '\0') return kmsgraph::kDefaultVisitCap;
  char* end = nullptr;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (end == nullptr || *end != '\0' || v == 0) {
    throw Error("KMS_GRAPH_CAP must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

ojson ext_json(const ExtReal& x) {
  switch (x.kind) {
    case Finiteness::Finite: return ojson{{"kind", "finite"}, {"value", x.value}};
    case Finiteness::Divergent: return ojson{{"kind", "divergent"}};
    case Finiteness::Boundary: return ojson{{"kind", "boundary"}};
  }
  return ojson{};
}

ojson state_json(const WeightedGraph& g, std::span<const double> values) {
  ojson out = ojson::object();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    out[g.vertex_id(v)] = values[v];
  }
  return out;
}

std::vector<double> load_state_file(const WeightedGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open state file: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (!j.is_object()) throw Error("state file must be a JSON object vertex -> mass");
  std::vector<double> m(g.vertex_count(), 0.0);
  for (const auto& [key, value] : j.items()) {
    auto idx = g.vertex_index(key);
    if (!idx) throw Error("state file names unknown vertex: " + key);
    m[*idx] = value.get<double>();
  }
  return m;
}

std::vector<std::size_t> parse_edge_list(const WeightedGraph& g,
                                         const std::string& text) {
  std::vector<std::size_t> edges;
  std::string cur;
  std::stringstream ss(text);
  while (std::getline(ss, cur, ',')) {
    if (cur.empty()) continue;
    auto idx = g.edge_index(cur);
    if (!idx) throw Error("unknown edge id: " + cur);
    edges.push_back(*idx);
  }
  return edges;
}

void emit(const ojson& report) { std::cout << report.dump(2) << "\n"; }

ojson envelope(const std::string& command) {
  return ojson{{"schema", "kms-graph/1"}, {"command", command}};
}

int run_classify(const std::string& graph_path, const std::string& beta_text,
                 double tol, double tol_m) {
  WeightedGraph g = kmsgraph::load_graph_file(graph_path);
  double beta = parse_beta(beta_text);
  kmsgraph::ClassifyOptions opts;
  opts.tol = tol;
  opts.tol_m = tol_m;
  kmsgraph::SimplexDescription s = kmsgraph::simplex(g, beta, opts);

  ojson report = envelope("classify");
  report["beta"] = beta;
  report["tol"] = tol;
  report["tol_m"] = tol_m;
  ojson verts = ojson::array();
  bool any_boundary = false;
  const kmsgraph::VertexClassification& cls = s.classification;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    any_boundary = any_boundary || cls.boundary[v];
    verts.push_back(ojson{{"id", g.vertex_id(v)},
                          {"class", kmsgraph::class_label(cls.labels[v])},
                          {"boundary", static_cast<bool>(cls.boundary[v])},
                          {"zs", ext_json(cls.partitions[v].zs)},
                          {"za", ext_json(cls.partitions[v].za)},
                          {"z", ext_json(cls.partitions[v].z)}});
  }
  report["vertices"] = verts;
  ojson classes = ojson::array();
  for (const auto& cc : cls.critical_classes) {
    ojson ids = ojson::array();
    for (std::size_t v : cc) ids.push_back(g.vertex_id(v));
    classes.push_back(ids);
  }
  report["critical_classes"] = classes;
  ojson fins = ojson::array();
  for (const auto& [v, state] : s.finite_extremes) {
    fins.push_back(
        ojson{{"vertex", g.vertex_id(v)}, {"state", state_json(g, state.values)}});
  }
  report["finite_extremes"] = fins;
  ojson cons = ojson::array();
  for (const auto& [ci, state] : s.conservative_extremes) {
    ojson ids = ojson::array();
    for (std::size_t v : cls.critical_classes[ci]) ids.push_back(g.vertex_id(v));
    cons.push_back(ojson{{"class", ci},
                         {"vertices", ids},
                         {"state", state_json(g, state.values)}});
  }
  report["conservative_extremes"] = cons;
  report["dis_status"] = kmsgraph::dis_label(s.dis_status);
  report["dis_reason"] = s.dis_reason;
  ojson nk = ojson::array();
  for (std::size_t v : s.no_kms) nk.push_back(g.vertex_id(v));
  report["no_kms"] = nk;
  report["counts"] = ojson{{"n_fin", s.finite_extremes.size()},
                           {"n_con", s.conservative_extremes.size()}};
  emit(report);
  return any_boundary ? kExitInconclusive : kExitOk;
}

int run_sweep(const std::string& graph_path, double beta_min, double beta_max,
              double step, const std::string& format, double tol) {
  WeightedGraph g = kmsgraph::load_graph_file(graph_path);
  kmsgraph::ClassifyOptions opts;
  opts.tol = tol;
  std::vector<kmsgraph::PhaseRow> rows =
      kmsgraph::sweep(g, kmsgraph::beta_grid(beta_min, beta_max, step), opts);
  if (format == "csv") {
    std::cout << kmsgraph::sweep_csv(g, rows);
    return kExitOk;
  }
  ojson report = envelope("sweep");
  report["tol"] = tol;
  ojson jrows = ojson::array();
  for (const kmsgraph::PhaseRow& row : rows) {
    ojson classes = ojson::object();
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      classes[g.vertex_id(v)] = kmsgraph::class_label(row.labels[v]);
    }
    ojson flags = ojson::array();
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      if (row.boundary[v]) flags.push_back(g.vertex_id(v));
    }
    jrows.push_back(ojson{{"beta", row.beta},
                          {"at_critical", row.at_exact_critical},
                          {"classes", classes},
                          {"n_fin", row.n_fin},
                          {"n_con", row.n_con},
                          {"dis_status", kmsgraph::dis_label(row.dis_status)},
                          {"boundary_vertices", flags}});
  }
  report["rows"] = jrows;
  emit(report);
  return kExitOk;
}

int run_oracle(const std::string& graph_path, const std::string& beta_text,
               const std::string& vertex, std::size_t length, bool list_paths,
               const std::string& path_class) {
  WeightedGraph g = kmsgraph::load_graph_file(graph_path);
  double beta = parse_beta(beta_text);
  auto v = g.vertex_index(vertex);
  if (!v) throw Error("unknown vertex id: " + vertex);
  kmsgraph::TruncatedPartition t = kmsgraph::oracle_partition(g, *v, beta, length);
  ojson report = envelope("oracle");
  report["beta"] = beta;
  report["vertex"] = vertex;
  report["length"] = length;
  report["zs"] = t.zs;
  report["za"] = t.za;
  report["z"] = t.z;
  if (list_paths) {
    kmsgraph::PathQuery q;
    q.target = *v;
    q.max_len = length;
    q.cap = visit_cap();
    if (path_class == "simple") {
      q.selector = kmsgraph::PathClass::SimpleLoop;
    } else if (path_class == "first-hit") {
      q.selector = kmsgraph::PathClass::FirstHit;
    } else {
      q.selector = kmsgraph::PathClass::AllEndingAt;
    }
    ojson paths = ojson::array();
    for (const kmsgraph::EnumeratedPath& p : kmsgraph::enumerate_paths(g, q)) {
      ojson ids = ojson::array();
      for (std::size_t e : p.edges) ids.push_back(g.edges()[e].id);
      paths.push_back(ojson{{"edges", ids}, {"weight", p.weight}});
    }
    report["paths"] = paths;
  }
  emit(report);
  return kExitOk;
}

int run_measure(const std::string& graph_path, const std::string& beta_text,
                const std::string& state_path, const std::string& path_text,
                bool atom, std::size_t finite_length, double tol_m) {
  WeightedGraph g = kmsgraph::load_graph_file(graph_path);
  double beta = parse_beta(beta_text);
  std::vector<double> m = load_state_file(g, state_path);
  kmsgraph::MembershipReport mr = kmsgraph::check_membership(g, beta, m, tol_m);
  ojson report = envelope("measure");
  report["beta"] = beta;
  report["tol_m"] = tol_m;
  ojson violations2 = ojson::array();
  for (const auto& [v, s] : mr.m2_violations) {
    violations2.push_back(ojson{{"vertex", g.vertex_id(v)}, {"defect", s}});
  }
  ojson violations3 = ojson::array();
  for (const auto& [v, s] : mr.m3_violations) {
    violations3.push_back(ojson{{"vertex", g.vertex_id(v)}, {"defect", s}});
  }
  report["membership"] = ojson{{"is_member", mr.is_member},
                               {"mass", mr.mass},
                               {"m1_residual", mr.m1_residual},
                               {"m2_violations", violations2},
                               {"m3_violations", violations3}};
  if (!path_text.empty()) {
    std::vector<std::size_t> edges = parse_edge_list(g, path_text);
    report["path"] = path_text;
    report["cylinder_mass"] = kmsgraph::cylinder_mass(g, beta, m, edges);
    if (atom) report["atom_mass"] = kmsgraph::atom_mass(g, beta, m, edges);
  }
  if (finite_length > 0) {
    report["finite_mass"] = kmsgraph::finite_mass(g, beta, m, finite_length);
    report["finite_mass_length"] = finite_length;
  }
  emit(report);
  return kExitOk;
}

int run_action_check(const std::string& graph_path, std::size_t max_word,
                     std::size_t max_prefix, std::size_t max_cycle) {
  WeightedGraph g = kmsgraph::load_graph_file(graph_path);
  kmsgraph::ActionAxiomReport r =
      kmsgraph::run_action_axioms(g, max_word, max_prefix, max_cycle);
  ojson report = envelope("action-check");
  report["max_word"] = max_word;
  report["max_prefix"] = max_prefix;
  report["max_cycle"] = max_cycle;
  report["words"] = r.words;
  report["paths"] = r.paths;
  report["involution_checked"] = r.involution_checked;
  report["composition_checked"] = r.composition_checked;
  report["orthogonality_checked"] = r.orthogonality_checked;
  report["semisaturation_checked"] = r.semisaturation_checked;
  report["shapes"] = ojson{{"identity", r.shape_identity},
                           {"path", r.shape_path},
                           {"inverse", r.shape_inverse},
                           {"transposition", r.shape_transposition},
                           {"null", r.shape_null}};
  report["violations"] = r.violations;
  report["ok"] = r.ok();
  emit(report);
  return r.ok() ? kExitOk : kExitInconclusive;
}

int run_family(const std::string& name, std::size_t n, const std::string& scenario,
               const std::string& beta_text, std::size_t depth, bool emit_graph) {
  kmsgraph::RelativeScenario sc = scenario == "full"
                                      ? kmsgraph::RelativeScenario::Full
                                      : kmsgraph::RelativeScenario::Toeplitz;
  kmsgraph::FamilySpec f = kmsgraph::parse_family(name, n, sc);
  double beta = parse_beta(beta_text);
  bool single = f.kind == kmsgraph::FamilyKind::On ||
                f.kind == kmsgraph::FamilyKind::OInfinity;
  std::size_t indices = single ? 1 : depth;
  ojson report = envelope("family");
  report["family"] = kmsgraph::family_name(f.kind);
  if (f.n > 0) report["n"] = f.n;
  report["scenario"] = scenario;
  report["beta"] = beta;
  report["depth"] = depth;
  ojson verts = ojson::array();
  for (std::size_t v = 0; v < indices; ++v) {
    kmsgraph::PartitionValues pv = kmsgraph::analytic_partitions(f, v, beta);
    verts.push_back(ojson{{"index", v},
                          {"relative", kmsgraph::family_vertex_relative(f, v)},
                          {"zs", ext_json(pv.zs)},
                          {"za", ext_json(pv.za)},
                          {"z", ext_json(pv.z)},
                          {"beta_v", *pv.beta_v}});
  }
  report["vertices"] = verts;
  kmsgraph::FamilyStates fs = kmsgraph::family_states(f, beta);
  ojson states = ojson::array();
  for (const kmsgraph::FamilyState& st : fs.states) {
    ojson values = ojson::array();
    for (std::size_t v = 0; v < indices; ++v) values.push_back(st.value(v));
    std::string tag;
    switch (st.tag) {
      case kmsgraph::StateTag::Conservative: tag = "conservative"; break;
      case kmsgraph::StateTag::Dissipative: tag = "dissipative"; break;
      default: tag = "other"; break;
    }
    states.push_back(ojson{{"tag", tag}, {"label", st.label}, {"values", values}});
  }
  report["states"] = states;
  report["certificate"] = fs.certificate;
  if (emit_graph) {
    WeightedGraph g = kmsgraph::truncate(f, depth);
    report["truncation"] = nlohmann::ordered_json::parse(kmsgraph::graph_to_json(g));
  }
  emit(report);
  return kExitOk;
}

int run_ground(const std::string& graph_path) {
  WeightedGraph g = kmsgraph::load_graph_file(graph_path);
  kmsgraph::GroundStates gs = kmsgraph::ground_states(g);
  ojson report = envelope("ground");
  ojson extremes = ojson::array();
  for (std::size_t i = 0; i < gs.extreme_vertices.size(); ++i) {
    extremes.push_back(ojson{{"vertex", g.vertex_id(gs.extreme_vertices[i])},
                             {"abscissa", gs.abscissas[i]},
                             {"kms_infinity", static_cast<bool>(gs.kms_infinity[i])}});
  }
  report["extremes"] = extremes;
  emit(report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KMS state classification for relative graph algebras"};
  app.require_subcommand(1);
  unsigned long long seed = 0;
  app.add_option("--seed", seed, "Seed echoed for reproducibility bookkeeping");

  std::string graph_path, beta_text = "1.0", format = "json";
  double tol = kmsgraph::kBoundaryTol, tol_m = 1e-9;

  auto* classify = app.add_subcommand("classify", "Classify vertices and list extreme states");
  classify->add_option("--graph", graph_path, "Graph JSON file")->required();
  classify->add_option("--beta", beta_text, "Inverse temperature, decimal or ln(k)")->required();
  classify->add_option("--tol", tol, "Threshold half-band");
  classify->add_option("--tol-m", tol_m, "Membership residual tolerance");

  double beta_min = 0.0, beta_max = 1.0, step = 0.1;
  auto* sweepc = app.add_subcommand("sweep", "Phase table over a beta grid");
  sweepc->add_option("--graph", graph_path, "Graph JSON file")->required();
  sweepc->add_option("--beta-min", beta_min, "Grid start")->required();
  sweepc->add_option("--beta-max", beta_max, "Grid end")->required();
  sweepc->add_option("--step", step, "Grid step")->required();
  sweepc->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweepc->add_option("--tol", tol, "Threshold half-band");

  std::string vertex, path_class = "all";
  std::size_t length = 20;
  bool list_paths = false;
  auto* oraclec = app.add_subcommand("oracle", "Truncated partition sums by dynamic programming");
  oraclec->add_option("--graph", graph_path, "Graph JSON file")->required();
  oraclec->add_option("--beta", beta_text, "Inverse temperature, decimal or ln(k)")->required();
  oraclec->add_option("--vertex", vertex, "Target vertex id")->required();
  oraclec->add_option("--length", length, "Truncation length");
  oraclec->add_flag("--list-paths", list_paths, "Also enumerate the paths");
  oraclec->add_option("--class", path_class, "simple, first-hit or all")
      ->check(CLI::IsMember({"simple", "first-hit", "all"}));

  std::string state_path, path_text;
  bool atom = false;
  std::size_t finite_length = 0;
  auto* measurec = app.add_subcommand("measure", "Check a state and weigh cylinders");
  measurec->add_option("--graph", graph_path, "Graph JSON file")->required();
  measurec->add_option("--beta", beta_text, "Inverse temperature, decimal or ln(k)")->required();
  measurec->add_option("--state", state_path, "State JSON file, vertex -> mass")->required();
  measurec->add_option("--path", path_text, "Comma separated edge ids");
  measurec->add_flag("--atom", atom, "Also report the boundary-point atom");
  measurec->add_option("--finite-length", finite_length,
                       "Report finite-part mass truncated at this length");
  measurec->add_option("--tol-m", tol_m, "Membership residual tolerance");

  std::size_t max_word = 4, max_prefix = 3, max_cycle = 3;
  auto* actionc = app.add_subcommand("action-check", "Sweep the boundary action axioms");
  actionc->add_option("--graph", graph_path, "Graph JSON file")->required();
  actionc->add_option("--max-word", max_word, "Longest reduced word");
  actionc->add_option("--max-prefix", max_prefix, "Longest enumerated prefix");
  actionc->add_option("--max-cycle", max_cycle, "Longest enumerated primitive cycle");

  std::string fam_name, scenario = "toeplitz";
  std::size_t fam_n = 0, depth = 12;
  bool emit_graph = false;
  auto* familyc = app.add_subcommand("family", "Closed forms for the infinite families");
  familyc->add_option("--name", fam_name, "Family name")->required();
  familyc->add_option("--n", fam_n, "Branching parameter where applicable");
  familyc->add_option("--beta", beta_text, "Inverse temperature, decimal or ln(k)")->required();
  familyc->add_option("--depth", depth, "Vertex indices reported / truncation size");
  familyc->add_option("--relative", scenario, "toeplitz or full")
      ->check(CLI::IsMember({"toeplitz", "full"}));
  familyc->add_flag("--emit-graph", emit_graph, "Include the truncated graph");

  auto* groundc = app.add_subcommand("ground", "Ground state extremes and abscissas");
  groundc->add_option("--graph", graph_path, "Graph JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(classify)) return run_classify(graph_path, beta_text, tol, tol_m);
    if (app.got_subcommand(sweepc)) return run_sweep(graph_path, beta_min, beta_max, step, format, tol);
    if (app.got_subcommand(oraclec)) return run_oracle(graph_path, beta_text, vertex, length, list_paths, path_class);
    if (app.got_subcommand(measurec)) return run_measure(graph_path, beta_text, state_path, path_text, atom, finite_length, tol_m);
    if (app.got_subcommand(actionc)) return run_action_check(graph_path, max_word, max_prefix, max_cycle);
    if (app.got_subcommand(familyc)) return run_family(fam_name, fam_n, scenario, beta_text, depth, emit_graph);
    if (app.got_subcommand(groundc)) return run_ground(graph_path);
  } catch (const kmsgraph::ValidationError& e) {
    std::cerr << "validation failed:\n";
    for (const std::string& p : e.problems()) std::cerr << "  " << p << "\n";
    return kExitInvalid;
  } catch (const kmsgraph::ExplosionCapError& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const kmsgraph::SingularSolveError& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitUsage;
}
