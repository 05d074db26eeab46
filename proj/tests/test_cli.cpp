#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "kmsgraph/classify.hpp"
#include "helpers.hpp"

using namespace kmsgraph;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string cli_path() {
  const char* p = std::getenv("KMSGRAPH_CLI");
  REQUIRE_MESSAGE(p != nullptr, "KMSGRAPH_CLI must point at the binary");
  return p;
}

RunResult run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.out.append(buf.data(), got);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_file(const std::string& name, const std::string& text) {
  std::ofstream out(name);
  out << text;
  return name;
}

std::string o2_file() {
  static std::string path = write_file("cli_o2.json", graph_to_json(kmstest::o_n(2)));
  return path;
}

std::string cycle_file() {
  static std::string path =
      write_file("cli_cycle.json", graph_to_json(kmstest::two_cycle()));
  return path;
}

}  // namespace

TEST_CASE("classify emits the schema envelope and is byte stable") {
  RunResult a = run("classify --graph " + o2_file() + " --beta 1.0");
  CHECK(a.exit_code == 0);
  json j = json::parse(a.out);
  CHECK(j["schema"] == "kms-graph/1");
  CHECK(j["command"] == "classify");
  CHECK(j["beta"] == 1.0);
  CHECK(j["tol"] == kBoundaryTol);
  REQUIRE(j["vertices"].size() == 1);
  CHECK(j["vertices"][0]["id"] == "v");
  CHECK(j["vertices"][0]["class"] == "Regular");
  CHECK(j["vertices"][0]["zs"]["kind"] == "finite");
  CHECK(j["counts"]["n_fin"] == 1);
  CHECK(j["counts"]["n_con"] == 0);

  RunResult b = run("classify --graph " + o2_file() + " --beta 1.0");
  CHECK(a.out == b.out);
}

TEST_CASE("classify reads exact logarithm betas and flags boundaries") {
  RunResult r = run("classify --graph " + o2_file() + " --beta 'ln(2)'");
  CHECK(r.exit_code == 3);   // zs pinned to the band edge: inconclusive
  json j = json::parse(r.out);
  CHECK(j["vertices"][0]["boundary"] == true);
  CHECK(j["vertices"][0]["z"]["kind"] == "boundary");

  RunResult below = run("classify --graph " + o2_file() + " --beta 0.6");
  CHECK(below.exit_code == 0);
  json jb = json::parse(below.out);
  CHECK(jb["vertices"][0]["class"] == "NonEquivariant");
  CHECK(jb["no_kms"][0] == "v");
}

TEST_CASE("sweep renders both formats") {
  RunResult csv = run("sweep --graph " + o2_file() +
                      " --beta-min 0.6 --beta-max 0.8 --step 0.2 --format csv");
  CHECK(csv.exit_code == 0);
  CHECK(csv.out.rfind("beta,vertex,class,n_fin,n_con,dis_status,flags\n", 0) == 0);
  CHECK(csv.out.find("critical-point") != std::string::npos);

  RunResult js = run("sweep --graph " + o2_file() +
                     " --beta-min 0.6 --beta-max 0.8 --step 0.2 --format json");
  CHECK(js.exit_code == 0);
  json j = json::parse(js.out);
  CHECK(j["command"] == "sweep");
  REQUIRE(j["rows"].size() == 3);   // grid endpoints plus the inserted critical
  CHECK(j["rows"][1]["at_critical"] == true);
  CHECK(j["rows"][1]["beta"] == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(j["rows"][0]["classes"]["v"] == "NonEquivariant");
  CHECK(j["rows"][2]["classes"]["v"] == "Regular");
}

TEST_CASE("oracle reports truncated sums and honors the visit cap") {
  RunResult r = run("oracle --graph " + o2_file() +
                    " --beta 1.0 --vertex v --length 10");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["z"] == doctest::Approx(3.654975899832561).epsilon(1e-12));
  CHECK(j["zs"] == doctest::Approx(0.7357588823428847).epsilon(1e-12));

  RunResult capped = run("oracle --graph " + o2_file() +
                             " --beta 1.0 --vertex v --length 12 --list-paths",
                         "KMS_GRAPH_CAP=10 ");
  CHECK(capped.exit_code == 3);

  RunResult listed = run("oracle --graph " + cycle_file() +
                         " --beta 1.0 --vertex v0 --length 4 --list-paths "
                         "--class simple");
  CHECK(listed.exit_code == 0);
  json jl = json::parse(listed.out);
  REQUIRE(jl["paths"].size() == 1);   // only ab returns without an earlier hit
  REQUIRE(jl["paths"][0]["edges"].size() == 2);
  CHECK(jl["paths"][0]["edges"][0] == "a");
  CHECK(jl["paths"][0]["edges"][1] == "b");
}

TEST_CASE("measure reports membership and cylinder masses") {
  WeightedGraph g = kmstest::two_cycle();
  StateVector m = extreme_state(g, 1.0, 0);
  json state;
  state["v0"] = m.values[0];
  state["v1"] = m.values[1];
  write_file("cli_state.json", state.dump());

  RunResult r = run("measure --graph " + cycle_file() +
                    " --beta 1.0 --state cli_state.json --path a,b --atom "
                    "--finite-length 40");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["membership"]["is_member"] == true);
  CHECK(j["membership"]["m2_violations"].empty());
  double q = std::exp(-1.0);
  CHECK(j["cylinder_mass"] ==
        doctest::Approx(q * q * m.values[0]).epsilon(1e-12));
  CHECK(j["atom_mass"].is_number());
  CHECK(j["finite_mass"] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(j["finite_mass_length"] == 40);

  json bad;
  bad["v0"] = 1.0;
  bad["v1"] = 1.0;
  write_file("cli_bad_state.json", bad.dump());
  RunResult rb = run("measure --graph " + cycle_file() +
                     " --beta 1.0 --state cli_bad_state.json");
  CHECK(rb.exit_code == 0);   // the report itself is the answer
  json jb = json::parse(rb.out);
  CHECK(jb["membership"]["is_member"] == false);
}

TEST_CASE("action check counts and family closed forms round trip") {
  RunResult r = run("action-check --graph " + o2_file() +
                    " --max-word 3 --max-prefix 2 --max-cycle 2");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["words"] == 53);
  CHECK(j["paths"] == 23);
  CHECK(j["violations"].empty());
  CHECK(j["ok"] == true);

  RunResult f = run("family --name loop-ray --beta 0.5 --depth 6");
  CHECK(f.exit_code == 0);
  json jf = json::parse(f.out);
  CHECK(jf["command"] == "family");
  REQUIRE(jf["states"].size() == 1);
  CHECK(jf["states"][0]["tag"] == "dissipative");
  REQUIRE(jf["vertices"].size() == 6);
  CHECK(jf["vertices"][0]["beta_v"] == 0.0);

  RunResult fg = run("family --name on --n 2 --beta 'ln(2)' --relative full "
                     "--emit-graph");
  CHECK(fg.exit_code == 0);
  json jg = json::parse(fg.out);
  CHECK(jg["scenario"] == "full");
  CHECK(jg["truncation"]["edges"].size() == 2);
  REQUIRE(jg["states"].size() == 1);
  CHECK(jg["states"][0]["tag"] == "conservative");
}

TEST_CASE("ground lists extremes with abscissas") {
  RunResult r = run("ground --graph " + o2_file());
  CHECK(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["command"] == "ground");
  REQUIRE(j["extremes"].size() == 1);
  CHECK(j["extremes"][0]["vertex"] == "v");
  CHECK(j["extremes"][0]["abscissa"] ==
        doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(j["extremes"][0]["kms_infinity"] == true);
}

TEST_CASE("failure modes map to distinct exit codes") {
  write_file("cli_invalid.json", R"({"vertices": ["v", "v"], "edges": []})");
  RunResult invalid = run("classify --graph cli_invalid.json --beta 1.0");
  CHECK(invalid.exit_code == 2);

  RunResult missing = run("classify --graph does_not_exist.json --beta 1.0");
  CHECK(missing.exit_code == 2);

  RunResult usage = run("classify --graph " + o2_file());   // beta missing
  CHECK(usage.exit_code == 64);

  RunResult unknown = run("no-such-command");
  CHECK(unknown.exit_code == 64);

  RunResult badbeta = run("classify --graph " + o2_file() + " --beta 'ln(x)'");
  CHECK(badbeta.exit_code == 2);
}
