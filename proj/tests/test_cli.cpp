#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gm/constructions.hpp"
#include "gm/decomposition.hpp"
#include "gm/folio.hpp"
#include "gm/linkage.hpp"
#include "gm/minor.hpp"
#include "json.hpp"

using json = nlohmann::json;
using namespace gm;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  json result;
};

// Runs the CLI inside a scratch directory and parses the single JSON line it prints.
Run run(const std::string& args) {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("gm_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  std::string cmd = "cd '" + dir.string() + "' && '" GM_CLI_PATH "' " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (!r.out.empty()) r.result = json::parse(r.out);
  return r;
}

fs::path scratch(const std::string& name) {
  return fs::temp_directory_path() / ("gm_cli_test_" + std::to_string(::getpid())) / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_graph(const Graph& a, const Graph& b) {
  return a.n() == b.n() && a.edges() == b.edges() && a.labels() == b.labels();
}

}  // namespace

TEST_CASE("output is one JSON object with sorted keys") {
  Run r = run("gen grid --n 2 --m 3 -o sorted.el");
  CHECK(r.code == 0);
  std::string line = r.out.substr(0, r.out.find('\n'));
  CHECK(json::parse(line).dump() == line);
  CHECK(r.result["command"] == "gen");
  CHECK(r.result["exit_code"] == 0);
}

TEST_CASE("gen gamma-hat writes the graph and a pattern sidecar") {
  Run r = run("gen gamma-hat --k 2 -o g.el");
  REQUIRE(r.code == 0);
  GammaInstance gam = gamma_hat(2);
  CHECK(same_graph(read_edge_list_file(scratch("g.el").string()), gam.graph));
  std::ifstream pat(scratch("g.pat"));
  CHECK(read_pattern(pat) == gam.pattern);
  CHECK(r.result["round_trip"] == true);
  CHECK(r.result["terminals"].get<std::vector<int>>() == gam.terminals);
}

TEST_CASE("every generator round-trips") {
  struct Case {
    std::string args;
    Graph expected;
  };
  std::vector<Case> cases{
      {"grid --n 3 --m 4", grid(3, 4)},
      {"wall --n 3", wall(3).graph},
      {"mesh --n 4 --m 3 --hub", cylindrical_mesh(4, 3, true).graph},
      {"annulus --w 3 --r 4", railed_annulus(3, 4).graph},
      {"z-graph --s 2", z_graph(2).graph},
      {"gamma-hat --k 3", gamma_hat(3).graph},
      {"h-graph --k 2", h_graph(2, regular_gadgets(2)).graph},
      {"decorated-gamma --k 2", decorate_gamma(2, regular_gadgets(2)).graph},
  };
  int i = 0;
  for (const Case& c : cases) {
    std::string file = "family" + std::to_string(i++) + ".el";
    Run r = run("gen " + c.args + " -o " + file);
    INFO(c.args);
    CHECK(r.code == 0);
    CHECK(r.result["round_trip"] == true);
    CHECK(same_graph(read_edge_list_file(scratch(file).string()), c.expected));
  }
}

TEST_CASE("random generation is seeded") {
  CHECK(run("--seed 7 gen random --n 12 --p 0.4 -o r1.el").code == 0);
  CHECK(run("gen random --n 12 --p 0.4 -o r2.el --seed 7").code == 0);
  CHECK(run("gen random --n 12 --p 0.4 -o r3.el --seed 8").code == 0);
  CHECK(slurp(scratch("r1.el")) == slurp(scratch("r2.el")));
  CHECK(slurp(scratch("r1.el")) != slurp(scratch("r3.el")));
}

TEST_CASE("vital on the generated witness") {
  REQUIRE(run("gen gamma-hat --k 2 -o v.el").code == 0);
  Run r = run("vital --graph v.el --pattern v.pat");
  CHECK(r.code == 0);
  CHECK(r.result["vital"] == true);
  GammaInstance gam = gamma_hat(2);
  Linkage l = r.result["linkage"].get<Linkage>();
  CHECK(validate_linkage(gam.graph, l));
  CHECK(pattern_of(gam.graph, l) == normalize_pattern(gam.pattern));
  // A vital linkage is the only one, so it must be the construction's witness.
  std::set<Path> a(l.begin(), l.end()), b;
  for (Path p : gam.witness) {
    if (p.front() > p.back()) std::reverse(p.begin(), p.end());
    b.insert(p);
  }
  for (Path p : l) CHECK((p.front() <= p.back()));
  CHECK(a == b);
}

TEST_CASE("vital fails on a non-vital instance") {
  REQUIRE(run("gen grid --n 3 --m 3 -o nv.el").code == 0);
  {
    std::ofstream os(scratch("nv.pat"));
    os << "pair 0 8\n";
  }
  Run r = run("vital --graph nv.el --pattern nv.pat");
  CHECK(r.code == 1);
  CHECK(r.result["vital"] == false);
}

TEST_CASE("folio --engine both agrees with the library") {
  REQUIRE(run("gen gamma-hat --k 2 -o f.el").code == 0);
  Run r = run("folio --graph f.el --roots v1,u3 --d 1 --engine both");
  CHECK(r.code == 0);
  CHECK(r.result["equal"] == true);
  GammaInstance gam = gamma_hat(2);
  Graph g = read_edge_list_file(scratch("f.el").string());
  int v1 = -1, u3 = -1;
  for (int v = 0; v < g.n(); ++v) {
    if (g.labels()[v] == "v1") v1 = v;
    if (g.labels()[v] == "u3") u3 = v;
  }
  REQUIRE(v1 >= 0);
  REQUIRE(u3 >= 0);
  Folio direct = folio_bruteforce({g, {v1, u3}}, 1);
  CHECK(r.result["size"] == direct.size());
  CHECK(r.result["oracle"] == json::parse(folio_json(direct)));
  CHECK(r.result["dp"] == r.result["oracle"]);
}

TEST_CASE("folio exit status follows the equality flag on random graphs") {
  std::mt19937 rng(3);
  for (int i = 0; i < 6; ++i) {
    std::string file = "fr" + std::to_string(i) + ".el";
    REQUIRE(run("gen random --n 6 --p 0.5 --seed " + std::to_string(rng()) + " -o " + file).code == 0);
    Run r = run("folio --graph " + file + " --roots 0,1 --d 1 --engine both");
    CHECK(r.code == (r.result["equal"] == true ? 0 : 1));
    CHECK(r.result["equal"] == true);
  }
}

TEST_CASE("kd folio through the CLI") {
  REQUIRE(run("gen gamma-hat --k 2 -o kd.el").code == 0);
  Run r = run("folio --graph kd.el --roots 0,3,5,6 --k 4 --d 0 --engine dp");
  CHECK(r.code == 0);
  GammaInstance gam = gamma_hat(2);
  CHECK(r.result["size"] == kd_folio({gam.graph, gam.terminals}, 4, 0).size());
}

TEST_CASE("tw, certificates and dp over a written decomposition") {
  REQUIRE(run("gen grid --n 3 --m 3 -o t.el").code == 0);
  Run r = run("tw --graph t.el --certify 3 --td t.td");
  CHECK(r.code == 0);
  CHECK(r.result["width"] == 3);
  CHECK(r.result["certificates"]["valid"] == true);
  Run wrong = run("tw --graph t.el --certify 2");
  CHECK(wrong.code == 1);
  Run dp = run("dp --graph t.el --roots 0,8 --d 1 --td t.td");
  CHECK(dp.code == 0);
  CHECK(dp.result["width"] == 3);
  Folio direct = folio_bruteforce({grid(3, 3), {0, 8}}, 1);
  CHECK(dp.result["folio"] == json::parse(folio_json(direct)));
}

TEST_CASE("reduce reports threshold-met and stuck distinctly") {
  REQUIRE(run("gen gamma-hat --k 2 -o red.el").code == 0);
  Run met = run("reduce --graph red.el --red 0,3,5,6 --k 2 --trace red.json -o red_out.el");
  CHECK(met.code == 0);
  CHECK(met.result["status"] == "threshold-met");
  CHECK(json::parse(slurp(scratch("red.json")))["status"] == "threshold-met");
  CHECK(same_graph(read_edge_list_file(scratch("red_out.el").string()), gamma_hat(2).graph));

  // K5 fully annotated plus a triangle: the triangle goes, K5 stays above width 3.
  {
    std::ofstream os(scratch("stuck.el"));
    std::vector<Edge> e;
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) e.emplace_back(i, j);
    e.insert(e.end(), {{5, 6}, {6, 7}, {5, 7}});
    write_edge_list(os, build_graph(8, e));
  }
  Run stuck = run("reduce --graph stuck.el --red 0,1,2,3,4 --k 1 --threshold 3");
  CHECK(stuck.code == 4);
  CHECK(stuck.result["status"] == "stuck");
  CHECK(stuck.result["deletions"].size() == 3);
}

TEST_CASE("route") {
  Run ok = run("route --rails 4 --cycles 2 --surface disc --pairs 4-5,6-7");
  CHECK(ok.code == 0);
  CHECK(ok.result["feasible"] == true);
  CHECK(ok.result["routed"] == true);
  CHECK(ok.result["valid"] == true);
  Run cross = run("route --rails 4 --cycles 2 --surface disc --pairs 4-6,5-7");
  CHECK(cross.code == 0);
  CHECK(cross.result["feasible"] == false);
  CHECK(cross.result["linkage"].is_null());
  Run cyl = run("route --rails 2 --cycles 2 --surface cylinder --pairs 0-3");
  CHECK(cyl.code == 0);
  CHECK(cyl.result["routed"] == true);
  // Two rails pad each cycle to three vertices, so 2 is not a rail end.
  CHECK(run("route --rails 2 --cycles 2 --surface cylinder --pairs 0-2").code == 2);
  Run bad = run("route --rails 4 --cycles 2 --surface disc --pairs 0-5");
  CHECK(bad.code == 2);
  CHECK(bad.result["error"] == "TerminalNotOnBoundary");
}

TEST_CASE("verify-hk and bidim") {
  Run hk = run("verify-hk --k 2");
  CHECK(hk.code == 0);
  CHECK(hk.result["minor_present"] == true);
  CHECK(hk.result["per_vertex_absent"] == true);
  REQUIRE(run("gen gamma-hat --k 2 -o b.el").code == 0);
  Run b = run("bidim --graph b.el --red 0,3,5,6 --cap 3");
  CHECK(b.code == 0);
  GammaInstance gam = gamma_hat(2);
  CHECK(b.result["bidim"] == bidim({gam.graph, gam.terminals}, 3));
}

TEST_CASE("exit codes") {
  Run unknown = run("tw --graph nothere.el");
  CHECK(unknown.code == 2);
  CHECK(unknown.result["error"] == "UsageError");
  CHECK(run("tw --bogus 1").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("").code == 2);
  REQUIRE(run("gen grid --n 3 --m 3 -o e.el").code == 0);
  CHECK(run("folio --graph e.el --roots 0,1,x").code == 2);
  CHECK(run("folio --graph e.el --roots 0,1 --engine magic").code == 2);
  // 8^5 root tuples exceed the multiset budget.
  Run budget = run("folio --graph e.el --roots 0,1,2,3,4,5,6,7 --k 5 --d 0");
  CHECK(budget.code == 3);
  CHECK(budget.result["error"] == "BudgetExceeded");
  {
    std::ofstream os(scratch("broken.el"));
    os << "3 2\n0 1\n";
  }
  Run parse = run("tw --graph broken.el");
  CHECK(parse.code == 2);
  CHECK(parse.result["error"] == "ParseError");
}
