// gm: batch front end over the gmcore library. Every run prints one JSON
// object on stdout; files named by flags receive graphs, patterns and traces.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "gm/constructions.hpp"
#include "gm/decomposition.hpp"
#include "gm/embedding.hpp"
#include "gm/error.hpp"
#include "gm/folio.hpp"
#include "gm/linkage.hpp"
#include "gm/minor.hpp"
#include "gm/pipeline.hpp"
#include "json.hpp"

using json = nlohmann::json;
using namespace gm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitStuck = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 1;
  int threads = 1;
};

std::string sidecar(const std::string& path, const std::string& ext) {
  std::string stem = path;
  if (stem.size() > 3 && stem.compare(stem.size() - 3, 3, ".el") == 0) stem.resize(stem.size() - 3);
  return stem + ext;
}

// Vertex names are labels when the graph has them, otherwise integers.
int resolve_vertex(const Graph& g, const std::string& token) {
  if (g.has_labels())
    for (int v = 0; v < g.n(); ++v)
      if (g.labels()[v] == token) return v;
  try {
    size_t used = 0;
    int v = std::stoi(token, &used);
    if (used == token.size() && v >= 0 && v < g.n()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("unknown vertex '" + token + "'");
}

std::vector<int> resolve_list(const Graph& g, const std::string& list) {
  std::vector<int> out;
  if (list.empty()) return out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(resolve_vertex(g, tok));
  return out;
}

json edges_json(const Graph& g) {
  json e = json::array();
  for (auto [a, b] : g.edges()) e.push_back({a, b});
  return e;
}

json linkage_json(const Linkage& l) {
  json out = json::array();
  for (const Path& p : l) out.push_back(p);
  return out;
}

json pattern_json(const Pattern& p) {
  json out = json::array();
  for (auto [s, t] : p) out.push_back({s, t});
  return out;
}

Graph load_graph(const std::string& path) { return read_edge_list_file(path); }

Pattern load_pattern(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open pattern file " + path);
  return read_pattern(in);
}

// Writes the graph and re-reads it; the result reports whether both agree.
bool write_checked(const std::string& path, const Graph& g) {
  write_edge_list_file(path, g);
  Graph back = read_edge_list_file(path);
  return back.n() == g.n() && back.edges() == g.edges() && back.labels() == g.labels();
}

FolioEngine parse_engine(const std::string& s) { return s == "dp" ? FolioEngine::Dp : FolioEngine::Oracle; }

// ---- subcommands -----------------------------------------------------------

struct GenArgs {
  std::string family;
  int k = 2, n = 4, m = 4, s = 1, w = 3, r = 4;
  double p = 0.3;
  bool hub = false;
  std::string out;
};

int run_gen(const GenArgs& a, const Globals& g, json& result) {
  Graph graph;
  json extra = json::object();
  const std::string& f = a.family;
  if (f == "gamma-hat") {
    GammaInstance gam = gamma_hat(a.k);
    graph = gam.graph;
    std::string pat = sidecar(a.out, ".pat");
    std::ofstream os(pat);
    write_pattern(os, gam.pattern);
    extra["pattern_file"] = pat;
    extra["pattern"] = pattern_json(gam.pattern);
    extra["terminals"] = gam.terminals;
  } else if (f == "grid") {
    graph = grid(a.n, a.m);
  } else if (f == "wall") {
    graph = wall(a.n).graph;
  } else if (f == "mesh") {
    CylindricalMesh mesh = cylindrical_mesh(a.n, a.m, a.hub);
    graph = mesh.graph;
    extra["cycles"] = mesh.cycles;
    extra["rails"] = mesh.rails;
  } else if (f == "annulus") {
    RailedAnnulus ann = railed_annulus(a.w, a.r);
    graph = ann.graph;
    extra["circles"] = ann.circles;
    extra["rails"] = ann.rails;
  } else if (f == "z-graph") {
    AnnotatedGraph z = z_graph(a.s);
    graph = z.graph;
    std::string red = sidecar(a.out, ".red");
    std::ofstream os(red);
    for (size_t i = 0; i < z.annotated.size(); ++i) os << (i ? "," : "") << z.annotated[i];
    os << '\n';
    extra["red_file"] = red;
    extra["annotated"] = z.annotated;
  } else if (f == "h-graph") {
    HGraph h = h_graph(a.k, regular_gadgets(a.k));
    graph = h.graph;
  } else if (f == "decorated-gamma") {
    DecoratedGamma dg = decorate_gamma(a.k, regular_gadgets(a.k));
    graph = dg.graph;
  } else if (f == "random") {
    std::mt19937_64 rng(g.seed);
    std::bernoulli_distribution coin(a.p);
    std::vector<Edge> e;
    for (int u = 0; u < a.n; ++u)
      for (int v = u + 1; v < a.n; ++v)
        if (coin(rng)) e.emplace_back(u, v);
    graph = build_graph(a.n, e);
  } else {
    throw UsageError("unknown family '" + f + "'");
  }
  bool round_trip = write_checked(a.out, graph);
  result = {{"family", f}, {"graph_file", a.out}, {"vertices", graph.n()}, {"edges", graph.m()},
            {"round_trip", round_trip}};
  result.update(extra);
  return round_trip ? kExitOk : kExitFailed;
}

struct TwArgs {
  std::string graph;
  std::string td_out;
  int certify = -1;
};

int run_tw(const TwArgs& a, json& result) {
  Graph g = load_graph(a.graph);
  TreeDecomposition td;
  if (g.n() <= 20) {
    TreewidthResult r = exact_treewidth(g);
    td = r.td;
    result = {{"width", r.width}, {"method", "exact"}};
  } else {
    td = heuristic_td(g);
    result = {{"width", validate_td(g, td).width}, {"method", "min-fill"}};
  }
  result["vertices"] = g.n();
  if (!a.td_out.empty()) {
    std::ofstream os(a.td_out);
    write_td(os, td, g.n());
    result["td_file"] = a.td_out;
  }
  if (a.certify >= 0) {
    bool ok = false;
    std::string kind;
    try {
      TreewidthCertificates c = treewidth_certificates(g, a.certify);
      ok = validate_certificates(g, a.certify, c);
      kind = c.lower_kind == LowerCertificateKind::GridSubgraph ? "grid-subgraph"
             : c.lower_kind == LowerCertificateKind::Bramble    ? "bramble"
                                                                : "grid-minor";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::CertificateNotFound) throw;
      kind = "none";
    }
    result["certificates"] = {{"target", a.certify}, {"valid", ok}, {"lower", kind}};
    if (!ok) return kExitFailed;
  }
  return kExitOk;
}

struct FolioArgs {
  std::string graph;
  std::string roots;
  std::string td;
  std::string engine = "oracle";
  int d = 0;
  int k = -1;
};

json folio_value(const Folio& f) { return json::parse(folio_json(f)); }

int run_dp(const FolioArgs& a, const Globals& gl, json& result) {
  Graph g = load_graph(a.graph);
  RootedGraph rg{g, resolve_list(g, a.roots)};
  FolioConfig cfg;
  cfg.threads = gl.threads;
  Folio f;
  if (!a.td.empty()) {
    std::ifstream in(a.td);
    if (!in) throw UsageError("cannot open " + a.td);
    int n = 0;
    TreeDecomposition td = read_td(in, &n);
    TdCheck check = validate_td(g, td);
    if (!check.valid) fail(ErrorKind::InvalidDecomposition, a.td + " is not a tree decomposition of the graph");
    f = folio_dp(rg, a.d, td, cfg);
    result["width"] = check.width;
  } else {
    f = folio_dp_auto(rg, a.d, cfg);
  }
  result["folio"] = folio_value(f);
  result["size"] = f.size();
  return kExitOk;
}

int run_folio(const FolioArgs& a, const Globals& gl, json& result) {
  Graph g = load_graph(a.graph);
  std::vector<int> roots = resolve_list(g, a.roots);
  FolioConfig cfg;
  cfg.threads = gl.threads;
  auto compute = [&](FolioEngine e) {
    if (a.k >= 0) return kd_folio(AnnotatedGraph{g, roots}, a.k, a.d, e, cfg);
    RootedGraph rg{g, roots};
    return e == FolioEngine::Oracle ? folio_bruteforce(rg, a.d, cfg) : folio_dp_auto(rg, a.d, cfg);
  };
  if (a.engine == "both") {
    Folio o = compute(FolioEngine::Oracle), p = compute(FolioEngine::Dp);
    bool eq = o == p;
    result = {{"oracle", folio_value(o)}, {"dp", folio_value(p)}, {"equal", eq}, {"size", o.size()}};
    return eq ? kExitOk : kExitFailed;
  }
  Folio f = compute(parse_engine(a.engine));
  result = {{a.engine, folio_value(f)}, {"size", f.size()}};
  return kExitOk;
}

struct VitalArgs {
  std::string graph;
  std::string pattern;
};

int run_vital(const VitalArgs& a, json& result) {
  Graph g = load_graph(a.graph);
  Pattern p = load_pattern(a.pattern);
  auto l = disjoint_paths(g, p);
  result = {{"pattern", pattern_json(p)}};
  if (!l) {
    result["vital"] = false;
    result["linkage"] = nullptr;
    return kExitFailed;
  }
  bool vital = is_vital(g, *l);
  result["vital"] = vital;
  result["linkage"] = linkage_json(*l);
  return vital ? kExitOk : kExitFailed;
}

struct ReduceArgs {
  std::string graph;
  std::string red;
  std::string trace_out;
  std::string out;
  std::string rules = "both";
  std::string engine = "auto";
  int k = 1, d = 0, threshold = 4;
};

int run_reduce(const ReduceArgs& a, const Globals& gl, json& result) {
  Graph g = load_graph(a.graph);
  AnnotatedGraph host{g, resolve_list(g, a.red)};
  PipelineConfig cfg;
  cfg.treewidth_threshold = a.threshold;
  cfg.rules = a.rules == "oracle" ? RuleSet::Oracle : a.rules == "clique" ? RuleSet::CliqueRule : RuleSet::Both;
  cfg.engine = a.engine == "oracle" ? IrrelevanceEngine::Oracle
               : a.engine == "dp"   ? IrrelevanceEngine::Dp
                                    : IrrelevanceEngine::Auto;
  cfg.threads = gl.threads;
  ReductionResult r = reduce(host, a.k, a.d, cfg);
  result = json::parse(trace_json(r.trace));
  if (!a.trace_out.empty()) {
    std::ofstream os(a.trace_out);
    os << result.dump(2) << '\n';
    result["trace_file"] = a.trace_out;
  }
  if (!a.out.empty()) {
    write_edge_list_file(a.out, r.reduced.graph);
    result["graph_file"] = a.out;
  }
  return r.trace.status == ReductionStatus::ThresholdMet ? kExitOk : kExitStuck;
}

struct RouteArgs {
  int rails = 4, cycles = 4;
  bool hub = false;
  std::string surface = "disc";
  std::string pattern;
  std::string pairs;
};

Pattern parse_pairs(const std::string& s) {
  Pattern p;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto dash = tok.find('-');
    if (dash == std::string::npos) throw UsageError("pairs are written a-b: " + tok);
    try {
      p.emplace_back(std::stoi(tok.substr(0, dash)), std::stoi(tok.substr(dash + 1)));
    } catch (const std::exception&) {
      throw UsageError("pairs are written a-b: " + tok);
    }
  }
  return p;
}

int run_route(const RouteArgs& a, json& result) {
  CylindricalMesh mesh = cylindrical_mesh(a.rails, a.cycles, a.hub);
  ConcentricCycles cc = mesh_nest(mesh);
  Pattern p = a.pattern.empty() ? parse_pairs(a.pairs) : load_pattern(a.pattern);
  json outer = json::array(), inner = json::array();
  for (const Path& r : mesh.rails) {
    outer.push_back(r.back());
    inner.push_back(r.front());
  }
  bool feasible = false;
  std::optional<Linkage> l;
  if (a.surface == "disc") {
    feasible = feasible_on_disc(p, cc.cycles.back());
    l = route_disc(cc, mesh.rails, p);
  } else if (a.surface == "cylinder") {
    feasible = feasible_on_cylinder(p, cc.cycles.back(), cc.cycles.front());
    l = route_cylinder(cc, mesh.rails, p);
  } else {
    throw UsageError("surface must be disc or cylinder");
  }
  bool valid = !l || (validate_linkage(mesh.graph, *l) && pattern_of(mesh.graph, *l) == normalize_pattern(p));
  result = {{"surface", a.surface},     {"feasible", feasible}, {"routed", l.has_value()},
            {"valid", valid},           {"pattern", pattern_json(p)},
            {"outer_terminals", outer}, {"inner_terminals", inner},
            {"linkage", l ? linkage_json(*l) : json(nullptr)}};
  return feasible == l.has_value() && valid ? kExitOk : kExitFailed;
}

int run_verify_hk(int k, json& result) {
  GadgetFamily fam = regular_gadgets(k);
  HkDeletionReport rep = verify_hk_deletion(k, fam);
  result = {{"k", k},
            {"gadget_vertices", fam.n},
            {"minor_present", rep.minor_present},
            {"per_vertex_absent", rep.per_vertex_absent},
            {"present_after", rep.present_after},
            {"vertices_checked", rep.vertices_checked},
            {"decided_by_blocks", rep.decided_by_blocks},
            {"decided_by_paths", rep.decided_by_paths}};
  return rep.minor_present && rep.per_vertex_absent ? kExitOk : kExitFailed;
}

struct BidimArgs {
  std::string graph;
  std::string red;
  int cap = 3;
};

int run_bidim(const BidimArgs& a, json& result) {
  Graph g = load_graph(a.graph);
  AnnotatedGraph host{g, resolve_list(g, a.red)};
  int b = bidim(host, a.cap);
  result = {{"bidim", b}, {"cap", a.cap}, {"annotated", host.annotated.size()}};
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BudgetExceeded:
    case ErrorKind::SearchCapExceeded:
    case ErrorKind::GenerationCapExceeded:
      return kExitBudget;
    case ErrorKind::ParseError:
    case ErrorKind::IndexOutOfRange:
    case ErrorKind::SelfLoop:
    case ErrorKind::PreconditionViolated:
    case ErrorKind::RootCountMismatch:
    case ErrorKind::TerminalNotOnBoundary:
    case ErrorKind::ParameterTooSmall:
    case ErrorKind::FamilyTooSmall:
    case ErrorKind::CliqueTooSmall:
      return kExitUsage;
    default:
      return kExitFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph minor toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals gl;
  app.add_option("--seed", gl.seed, "Seed for randomized subcommands");
  app.add_option("--threads", gl.threads, "Worker threads")->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen", "Generate an instance");
  c_gen->add_option("family", gen.family, "gamma-hat | grid | wall | mesh | annulus | z-graph | h-graph | "
                                          "decorated-gamma | random")
      ->required();
  c_gen->add_option("--k", gen.k);
  c_gen->add_option("--n", gen.n);
  c_gen->add_option("--m", gen.m);
  c_gen->add_option("--s", gen.s);
  c_gen->add_option("--w", gen.w);
  c_gen->add_option("--r", gen.r);
  c_gen->add_option("--p", gen.p);
  c_gen->add_flag("--hub", gen.hub);
  c_gen->add_option("-o,--output", gen.out, "Edge-list file")->required();

  TwArgs tw;
  auto* c_tw = app.add_subcommand("tw", "Treewidth with an optional decomposition and certificates");
  c_tw->add_option("--graph", tw.graph)->required()->check(CLI::ExistingFile);
  c_tw->add_option("--td", tw.td_out, "Write the decomposition here");
  c_tw->add_option("--certify", tw.certify, "Certify treewidth equal to this value");

  FolioArgs dp;
  auto* c_dp = app.add_subcommand("dp", "Folio by dynamic programming over a tree decomposition");
  c_dp->add_option("--graph", dp.graph)->required()->check(CLI::ExistingFile);
  c_dp->add_option("--roots", dp.roots, "Comma-separated root sequence");
  c_dp->add_option("--d", dp.d)->check(CLI::NonNegativeNumber);
  c_dp->add_option("--td", dp.td, "Decomposition to use")->check(CLI::ExistingFile);

  FolioArgs fo;
  auto* c_fo = app.add_subcommand("folio", "Folio by oracle, DP or both");
  c_fo->add_option("--graph", fo.graph)->required()->check(CLI::ExistingFile);
  c_fo->add_option("--roots", fo.roots, "Root sequence, or the set R with --k");
  c_fo->add_option("--d", fo.d)->check(CLI::NonNegativeNumber);
  c_fo->add_option("--k", fo.k, "Union over all k-tuples drawn from --roots")->check(CLI::NonNegativeNumber);
  c_fo->add_option("--engine", fo.engine)->check(CLI::IsMember({"oracle", "dp", "both"}));

  VitalArgs vi;
  auto* c_vi = app.add_subcommand("vital", "Find a linkage for the pattern and test vitality");
  c_vi->add_option("--graph", vi.graph)->required()->check(CLI::ExistingFile);
  c_vi->add_option("--pattern", vi.pattern)->required()->check(CLI::ExistingFile);

  ReduceArgs re;
  auto* c_re = app.add_subcommand("reduce", "Delete certified irrelevant vertices");
  c_re->add_option("--graph", re.graph)->required()->check(CLI::ExistingFile);
  c_re->add_option("--red", re.red, "Comma-separated annotated set R");
  c_re->add_option("--k", re.k)->check(CLI::NonNegativeNumber);
  c_re->add_option("--d", re.d)->check(CLI::NonNegativeNumber);
  c_re->add_option("--threshold", re.threshold)->check(CLI::PositiveNumber);
  c_re->add_option("--rules", re.rules)->check(CLI::IsMember({"both", "oracle", "clique"}));
  c_re->add_option("--engine", re.engine)->check(CLI::IsMember({"auto", "oracle", "dp"}));
  c_re->add_option("--trace", re.trace_out, "Write the reduction trace here");
  c_re->add_option("-o,--output", re.out, "Write the reduced graph here");

  RouteArgs ro;
  auto* c_ro = app.add_subcommand("route", "Route a pattern through a cylindrical mesh");
  c_ro->add_option("--rails", ro.rails)->check(CLI::PositiveNumber);
  c_ro->add_option("--cycles", ro.cycles)->check(CLI::PositiveNumber);
  c_ro->add_flag("--hub", ro.hub);
  c_ro->add_option("--surface", ro.surface)->check(CLI::IsMember({"disc", "cylinder"}));
  auto* pat_opt = c_ro->add_option("--pattern", ro.pattern)->check(CLI::ExistingFile);
  c_ro->add_option("--pairs", ro.pairs, "Pairs as a-b,c-d")->excludes(pat_opt);

  int hk = 2;
  auto* c_hk = app.add_subcommand("verify-hk", "Single-vertex deletion experiment on the decorated instance");
  c_hk->add_option("--k", hk)->check(CLI::PositiveNumber);

  BidimArgs bd;
  auto* c_bd = app.add_subcommand("bidim", "Largest grid R-minor up to a cap");
  c_bd->add_option("--graph", bd.graph)->required()->check(CLI::ExistingFile);
  c_bd->add_option("--red", bd.red);
  c_bd->add_option("--cap", bd.cap)->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cout << json{{"error", "UsageError"}, {"message", e.what()}, {"exit_code", kExitUsage}}.dump() << std::endl;
    std::cerr << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  }

  json result;
  int code = kExitOk;
  std::string command = app.get_subcommands().front()->get_name();
  try {
    if (*c_gen) code = run_gen(gen, gl, result);
    else if (*c_tw) code = run_tw(tw, result);
    else if (*c_dp) code = run_dp(dp, gl, result);
    else if (*c_fo) code = run_folio(fo, gl, result);
    else if (*c_vi) code = run_vital(vi, result);
    else if (*c_re) code = run_reduce(re, gl, result);
    else if (*c_ro) code = run_route(ro, result);
    else if (*c_hk) code = run_verify_hk(hk, result);
    else if (*c_bd) code = run_bidim(bd, result);
  } catch (const UsageError& e) {
    result = {{"error", "UsageError"}, {"message", e.what()}};
    code = kExitUsage;
  } catch (const Error& e) {
    result = {{"error", error_kind_name(e.kind())}, {"message", e.what()}};
    code = exit_code_for(e.kind());
  }
  result["command"] = command;
  result["exit_code"] = code;
  std::cout << result.dump() << std::endl;
  if (result.contains("error")) std::cerr << command << ": " << result["message"].get<std::string>() << '\n';
  return code;
}
