#include "gm/pipeline.hpp"

#include <set>

#include "doctest.h"
#include "gm/constructions.hpp"
#include "gm/error.hpp"
#include "test_util.hpp"

using namespace gm;

namespace {

Graph complete(int t, int offset = 0, int n = -1) {
  std::vector<Edge> e;
  for (int i = 0; i < t; ++i)
    for (int j = i + 1; j < t; ++j) e.emplace_back(offset + i, offset + j);
  return build_graph(n < 0 ? offset + t : n, e);
}

// Disjoint, connected, pairwise touching branch sets.
bool is_clique_model(const Graph& g, const MinorModel& m, int t) {
  if (static_cast<int>(m.size()) != t) return false;
  std::vector<int> owner(g.n(), -1);
  for (int i = 0; i < t; ++i) {
    if (m[i].empty()) return false;
    for (int v : m[i]) {
      if (v < 0 || v >= g.n() || owner[v] >= 0) return false;
      owner[v] = i;
    }
  }
  for (int i = 0; i < t; ++i) {
    std::vector<char> removed(g.n(), 1);
    for (int v : m[i]) removed[v] = 0;
    for (int v : m[i])
      if (!test::reaches(g, {m[i][0]}, {v}, removed)) return false;
  }
  for (int i = 0; i < t; ++i)
    for (int j = i + 1; j < t; ++j) {
      bool touch = false;
      for (auto [u, v] : g.edges())
        touch = touch || (owner[u] == i && owner[v] == j) || (owner[u] == j && owner[v] == i);
      if (!touch) return false;
    }
  return true;
}

// Every U avoiding Z and containing a whole branch set avoiding Z, scored by
// (|N(U)|, |U|); returns the vertices of the best-scoring sets.
std::set<int> best_far_sides(const Graph& g, const std::vector<int>& z, const MinorModel& model) {
  int n = g.n();
  std::set<int> zs(z.begin(), z.end());
  int best_order = n + 1, best_size = n + 1;
  std::set<int> out;
  for (unsigned u = 1; u < (1u << n); ++u) {
    bool ok = true;
    for (int v : zs) ok = ok && !((u >> v) & 1);
    if (!ok) continue;
    bool holds = false;
    for (const auto& x : model) {
      bool all = true;
      for (int v : x) all = all && ((u >> v) & 1);
      holds = holds || all;
    }
    if (!holds) continue;
    std::set<int> nb;
    for (auto [a, b] : g.edges()) {
      if (((u >> a) & 1) && !((u >> b) & 1)) nb.insert(b);
      if (((u >> b) & 1) && !((u >> a) & 1)) nb.insert(a);
    }
    int order = static_cast<int>(nb.size()), size = __builtin_popcount(u);
    if (order > best_order || (order == best_order && size > best_size)) continue;
    if (order < best_order || size < best_size) out.clear();
    best_order = order;
    best_size = size;
    for (int v = 0; v < n; ++v)
      if ((u >> v) & 1) out.insert(v);
  }
  return out;
}

// Lobe 0-1-2-3-0 carrying R = {0, 1}; 2 and 3 see every vertex of a clique on 4 .. 3 + c.
AnnotatedGraph lobe_and_clique(int c) {
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  for (int i = 4; i < 4 + c; ++i) {
    e.emplace_back(2, i);
    e.emplace_back(3, i);
    for (int j = i + 1; j < 4 + c; ++j) e.emplace_back(i, j);
  }
  return {build_graph(4 + c, e), {0, 1}};
}

struct BlobFixture {
  AnnotatedGraph host;
  int core = 0;  // vertices 0 .. core-1 are the original instance
};

// Γ̂_2 with R = T_2 plus a 12-clique whose vertices core, core+1, core+2
// are joined to three non-terminal core vertices.
BlobFixture gamma_with_blob() {
  GammaInstance gam = gamma_hat(2);
  int core = gam.graph.n();
  std::vector<Edge> e = gam.graph.edges();
  std::set<int> terms(gam.terminals.begin(), gam.terminals.end());
  std::vector<int> attach;
  for (int v = 0; v < core && attach.size() < 3; ++v)
    if (!terms.count(v)) attach.push_back(v);
  REQUIRE(attach.size() == 3);
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j) e.emplace_back(core + i, core + j);
  for (int i = 0; i < 3; ++i) e.emplace_back(attach[i], core + i);
  return {{build_graph(core + 12, e), gam.terminals}, core};
}

AnnotatedGraph prefix_replay(const AnnotatedGraph& input, const ReductionTrace& trace, size_t count) {
  ReductionTrace head;
  head.deletions.assign(trace.deletions.begin(), trace.deletions.begin() + count);
  return replay(input, head);
}

int local_id(const AnnotatedGraph& input, const ReductionTrace& trace, size_t before, int input_vertex) {
  // Position of input_vertex after the first `before` deletions.
  std::set<int> gone;
  for (size_t i = 0; i < before; ++i) gone.insert(trace.deletions[i].vertex);
  int id = 0;
  for (int v = 0; v < input.graph.n(); ++v) {
    if (gone.count(v)) continue;
    if (v == input_vertex) return id;
    ++id;
  }
  return -1;
}

FolioConfig wide_oracle() {
  FolioConfig fc;
  fc.oracle_vertex_cap = 24;
  return fc;
}

}  // namespace

TEST_CASE("clique rule order") {
  CHECK(clique_rule_order(0, 0) == 1);
  CHECK(clique_rule_order(1, 0) == 3);
  CHECK(clique_rule_order(2, 0) == 6);
  CHECK(clique_rule_order(4, 0) == 11);
  CHECK(clique_rule_order(2, 1) == 9);
  CHECK(clique_rule_order(3, 2) == 20);
}

TEST_CASE("dense clique minor on named graphs") {
  SUBCASE("K8, t = 5") {
    Graph k8 = complete(8);
    auto r = dense_clique_minor(k8, 5);
    REQUIRE(r.model);
    CHECK(is_clique_model(k8, *r.model, 5));
    CHECK(verify_minor_model(k8, complete(5), *r.model));
  }
  SUBCASE("tree, t = 4") {
    Graph tree = build_graph(7, {{0, 1}, {0, 2}, {1, 3}, {1, 4}, {2, 5}, {2, 6}});
    auto r = dense_clique_minor(tree, 4);
    CHECK_FALSE(r.model);
    CHECK(r.source.find("density") != std::string::npos);
  }
  SUBCASE("G(12, all edges), t = 6") {
    Graph k12 = complete(12);
    auto r = dense_clique_minor(k12, 6);
    REQUIRE(r.model);
    CHECK(is_clique_model(k12, *r.model, 6));
  }
  SUBCASE("K5 is exactly dense enough for t = 4") {
    Graph k5 = complete(5);
    auto r = dense_clique_minor(k5, 4);
    REQUIRE(r.model);
    CHECK(r.source == "density");
    CHECK(is_clique_model(k5, *r.model, 4));
  }
  SUBCASE("trivial orders") {
    Graph one = build_graph(1, {});
    auto r1 = dense_clique_minor(one, 1);
    REQUIRE(r1.model);
    CHECK(r1.model->size() == 1);
    auto r0 = dense_clique_minor(build_graph(0, {}), 0);
    REQUIRE(r0.model);
    CHECK(r0.model->empty());
    CHECK_FALSE(dense_clique_minor(build_graph(0, {}), 1).model);
  }
}

TEST_CASE("dense graphs always yield a model through the density route") {
  std::mt19937 rng(11);
  int dense_seen = 0;
  for (int it = 0; it < 120; ++it) {
    int n = 6 + static_cast<int>(rng() % 30);
    double p = 0.3 + 0.7 * (rng() % 100) / 100.0;
    Graph g = test::random_graph(rng, n, p);
    for (int t = 1; t <= 7; ++t) {
      bool dense = 8LL * g.m() >= (1LL << t) * g.n();
      auto r = dense_clique_minor(g, t);
      if (dense) {
        ++dense_seen;
        REQUIRE(r.model);
        CHECK(r.source == "density");
      }
      if (r.model) CHECK(is_clique_model(g, *r.model, t));
    }
  }
  CHECK(dense_seen > 200);
}

TEST_CASE("sparse graphs: a clique is found exactly when one exists") {
  std::mt19937 rng(12);
  for (int it = 0; it < 150; ++it) {
    int n = 5 + static_cast<int>(rng() % 5);
    Graph g = test::random_graph(rng, n, 0.5);
    for (int t = 3; t <= 5; ++t) {
      bool dense = 8LL * g.m() >= (1LL << t) * g.n();
      if (dense) continue;
      // Naive clique search over all subsets.
      bool has = false;
      for (unsigned s = 0; s < (1u << n) && !has; ++s) {
        if (__builtin_popcount(s) != t) continue;
        bool all = true;
        for (int u = 0; u < n; ++u)
          for (int v = u + 1; v < n; ++v)
            if (((s >> u) & 1) && ((s >> v) & 1) && !g.adjacent(u, v)) all = false;
        has = all;
      }
      auto r = dense_clique_minor(g, t);
      CHECK(r.model.has_value() == has);
      if (r.model) CHECK(is_clique_model(g, *r.model, t));
    }
  }
}

TEST_CASE("clique irrelevant vertex on the lobe fixture") {
  AnnotatedGraph host = lobe_and_clique(6);
  auto found = dense_clique_minor(host.graph, clique_rule_order(2, 0));
  REQUIRE(found.model);
  auto v = clique_irrelevant_vertex(host, 0, *found.model);
  REQUIRE(v);
  CHECK(*v >= 4);
  CHECK(best_far_sides(host.graph, host.annotated, *found.model).count(*v));
  CHECK(strongly_irrelevant(host, 2, 0, *v));
  CHECK(strongly_irrelevant(host, 1, 0, *v));
}

TEST_CASE("clique irrelevant vertex with d = 1 on a 13-vertex fixture") {
  AnnotatedGraph host = lobe_and_clique(9);
  auto found = dense_clique_minor(host.graph, clique_rule_order(2, 1));
  REQUIRE(found.model);
  auto v = clique_irrelevant_vertex(host, 1, *found.model);
  REQUIRE(v);
  CHECK(*v >= 4);
  CHECK(strongly_irrelevant(host, 2, 1, *v, wide_oracle()));
}

TEST_CASE("clique irrelevant vertex matches brute-force separations") {
  std::mt19937 rng(13);
  int checked = 0;
  for (int it = 0; it < 80; ++it) {
    int n = 6 + static_cast<int>(rng() % 6);
    Graph g = test::random_connected_graph(rng, n, 0.55);
    int l = static_cast<int>(rng() % 3);
    std::vector<int> perm = test::random_permutation(rng, n);
    std::vector<int> r(perm.begin(), perm.begin() + l);
    int t = clique_rule_order(l, 0);
    auto found = dense_clique_minor(g, t);
    if (!found.model) continue;
    AnnotatedGraph host{g, r};
    auto v = clique_irrelevant_vertex(host, 0, *found.model);
    REQUIRE(v);
    CHECK(std::find(r.begin(), r.end(), *v) == r.end());
    CHECK(best_far_sides(g, r, *found.model).count(*v));
    if (l > 0) CHECK(strongly_irrelevant(host, l, 0, *v));
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("clique irrelevant vertex edge cases") {
  SUBCASE("l = 0, d = 0, t = 1") {
    AnnotatedGraph host{build_graph(1, {}), {}};
    auto v = clique_irrelevant_vertex(host, 0, {{0}});
    REQUIRE(v);
    CHECK(*v == 0);
  }
  SUBCASE("terminals in every branch set need more terminals than the order allows") {
    AnnotatedGraph host{complete(6), {0, 1, 2, 3, 4, 5}};
    MinorModel m{{0}, {1}, {2}, {3}, {4}, {5}};
    CHECK_THROWS_WITH_AS(clique_irrelevant_vertex(host, 0, m), doctest::Contains("clique"), Error);
    try {
      clique_irrelevant_vertex(host, 0, m);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CliqueTooSmall);
    }
  }
  SUBCASE("order below the bound") {
    AnnotatedGraph host = lobe_and_clique(6);
    MinorModel m{{4}, {5}, {6}, {7}, {8}};
    try {
      clique_irrelevant_vertex(host, 0, m);
      FAIL("expected CliqueTooSmall");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CliqueTooSmall);
    }
  }
  SUBCASE("not a model") {
    AnnotatedGraph host = lobe_and_clique(6);
    MinorModel m{{0}, {4}, {5}, {6}, {7}, {8}};  // 0 misses the clique
    try {
      clique_irrelevant_vertex(host, 0, m);
      FAIL("expected PreconditionViolated");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PreconditionViolated);
    }
  }
}

TEST_CASE("reduce: gamma-hat with a pendant blob") {
  BlobFixture fx = gamma_with_blob();
  PipelineConfig cfg;
  cfg.rules = RuleSet::CliqueRule;
  ReductionResult r = reduce(fx.host, 4, 0, cfg);
  const ReductionTrace& tr = r.trace;
  // K_11 survives until two blob vertices are gone.
  REQUIRE(tr.deletions.size() == 2);
  for (const Deletion& del : tr.deletions) {
    CHECK(del.justification == "clique-rule");
    CHECK(del.vertex >= fx.core + 3);
  }
  CHECK(tr.status == ReductionStatus::Stuck);
  for (int v = 0; v < fx.core; ++v) CHECK(tr.final_to_input[v] == v);
  FolioConfig fc = wide_oracle();
  CHECK(kd_folio(fx.host, 4, 0, FolioEngine::Oracle, fc) == kd_folio(r.reduced, 4, 0, FolioEngine::Oracle, fc));
  for (size_t i = 0; i < tr.deletions.size(); ++i) {
    AnnotatedGraph before = prefix_replay(fx.host, tr, i);
    CHECK(strongly_irrelevant(before, 4, 0, local_id(fx.host, tr, i, tr.deletions[i].vertex), fc));
  }
}

TEST_CASE("reduce: both rules down to the threshold") {
  BlobFixture fx = gamma_with_blob();
  PipelineConfig cfg;
  cfg.folio = wide_oracle();
  ReductionResult r = reduce(fx.host, 2, 0, cfg);
  const ReductionTrace& tr = r.trace;
  CHECK(tr.status == ReductionStatus::ThresholdMet);
  CHECK(tr.treewidth.kind == WidthKind::Exact);
  CHECK(tr.treewidth.width <= 4);
  CHECK(tr.deletions.size() >= 2);
  CHECK(tr.deletions[0].justification == "clique-rule");
  for (const Deletion& del : tr.deletions) CHECK(del.vertex >= fx.core);
  CHECK(kd_folio(fx.host, 2, 0, FolioEngine::Oracle, cfg.folio) == kd_folio(r.reduced, 2, 0, FolioEngine::Oracle, cfg.folio));
  CHECK(reduce(r.reduced, 2, 0, cfg).trace.deletions.empty());
}

TEST_CASE("reduce: already under the threshold") {
  GammaInstance gam = gamma_hat(2);
  AnnotatedGraph host{gam.graph, gam.terminals};
  ReductionResult r = reduce(host, 4, 0);
  CHECK(r.trace.deletions.empty());
  CHECK(r.trace.status == ReductionStatus::ThresholdMet);
  CHECK(r.trace.treewidth.width == 3);
  CHECK(r.reduced.graph.edges() == host.graph.edges());
}

TEST_CASE("reduce: an R-free component is deleted by the oracle") {
  // K5 fully annotated (width 4, nothing deletable) next to a 4-cycle with a chord.
  std::vector<Edge> e = complete(5).edges();
  for (auto [a, b] : std::vector<Edge>{{5, 6}, {6, 7}, {7, 8}, {8, 5}, {5, 7}}) e.emplace_back(a, b);
  AnnotatedGraph host{build_graph(9, e), {0, 1, 2, 3, 4}};
  PipelineConfig cfg;
  cfg.treewidth_threshold = 3;
  ReductionResult r = reduce(host, 1, 0, cfg);
  CHECK(r.trace.status == ReductionStatus::Stuck);
  std::set<int> gone;
  for (const Deletion& del : r.trace.deletions) {
    CHECK(del.justification == "oracle");
    gone.insert(del.vertex);
  }
  CHECK(gone == std::set<int>{5, 6, 7, 8});
  CHECK(r.reduced.graph.n() == 5);
  CHECK(kd_folio(host, 1, 0) == kd_folio(r.reduced, 1, 0));
}

TEST_CASE("reduce: oracle-only and clique-only agree on soundness") {
  AnnotatedGraph host = lobe_and_clique(6);
  PipelineConfig cfg;
  cfg.treewidth_threshold = 2;
  for (RuleSet rules : {RuleSet::Oracle, RuleSet::CliqueRule, RuleSet::Both}) {
    cfg.rules = rules;
    ReductionResult r = reduce(host, 2, 0, cfg);
    CHECK(kd_folio(host, 2, 0) == kd_folio(r.reduced, 2, 0));
    CHECK(r.trace.deletions.size() >= 1);
    for (size_t i = 0; i < r.trace.deletions.size(); ++i) {
      AnnotatedGraph before = prefix_replay(host, r.trace, i);
      CHECK(strongly_irrelevant(before, 2, 0, local_id(host, r.trace, i, r.trace.deletions[i].vertex)));
    }
  }
}

TEST_CASE("reduce: threads do not change the trace") {
  AnnotatedGraph host = lobe_and_clique(6);
  PipelineConfig cfg;
  cfg.treewidth_threshold = 1;
  cfg.rules = RuleSet::Oracle;
  ReductionResult one = reduce(host, 2, 1, cfg);
  cfg.threads = 3;
  ReductionResult three = reduce(host, 2, 1, cfg);
  CHECK(trace_json(one.trace) == trace_json(three.trace));
}

TEST_CASE("replay, idempotence and soundness on random decorated cores") {
  std::mt19937 rng(14);
  FolioConfig fc = wide_oracle();
  int clique_deletions = 0;
  for (int it = 0; it < 12; ++it) {
    int core = 4 + static_cast<int>(rng() % 3);
    Graph base = test::random_connected_graph(rng, core, 0.4);
    int l = 1 + static_cast<int>(rng() % 2);
    int d = static_cast<int>(rng() % 2);
    int k = 1 + static_cast<int>(rng() % 2);
    int t = clique_rule_order(l, d);
    std::vector<Edge> e = base.edges();
    int n = core;
    // Pendant clique behind a cut of size 1..3.
    int cut = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < t; ++i)
      for (int j = i + 1; j < t; ++j) e.emplace_back(n + i, n + j);
    for (int i = 0; i < cut; ++i) e.emplace_back(static_cast<int>(rng() % core), n + i);
    n += t;
    // R-free path component.
    e.emplace_back(n, n + 1);
    n += 2;
    std::vector<int> r;
    for (int i = 0; i < l; ++i) r.push_back(i);
    AnnotatedGraph host{build_graph(n, e), r};
    PipelineConfig cfg;
    cfg.treewidth_threshold = 1;
    cfg.folio = fc;
    ReductionTrace tr;
    Folio solved = solve_folio(host, k, d, cfg, &tr);
    CHECK(solved == kd_folio(host, k, d, FolioEngine::Oracle, fc));
    AnnotatedGraph again = replay(host, tr);
    CHECK(again.graph.edges() == tr.final_graph.graph.edges());
    CHECK(again.annotated == tr.final_graph.annotated);
    CHECK(reduce(tr.final_graph, k, d, cfg).trace.deletions.empty());
    for (size_t i = 0; i < tr.deletions.size(); ++i) {
      if (tr.deletions[i].justification != "clique-rule") continue;
      ++clique_deletions;
      AnnotatedGraph before = prefix_replay(host, tr, i);
      CHECK(strongly_irrelevant(before, k, d, local_id(host, tr, i, tr.deletions[i].vertex), fc));
    }
  }
  CHECK(clique_deletions > 0);
}

TEST_CASE("solve_folio named cases") {
  SUBCASE("gamma-hat keeps the disjoint paths encoding") {
    GammaInstance gam = gamma_hat(2);
    AnnotatedGraph host{gam.graph, gam.terminals};
    Folio f = solve_folio(host, 4, 0);
    CHECK(f.contains(paths_pattern(2)));
    CHECK(f == kd_folio(host, 4, 0));
  }
  SUBCASE("empty R, k = 0, d = 1") {
    AnnotatedGraph host{build_graph(3, {{0, 1}}), {}};
    Folio f = solve_folio(host, 0, 1);
    CHECK(f == kd_folio(host, 0, 1));
    // The empty graph and K_1 fit detail 1; K_2 has two non-root vertices.
    CHECK(f.size() == 2);
  }
  SUBCASE("pendant blob") {
    BlobFixture fx = gamma_with_blob();
    PipelineConfig cfg;
    cfg.folio = wide_oracle();
    Folio f = solve_folio(fx.host, 1, 0, cfg);
    CHECK(f == kd_folio(fx.host, 1, 0, FolioEngine::Oracle, cfg.folio));
  }
}

TEST_CASE("trace json") {
  AnnotatedGraph host = lobe_and_clique(6);
  PipelineConfig cfg;
  cfg.treewidth_threshold = 2;
  ReductionResult r = reduce(host, 2, 0, cfg);
  std::string js = trace_json(r.trace);
  CHECK(js.find("\"deletions\"") != std::string::npos);
  CHECK(js.find("\"status\":\"threshold-met\"") != std::string::npos);
  CHECK(js.find("clique-rule") != std::string::npos);
  // Keys come out sorted.
  CHECK(js.find("\"deletions\"") < js.find("\"final_graph\""));
  CHECK(js.find("\"final_graph\"") < js.find("\"status\""));
}

TEST_CASE("reduce errors") {
  AnnotatedGraph host = lobe_and_clique(6);
  PipelineConfig cfg;
  cfg.treewidth_threshold = 0;
  CHECK_THROWS_AS(reduce(host, 2, 0, cfg), Error);
  AnnotatedGraph bad{host.graph, {42}};
  CHECK_THROWS_AS(reduce(bad, 1, 0), Error);
  PipelineConfig tight;
  tight.treewidth_threshold = 1;
  tight.rules = RuleSet::Oracle;
  tight.engine = IrrelevanceEngine::Dp;
  tight.folio.state_budget = 10;
  try {
    reduce(host, 2, 1, tight);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BudgetExceeded);
  }
}
