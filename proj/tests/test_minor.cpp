#include <chrono>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "gm/canonical.hpp"
#include "gm/minor.hpp"
#include "test_util.hpp"

using namespace gm;

namespace {

Graph complete(int n) {
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return build_graph(n, e);
}

Graph cycle(int n) {
  std::vector<Edge> e;
  for (int v = 0; v < n; ++v) e.emplace_back(v, (v + 1) % n);
  return build_graph(n, e);
}

Graph path_graph(int n) {
  std::vector<Edge> e;
  for (int v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return build_graph(n, e);
}

}  // namespace

TEST_CASE("verify_minor_model basics") {
  Graph k1 = build_graph(1, {});
  Graph any = cycle(5);
  CHECK(verify_minor_model(any, k1, {{3}}));
  Graph k2 = complete(2);
  CHECK(verify_minor_model(k2, k2, {{0}, {1}}));
  CHECK_FALSE(verify_minor_model(k2, k2, {{0}, {0}}));
  CHECK_FALSE(verify_minor_model(any, k2, {{0}, {2}}));
  CHECK_FALSE(verify_minor_model(any, k2, {{0, 2}, {1}}));  // disconnected branch set
}

TEST_CASE("K3 in C4: exhaustive model enumeration") {
  // Contracting one edge of C4 yields a triangle, so K3 is a minor of C4.
  Graph c4 = cycle(4), k3 = complete(3);
  CHECK(test::brute_force_minor(c4, k3));
  int valid = 0;
  for (int code = 0; code < 256; ++code) {
    MinorModel m(3);
    for (int v = 0; v < 4; ++v) {
      int a = (code >> (2 * v)) & 3;
      if (a < 3) m[a].push_back(v);
    }
    if (verify_minor_model(c4, k3, m)) ++valid;
  }
  // One contracted edge (4 choices) times 3! labellings.
  CHECK(valid == 24);
  auto found = find_minor(c4, k3);
  REQUIRE(found);
  CHECK(verify_minor_model(c4, k3, *found));
  CHECK_FALSE(find_minor(cycle(4), complete(4)));
}

TEST_CASE("find_minor small fixed cases") {
  Graph g3 = grid_pattern(3, 3);
  CHECK(test::brute_force_minor(g3, complete(4)));
  auto m = find_minor(g3, complete(4));
  REQUIRE(m);
  CHECK(verify_minor_model(g3, complete(4), *m));

  auto c = find_minor(complete(4), cycle(4));
  REQUIRE(c);
  CHECK(verify_minor_model(complete(4), cycle(4), *c));

  auto start = std::chrono::steady_clock::now();
  CHECK_FALSE(find_minor(grid_pattern(4, 4), complete(5)));
  CHECK_FALSE(find_minor(test::permute(grid_pattern(4, 4), {5, 0, 9, 2, 14, 7, 1, 12, 3, 11, 4, 15, 6, 13, 8, 10}),
                         complete(5)));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("K5 absence in the 4x4 grid took " << secs << " s");

  MinorConfig small;
  small.pattern_cap = 3;
  CHECK_THROWS_AS(find_minor(g3, complete(4), small), Error);
}

TEST_CASE("find_minor agrees with exhaustive search") {
  std::mt19937 rng(5);
  std::vector<Graph> patterns = {complete(3), cycle(4), complete(4), path_graph(3),
                                 build_graph(4, {{0, 1}, {2, 3}}), build_graph(4, {{0, 1}, {0, 2}, {0, 3}})};
  int present = 0, absent = 0;
  for (int trial = 0; trial < 120; ++trial) {
    Graph host = test::random_graph(rng, 4 + trial % 4, 0.45);
    const Graph& pat = patterns[trial % patterns.size()];
    bool truth = test::brute_force_minor(host, pat);
    auto m = find_minor(host, pat);
    CHECK(m.has_value() == truth);
    if (m) CHECK(verify_minor_model(host, pat, *m));
    (truth ? present : absent)++;
  }
  CHECK(present > 10);
  CHECK(absent > 10);
}

TEST_CASE("rooted minors") {
  // Single rooted vertex is always present.
  Graph host = cycle(5);
  RootedGraph h{host, {2}};
  RootedGraph single{build_graph(1, {}), {0}};
  auto m = find_rooted_minor(h, single);
  REQUIRE(m);
  CHECK((*m)[0] == std::vector<int>{2});

  RootedGraph edge_host{path_graph(2), {0, 1}};
  RootedGraph k2{complete(2), {0, 1}};
  CHECK(find_rooted_minor(edge_host, k2));
  CHECK_THROWS_AS(find_rooted_minor(edge_host, single), Error);

  // Doubled-root encoding of two disjoint paths on a 4-cycle 0-1-2-3.
  RootedGraph c4{cycle(4), {0, 1, 3, 2}};
  RootedGraph two{build_graph(2, {}), {0, 0, 1, 1}};
  CHECK(find_rooted_minor(c4, two));
  RootedGraph crossed{cycle(4), {0, 2, 1, 3}};
  CHECK_FALSE(find_rooted_minor(crossed, two));
}

TEST_CASE("rooted minors agree with exhaustive search") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 120; ++trial) {
    int n = 4 + trial % 4;
    Graph host = test::random_graph(rng, n, 0.4);
    int h = 2 + trial % 2;
    Graph pat = test::random_graph(rng, h, 0.6);
    int k = 1 + trial % 3;
    std::vector<int> hr, pr;
    for (int i = 0; i < k; ++i) {
      hr.push_back(static_cast<int>(rng() % n));
      pr.push_back(static_cast<int>(rng() % h));
    }
    bool conflict = false;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (hr[i] == hr[j] && pr[i] != pr[j]) conflict = true;
    bool truth = !conflict && test::brute_force_minor(host, pat, hr, pr);
    auto m = find_rooted_minor({host, hr}, {pat, pr});
    CHECK(m.has_value() == truth);
    if (m) CHECK(verify_rooted_model({host, hr}, {pat, pr}, *m));
  }
}

TEST_CASE("red minors") {
  Graph g3 = grid_pattern(3, 3);
  std::vector<int> all(9);
  for (int v = 0; v < 9; ++v) all[v] = v;
  CHECK(find_red_minor({g3, all}, complete(4)).has_value() == find_minor(g3, complete(4)).has_value());
  CHECK_FALSE(find_red_minor({g3, {}}, complete(1)));
  std::mt19937 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 4 + trial % 4;
    Graph host = test::random_graph(rng, n, 0.45);
    std::vector<int> red;
    for (int v = 0; v < n; ++v)
      if (rng() % 2) red.push_back(v);
    Graph pat = trial % 2 ? complete(3) : path_graph(3);
    bool truth = !red.empty() && test::brute_force_minor(host, pat, {}, {}, red);
    auto m = find_red_minor({host, red}, pat);
    CHECK(m.has_value() == truth);
    if (m) CHECK(verify_red_model({host, red}, pat, *m));
  }
}

TEST_CASE("block soundness") {
  std::mt19937 rng(17);
  std::vector<Graph> patterns = {complete(3), cycle(4), complete(4)};
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    Graph host = test::random_graph(rng, 5 + trial % 6, 0.35);
    const Graph& pat = patterns[trial % 3];
    if (!find_minor(host, pat)) continue;
    bool some_block = false;
    for (const auto& b : blocks(host).blocks)
      if (find_minor(induced_subgraph(host, b).graph, pat)) some_block = true;
    CHECK(some_block);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("canonical codes") {
  Graph k3 = complete(3);
  Graph k3b = test::permute(k3, {2, 0, 1});
  CHECK(canonical_code(RootedGraph{k3, {0}}) == canonical_code(RootedGraph{k3b, {2}}));
  CHECK(canonical_code(RootedGraph{k3, {0}}) != canonical_code(RootedGraph{k3, {0, 0}}));
  CHECK(isomorphic(cycle(4), test::permute(cycle(4), {3, 1, 0, 2})));
  CHECK_FALSE(isomorphic(cycle(4), path_graph(4)));

  // A 5-regular graph on six vertices must be K6.
  std::vector<Edge> e;
  for (int u = 0; u < 6; ++u)
    for (int v = u + 1; v < 6; ++v)
      e.emplace_back(v, u);
  Graph r = build_graph(6, e);
  for (int v = 0; v < 6; ++v) CHECK(r.degree(v) == 5);
  CHECK(isomorphic(complete(6), test::permute(r, {5, 4, 3, 2, 1, 0})));

  // Rooted path: which end carries the root matters only up to symmetry.
  Graph p3 = path_graph(3);
  CHECK(canonical_code(RootedGraph{p3, {0}}) == canonical_code(RootedGraph{p3, {2}}));
  CHECK(canonical_code(RootedGraph{p3, {0}}) != canonical_code(RootedGraph{p3, {1}}));
  CHECK(canonical_code(RootedGraph{p3, {0, 2}}) == canonical_code(RootedGraph{p3, {2, 0}}));
  CHECK(canonical_code(RootedGraph{p3, {0, 1}}) != canonical_code(RootedGraph{p3, {1, 0}}));
}

TEST_CASE("5-regular graphs on 8 vertices have three distinct codes") {
  // Complements of the 2-regular graphs on 8 vertices: C8, C5+C3, C4+C4.
  auto complement_of_cycles = [](const std::vector<int>& lengths) {
    std::vector<Edge> cyc;
    int base = 0;
    for (int len : lengths) {
      for (int i = 0; i < len; ++i) cyc.emplace_back(base + i, base + (i + 1) % len);
      base += len;
    }
    Graph c = build_graph(8, cyc);
    std::vector<Edge> e;
    for (int u = 0; u < 8; ++u)
      for (int v = u + 1; v < 8; ++v)
        if (!c.adjacent(u, v)) e.emplace_back(u, v);
    return build_graph(8, e);
  };
  std::vector<Graph> g = {complement_of_cycles({8}), complement_of_cycles({5, 3}), complement_of_cycles({4, 4})};
  for (const auto& x : g) {
    CHECK(is_connected(x));
    for (int v = 0; v < 8; ++v) CHECK(x.degree(v) == 5);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) CHECK_FALSE(test::brute_force_isomorphic(g[i], g[j]));
  std::set<CanonicalCode> codes;
  for (const auto& x : g) codes.insert(canonical_code(x));
  CHECK(codes.size() == 3);
}

TEST_CASE("canonical code is invariant under root-fixing relabelings and decodes") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 1 + trial % 9;
    Graph g = test::random_graph(rng, n, 0.4);
    std::vector<int> roots;
    int k = static_cast<int>(rng() % 3);
    for (int i = 0; i < k; ++i) roots.push_back(static_cast<int>(rng() % n));
    auto p = test::random_permutation(rng, n);
    Graph h = test::permute(g, p);
    std::vector<int> hroots;
    for (int r : roots) hroots.push_back(p[r]);
    CanonicalCode c = canonical_code(RootedGraph{g, roots});
    CHECK(c == canonical_code(RootedGraph{h, hroots}));
    RootedGraph back = decode_code(c);
    CHECK(back.graph.n() == n);
    CHECK(back.graph.m() == g.m());
    CHECK(canonical_code(back) == c);
    CHECK(code_from_hex(code_to_hex(c)) == c);
  }
}

TEST_CASE("canonical codes separate non-isomorphic graphs") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 3 + trial % 5;
    Graph a = test::random_graph(rng, n, 0.5), b = test::random_graph(rng, n, 0.5);
    CHECK((canonical_code(a) == canonical_code(b)) == test::brute_force_isomorphic(a, b));
  }
}

TEST_CASE("automorphism orbits") {
  auto orb = automorphism_orbits(path_graph(4));
  CHECK(orb == std::vector<int>{0, 1, 1, 0});
  auto star = automorphism_orbits(build_graph(4, {{0, 1}, {0, 2}, {0, 3}}));
  CHECK(star == std::vector<int>{0, 1, 1, 1});
}

TEST_CASE("bidim") {
  for (int n = 1; n <= 3; ++n) {
    Graph g = grid_pattern(n, n);
    std::vector<int> all(n * n);
    for (int v = 0; v < n * n; ++v) all[v] = v;
    CHECK(bidim({g, all}, n) == n);
  }
  MinorConfig wide;
  wide.pattern_cap = 16;
  Graph g4 = grid_pattern(4, 4);
  std::vector<int> all(16);
  for (int v = 0; v < 16; ++v) all[v] = v;
  CHECK(bidim({g4, all}, 4, wide) == 4);
  CHECK_THROWS_AS(bidim({g4, all}, 4), Error);
  CHECK(bidim({g4, {}}, 4) == 0);
}

TEST_CASE("bidim monotonicity and cardinality bound") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 5 + trial % 5;
    Graph g = test::random_connected_graph(rng, n, 0.35);
    std::vector<int> r, s;
    for (int v = 0; v < n; ++v) {
      if (rng() % 2) r.push_back(v);
      else if (rng() % 3 == 0) s.push_back(v);
    }
    int base = bidim({g, r}, 3);
    std::vector<int> rs = r;
    rs.insert(rs.end(), s.begin(), s.end());
    int more = bidim({g, rs}, 3);
    CHECK(more <= base + static_cast<int>(s.size()));
    CHECK(more >= base);
    CHECK(base * base <= static_cast<int>(r.size()));
  }
}
