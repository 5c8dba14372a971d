#include <random>
#include <sstream>

#include "doctest.h"
#include "gm/decomposition.hpp"
#include "gm/error.hpp"
#include "test_util.hpp"

using namespace gm;

namespace {

// Treewidth as the minimum over all elimination orderings of the largest
// neighbourhood at elimination time. Factorial; n <= 9.
int treewidth_by_all_orderings(const Graph& g) {
  int n = g.n();
  if (n == 0) return -1;
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  int best = n - 1;
  do {
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (auto [u, v] : g.edges()) adj[u][v] = adj[v][u] = 1;
    std::vector<char> gone(n, 0);
    int width = 0;
    for (int v : p) {
      std::vector<int> nb;
      for (int w = 0; w < n; ++w)
        if (!gone[w] && adj[v][w]) nb.push_back(w);
      width = std::max(width, static_cast<int>(nb.size()));
      if (width >= best) break;
      for (int a : nb)
        for (int b : nb)
          if (a != b) adj[a][b] = 1;
      gone[v] = 1;
    }
    best = std::min(best, width);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

Graph grid_graph(int rows, int cols) {
  std::vector<Edge> e;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.emplace_back(r * cols + c, r * cols + c + 1);
      if (r + 1 < rows) e.emplace_back(r * cols + c, (r + 1) * cols + c);
    }
  return build_graph(rows * cols, e);
}

Graph cycle_graph(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return build_graph(n, e);
}

TreeDecomposition single_bag(const Graph& g) {
  TreeDecomposition td;
  td.tree = build_graph(1, {});
  std::vector<int> all(g.n());
  for (int i = 0; i < g.n(); ++i) all[i] = i;
  td.bags = {all};
  return td;
}

}  // namespace

TEST_CASE("validate_td accepts single bags and rejects missing edges") {
  Graph g = grid_graph(3, 3);
  TdCheck c = validate_td(g, single_bag(g));
  CHECK(c.valid);
  CHECK(c.width == 8);

  TreeDecomposition bad;
  bad.tree = build_graph(2, {{0, 1}});
  bad.bags = {{0, 1, 2, 3, 4, 5, 6, 7}, {8}};
  CHECK_FALSE(validate_td(g, bad).valid);

  // Vertex 0 appears in two bags that are not connected through the tree.
  TreeDecomposition broken;
  Graph p3 = build_graph(3, {{0, 1}, {1, 2}});
  broken.tree = build_graph(3, {{0, 1}, {1, 2}});
  broken.bags = {{0, 1}, {1, 2}, {0}};
  CHECK_FALSE(validate_td(p3, broken).valid);
}

TEST_CASE("row sweep of the n x n grid gives a width-n path decomposition") {
  for (int n = 2; n <= 6; ++n) {
    Graph g = grid_graph(n, n);
    std::vector<int> order(n * n);
    for (int i = 0; i < n * n; ++i) order[i] = i;
    TreeDecomposition pd = pd_from_ordering(g, order);
    TdCheck c = validate_td(g, pd);
    CHECK(c.valid);
    CHECK(c.width == n);
    CHECK(c.adhesion <= n);
  }
}

TEST_CASE("exact treewidth on small named graphs") {
  CHECK(exact_treewidth(build_graph(6, {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {3, 5}})).width == 1);
  CHECK(exact_treewidth(build_graph(3, {})).width == 0);
  CHECK(exact_treewidth(cycle_graph(7)).width == 2);
  std::vector<Edge> k5;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) k5.emplace_back(i, j);
  CHECK(exact_treewidth(build_graph(5, k5)).width == 4);

  Graph g33 = grid_graph(3, 3);
  TreewidthResult r = exact_treewidth(g33);
  CHECK(r.width == 3);
  CHECK(treewidth_by_all_orderings(g33) == 3);
  TdCheck c = validate_td(g33, r.td);
  CHECK(c.valid);
  CHECK(c.width == 3);

  TreewidthResult capped = exact_treewidth(grid_graph(4, 4), 2);
  CHECK(capped.above);
  CHECK(capped.width > 2);
  CHECK(exact_treewidth(grid_graph(4, 4)).width == 4);
}

TEST_CASE("exact treewidth agrees with all-orderings brute force") {
  std::mt19937 rng(11);
  for (int it = 0; it < 120; ++it) {
    int n = 2 + static_cast<int>(rng() % 7);
    Graph g = test::random_graph(rng, n, 0.2 + 0.1 * (it % 6));
    TreewidthResult r = exact_treewidth(g);
    CHECK(r.width == treewidth_by_all_orderings(g));
    TdCheck c = validate_td(g, r.td);
    CHECK(c.valid);
    CHECK(c.width == r.width);
  }
}

TEST_CASE("treewidth is monotone under vertex deletion") {
  std::mt19937 rng(12);
  for (int it = 0; it < 40; ++it) {
    int n = 4 + static_cast<int>(rng() % 7);
    Graph g = test::random_connected_graph(rng, n, 0.35);
    int tw = exact_treewidth(g).width;
    for (int v = 0; v < n; ++v) CHECK(exact_treewidth(delete_vertices(g, {v}).graph).width <= tw);
  }
}

TEST_CASE("exact pathwidth is at least treewidth and its ordering realises it") {
  std::mt19937 rng(13);
  for (int it = 0; it < 40; ++it) {
    int n = 3 + static_cast<int>(rng() % 8);
    Graph g = test::random_connected_graph(rng, n, 0.3);
    std::vector<int> order;
    int pw = exact_pathwidth(g, &order);
    CHECK(pw >= exact_treewidth(g).width);
    TdCheck c = validate_td(g, pd_from_ordering(g, order));
    CHECK(c.valid);
    CHECK(c.width == pw);
  }
}

TEST_CASE("heuristic decompositions validate") {
  std::mt19937 rng(14);
  for (int it = 0; it < 30; ++it) {
    Graph g = test::random_graph(rng, 5 + static_cast<int>(rng() % 30), 0.15);
    TreeDecomposition td = heuristic_td(g);
    TdCheck c = validate_td(g, td);
    CHECK(c.valid);
    CHECK(c.width >= degeneracy(g));
    CHECK(c.width >= minor_min_width(g));
  }
}

TEST_CASE("C5 certificates use a bramble of order 3") {
  Graph c5 = cycle_graph(5);
  TreewidthCertificates c = treewidth_certificates(c5, 2);
  CHECK(c.lower_kind == LowerCertificateKind::Bramble);
  CHECK(validate_bramble(c5, c.bramble));
  CHECK(bramble_order(c5, c.bramble) >= 3);
  CHECK(validate_certificates(c5, 2, c));
  CHECK(validate_td(c5, c.upper).width == 2);
}

TEST_CASE("brambles: validation and order") {
  Graph c4 = cycle_graph(4);
  // Singletons {0},{1} touch; {0},{2} do not.
  CHECK(validate_bramble(c4, {{0}, {1}}));
  CHECK_FALSE(validate_bramble(c4, {{0}, {2}}));
  CHECK_FALSE(validate_bramble(c4, {{0, 2}}));  // disconnected element
  CHECK(bramble_order(c4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}) == 2);
  // No graph of treewidth 1 has a bramble of order 3.
  CHECK_FALSE(find_bramble(build_graph(4, {{0, 1}, {1, 2}, {2, 3}}), 3).has_value());
}

TEST_CASE("tree with n=2 has no lower certificate") {
  Graph tree = build_graph(7, {{0, 1}, {0, 2}, {1, 3}, {1, 4}, {2, 5}, {2, 6}});
  try {
    treewidth_certificates(tree, 2);
    FAIL("expected CertificateNotFound");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CertificateNotFound);
  }
}

TEST_CASE("grid subgraph certificates") {
  Graph g = grid_graph(4, 5);
  TreewidthCertificates c = treewidth_certificates(g, 4);
  CHECK(c.lower_kind == LowerCertificateKind::GridSubgraph);
  CHECK(validate_certificates(g, 4, c));
  CHECK_FALSE(find_grid_subgraph(grid_graph(3, 6), 4, 4).has_value());
  GridEmbedding emb = *find_grid_subgraph(g, 3, 3);
  CHECK(validate_grid_subgraph(g, 3, 3, emb));
  std::swap(emb[0], emb[8]);
  CHECK_FALSE(validate_grid_subgraph(g, 3, 3, emb));
}

TEST_CASE("nice form of named decompositions") {
  Graph k3 = build_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  NiceDecomposition nd = nice_form(k3, single_bag(k3));
  CHECK(check_nice(nd));
  REQUIRE(nd.nodes.size() == 4);
  int leaves = 0, intro = 0;
  for (const auto& node : nd.nodes) {
    leaves += node.kind == NiceKind::Leaf;
    intro += node.kind == NiceKind::Introduce;
  }
  CHECK(leaves == 1);
  CHECK(intro == 3);

  Graph p4 = build_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  TreeDecomposition pd = pd_from_ordering(p4, {0, 1, 2, 3});
  NiceDecomposition np = nice_form(p4, pd, static_cast<int>(pd.bags.size()) - 1);
  CHECK(check_nice(np));
  CHECK(validate_td(p4, np.as_td()).width == 1);
  // Walk from the root down: below the first two introduces the kinds alternate.
  std::vector<NiceKind> chain;
  for (int t = np.root; t >= 0; t = np.nodes[t].children.empty() ? -1 : np.nodes[t].children[0])
    chain.push_back(np.nodes[t].kind);
  CHECK(chain.back() == NiceKind::Leaf);
  for (size_t i = 0; i + 3 < chain.size(); ++i) CHECK(chain[i] != chain[i + 1]);

  try {
    TreeDecomposition bad;
    bad.tree = build_graph(1, {});
    bad.bags = {{0, 1}};
    nice_form(k3, bad);
    FAIL("expected InvalidDecomposition");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidDecomposition);
  }
}

TEST_CASE("nice form preserves validity and width on random decompositions") {
  std::mt19937 rng(15);
  for (int it = 0; it < 50; ++it) {
    Graph g = test::random_graph(rng, 3 + static_cast<int>(rng() % 12), 0.3);
    TreeDecomposition td = it % 2 ? heuristic_td(g) : exact_treewidth(g).td;
    int width = validate_td(g, td).width;
    NiceDecomposition nd = nice_form(g, td, static_cast<int>(rng() % td.tree.n()));
    CHECK(check_nice(nd));
    TdCheck c = validate_td(g, nd.as_td());
    CHECK(c.valid);
    CHECK(c.width == width);
  }
}

TEST_CASE(".td round trip") {
  Graph g = grid_graph(3, 4);
  TreeDecomposition td = exact_treewidth(g).td;
  std::stringstream ss;
  write_td(ss, td, g.n());
  int n = 0;
  TreeDecomposition back = read_td(ss, &n);
  CHECK(n == g.n());
  CHECK(back.bags == td.bags);
  CHECK(back.tree.edges() == td.tree.edges());
  std::istringstream bad("b 1 2\n");
  CHECK_THROWS_AS(read_td(bad), Error);
}
