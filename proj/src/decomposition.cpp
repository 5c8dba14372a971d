#include "gm/decomposition.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace gm {

TdCheck validate_td(const Graph& g, const TreeDecomposition& td) {
  TdCheck out;
  int nodes = static_cast<int>(td.bags.size());
  if (td.tree.n() != nodes) return out;
  if (nodes == 0) {
    out.valid = g.n() == 0;
    return out;
  }
  if (td.tree.m() != nodes - 1 || !is_connected(td.tree)) return out;
  std::vector<int> count(g.n(), 0), linked(g.n(), 0);
  std::vector<std::vector<char>> in(nodes, std::vector<char>(g.n(), 0));
  for (int t = 0; t < nodes; ++t) {
    for (int v : td.bags[t]) {
      if (v < 0 || v >= g.n() || in[t][v]) return out;
      in[t][v] = 1;
      ++count[v];
    }
    out.width = std::max(out.width, static_cast<int>(td.bags[t].size()) - 1);
  }
  for (auto [a, b] : td.tree.edges()) {
    int shared = 0;
    for (int v : td.bags[a])
      if (in[b][v]) {
        ++shared;
        ++linked[v];
      }
    out.adhesion = std::max(out.adhesion, shared);
  }
  for (int v = 0; v < g.n(); ++v)
    if (count[v] == 0 || linked[v] != count[v] - 1) return out;
  for (auto [u, v] : g.edges()) {
    bool covered = false;
    for (int t = 0; t < nodes && !covered; ++t) covered = in[t][u] && in[t][v];
    if (!covered) return out;
  }
  out.valid = true;
  return out;
}

TreeDecomposition td_from_elimination(const Graph& g, const std::vector<int>& order) {
  int n = g.n();
  require(static_cast<int>(order.size()) == n, ErrorKind::PreconditionViolated, "ordering size");
  std::vector<int> pos(n, -1);
  for (int i = 0; i < n; ++i) {
    require(order[i] >= 0 && order[i] < n && pos[order[i]] < 0, ErrorKind::PreconditionViolated,
            "ordering is not a permutation");
    pos[order[i]] = i;
  }
  std::vector<std::set<int>> adj(n);
  for (auto [u, v] : g.edges()) {
    adj[u].insert(v);
    adj[v].insert(u);
  }
  TreeDecomposition td;
  td.bags.resize(n);
  std::vector<Edge> tree;
  int previous_root = -1;
  for (int i = 0; i < n; ++i) {
    int v = order[i];
    std::vector<int> higher;
    for (int w : adj[v])
      if (pos[w] > i) higher.push_back(w);
    for (size_t a = 0; a < higher.size(); ++a)
      for (size_t b = a + 1; b < higher.size(); ++b) {
        adj[higher[a]].insert(higher[b]);
        adj[higher[b]].insert(higher[a]);
      }
    std::vector<int> bag = higher;
    bag.push_back(v);
    std::sort(bag.begin(), bag.end());
    td.bags[i] = bag;
    if (!higher.empty()) {
      int next = *std::min_element(higher.begin(), higher.end(), [&](int a, int b) { return pos[a] < pos[b]; });
      tree.emplace_back(i, pos[next]);
    } else {
      if (previous_root >= 0) tree.emplace_back(previous_root, i);
      previous_root = i;
    }
  }
  td.tree = build_graph(n, tree);
  return td;
}

TreeDecomposition pd_from_ordering(const Graph& g, const std::vector<int>& order) {
  int n = g.n();
  require(static_cast<int>(order.size()) == n, ErrorKind::PreconditionViolated, "ordering size");
  std::vector<int> pos(n, -1);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  TreeDecomposition td;
  td.bags.resize(n);
  for (int u = 0; u < n; ++u) {
    int last = pos[u];
    for (int w : g.neighbors(u)) last = std::max(last, pos[w]);
    for (int i = pos[u]; i <= last; ++i) td.bags[i].push_back(u);
  }
  for (auto& b : td.bags) std::sort(b.begin(), b.end());
  std::vector<Edge> path;
  for (int i = 0; i + 1 < n; ++i) path.emplace_back(i, i + 1);
  td.tree = build_graph(n, path);
  return td;
}

namespace {

bool is_forest(const Graph& g) {
  return g.m() == g.n() - static_cast<int>(connected_components(g).size());
}

std::vector<int> degeneracy_order(const Graph& g, int* degen = nullptr) {
  int n = g.n();
  std::vector<int> deg(n), order;
  std::vector<char> gone(n, 0);
  for (int v = 0; v < n; ++v) deg[v] = g.degree(v);
  int best = 0;
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    for (int v = 0; v < n; ++v)
      if (!gone[v] && (pick < 0 || deg[v] < deg[pick])) pick = v;
    best = std::max(best, deg[pick]);
    gone[pick] = 1;
    order.push_back(pick);
    for (int w : g.neighbors(pick))
      if (!gone[w]) --deg[w];
  }
  if (degen) *degen = best;
  return order;
}

// Sets S reachable from the empty set by steps S -> S+v that each satisfy
// `ok(S, v)`; returns the parent map when `full` is reached.
struct SubsetSearch {
  std::unordered_map<std::uint32_t, std::int8_t> parent;  // set -> vertex added last
  bool run(int n, std::uint32_t full, const std::function<bool(std::uint32_t, int)>& ok,
           const std::function<bool(std::uint32_t)>& finish) {
    parent.clear();
    std::vector<std::uint32_t> frontier{0};
    parent[0] = -1;
    while (!frontier.empty()) {
      std::vector<std::uint32_t> next;
      for (std::uint32_t s : frontier) {
        if (finish(s)) {
          last = s;
          return true;
        }
        for (int v = 0; v < n; ++v) {
          if (s >> v & 1) continue;
          std::uint32_t t = s | (1u << v);
          if (parent.count(t) || !ok(s, v)) continue;
          parent[t] = static_cast<std::int8_t>(v);
          if (t == full) {
            last = t;
            return true;
          }
          next.push_back(t);
        }
      }
      frontier.swap(next);
    }
    return false;
  }
  std::vector<int> prefix_order() const {
    std::vector<int> order;
    for (std::uint32_t s = last; s != 0;) {
      int v = parent.at(s);
      order.push_back(v);
      s &= ~(1u << v);
    }
    std::reverse(order.begin(), order.end());
    return order;
  }
  std::uint32_t last = 0;
};

}  // namespace

TreewidthResult exact_treewidth(const Graph& g, int upper) {
  TreewidthResult res;
  int n = g.n();
  auto finish = [&](int width, const TreeDecomposition& td) {
    res.width = width;
    res.above = width > upper;
    if (!res.above) res.td = td;
    return res;
  };
  if (n == 0) {
    TreeDecomposition td;
    td.tree = build_graph(1, {});
    td.bags = {{}};
    return finish(-1, td);
  }
  if (is_forest(g)) return finish(g.m() > 0 ? 1 : 0, td_from_elimination(g, degeneracy_order(g)));
  require(n <= kExactTreewidthCap, ErrorKind::SearchCapExceeded,
          "exact treewidth limited to " + std::to_string(kExactTreewidthCap) + " vertices");

  std::vector<int> heuristic = min_fill_ordering(g);
  TreeDecomposition best_td = td_from_elimination(g, heuristic);
  int ub = validate_td(g, best_td).width;
  int lb = std::max(degeneracy(g), minor_min_width(g));
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  // |Q(S, v)|: vertices outside S+v reachable from v through S.
  auto q_size = [&](std::uint32_t s, int v) {
    Mask comp = mask_component(g, static_cast<Mask>(s) | bit(v), v);
    Mask nb = 0;
    for_each_bit(comp, [&](int w) { nb |= g.mask(w); });
    return popcount(nb & ~comp);
  };
  SubsetSearch search;
  for (int k = lb; k < ub; ++k) {
    if (k > upper) {
      // Every width below k failed: report k as a lower bound.
      res.width = k;
      res.above = true;
      return res;
    }
    bool ok = search.run(
        n, full, [&](std::uint32_t s, int v) { return q_size(s, v) <= k; },
        [&](std::uint32_t s) { return n - popcount(s) <= k + 1; });
    if (ok) {
      std::vector<int> order = search.prefix_order();
      for (int v = 0; v < n; ++v)
        if (!(search.last >> v & 1)) order.push_back(v);
      return finish(k, td_from_elimination(g, order));
    }
  }
  return finish(ub, best_td);
}

int exact_pathwidth(const Graph& g, std::vector<int>* order_out) {
  int n = g.n();
  require(n <= kExactTreewidthCap, ErrorKind::SearchCapExceeded, "exact pathwidth limited to 20 vertices");
  if (n == 0) return -1;
  const std::uint32_t full = (1u << n) - 1;
  auto boundary = [&](std::uint32_t s) {
    int b = 0;
    for_each_bit(s, [&](int u) {
      if (g.mask(u) & ~static_cast<Mask>(s)) ++b;
    });
    return b;
  };
  SubsetSearch search;
  for (int k = 0; k < n; ++k) {
    bool ok = search.run(
        n, full, [&](std::uint32_t s, int v) { return boundary(s | (1u << v)) <= k; },
        [&](std::uint32_t s) { return s == full; });
    if (ok) {
      if (order_out) *order_out = search.prefix_order();
      return k;
    }
  }
  return n - 1;
}

std::vector<int> min_fill_ordering(const Graph& g) {
  int n = g.n();
  std::vector<std::set<int>> adj(n);
  for (auto [u, v] : g.edges()) {
    adj[u].insert(v);
    adj[v].insert(u);
  }
  std::vector<char> gone(n, 0);
  std::vector<int> order;
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    long best = -1;
    for (int v = 0; v < n; ++v) {
      if (gone[v]) continue;
      long fill = 0;
      for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
        for (auto b = std::next(a); b != adj[v].end(); ++b)
          if (!adj[*a].count(*b)) ++fill;
      if (pick < 0 || fill < best || (fill == best && adj[v].size() < adj[pick].size())) {
        pick = v;
        best = fill;
      }
    }
    std::vector<int> nb(adj[pick].begin(), adj[pick].end());
    for (size_t a = 0; a < nb.size(); ++a)
      for (size_t b = a + 1; b < nb.size(); ++b) {
        adj[nb[a]].insert(nb[b]);
        adj[nb[b]].insert(nb[a]);
      }
    for (int w : nb) adj[w].erase(pick);
    adj[pick].clear();
    gone[pick] = 1;
    order.push_back(pick);
  }
  return order;
}

TreeDecomposition heuristic_td(const Graph& g) { return td_from_elimination(g, min_fill_ordering(g)); }

int degeneracy(const Graph& g) {
  int d = 0;
  degeneracy_order(g, &d);
  return d;
}

int minor_min_width(const Graph& g) {
  int n = g.n();
  std::vector<std::set<int>> adj(n);
  for (auto [u, v] : g.edges()) {
    adj[u].insert(v);
    adj[v].insert(u);
  }
  std::vector<char> gone(n, 0);
  int lb = 0;
  for (int step = 0; step < n; ++step) {
    int v = -1;
    for (int x = 0; x < n; ++x)
      if (!gone[x] && (v < 0 || adj[x].size() < adj[v].size())) v = x;
    lb = std::max(lb, static_cast<int>(adj[v].size()));
    if (!adj[v].empty()) {
      // Contract v into the neighbour of least degree.
      int u = *std::min_element(adj[v].begin(), adj[v].end(),
                                [&](int a, int b) { return adj[a].size() < adj[b].size(); });
      for (int w : adj[v])
        if (w != u) {
          adj[u].insert(w);
          adj[w].insert(u);
        }
    }
    for (int w : adj[v]) adj[w].erase(v);
    adj[v].clear();
    gone[v] = 1;
  }
  return lb;
}

bool validate_bramble(const Graph& g, const Bramble& b) {
  std::vector<std::vector<char>> in;
  for (const auto& set : b) {
    if (set.empty()) return false;
    std::vector<char> mark(g.n(), 0);
    for (int v : set) {
      if (v < 0 || v >= g.n()) return false;
      mark[v] = 1;
    }
    std::vector<int> keep(set.begin(), set.end());
    if (!is_connected(induced_subgraph(g, keep).graph)) return false;
    in.push_back(std::move(mark));
  }
  for (size_t i = 0; i < b.size(); ++i)
    for (size_t j = i + 1; j < b.size(); ++j) {
      bool touch = false;
      for (int v : b[i]) {
        if (in[j][v]) touch = true;
        for (int w : g.neighbors(v))
          if (in[j][w]) touch = true;
        if (touch) break;
      }
      if (!touch) return false;
    }
  return true;
}

int bramble_order(const Graph& g, const Bramble& b) {
  if (b.empty()) return 0;
  std::vector<int> verts;
  for (const auto& s : b) verts.insert(verts.end(), s.begin(), s.end());
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  require(verts.size() <= 24, ErrorKind::SearchCapExceeded, "bramble hitting set over more than 24 vertices");
  std::vector<std::uint32_t> sets;
  for (const auto& s : b) {
    std::uint32_t m = 0;
    for (int v : s) m |= 1u << (std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
    sets.push_back(m);
  }
  (void)g;
  int k = static_cast<int>(verts.size());
  for (int size = 1; size <= k; ++size) {
    // Enumerate subsets of the given size in lexicographic bit order.
    std::uint32_t s = (1u << size) - 1;
    while (s < (1u << k)) {
      bool hits = std::all_of(sets.begin(), sets.end(), [&](std::uint32_t m) { return (m & s) != 0; });
      if (hits) return size;
      std::uint32_t c = s & -s, r = s + c;
      s = (((r ^ s) >> 2) / c) | r;
    }
  }
  return k;
}

std::optional<Bramble> find_bramble(const Graph& g, int target) {
  int n = g.n();
  if (n > 10 || target <= 0) return target <= 0 ? std::optional<Bramble>(Bramble{}) : std::nullopt;
  std::vector<Mask> sets;
  for (Mask s = 1; s < bit(n); ++s)
    if (mask_connected(g, s)) sets.push_back(s);
  auto nb = [&](Mask s) {
    Mask out = s;
    for_each_bit(s, [&](int v) { out |= g.mask(v); });
    return out;
  };
  int m = static_cast<int>(sets.size());
  std::vector<Mask> closed(m);
  for (int i = 0; i < m; ++i) closed[i] = nb(sets[i]);
  std::vector<std::vector<int>> touch(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j && (closed[i] & sets[j])) touch[i].push_back(j);
  auto order_of = [&](const std::vector<int>& clique) {
    for (int size = 0; size <= n; ++size) {
      Mask s = size == 0 ? 0 : (bit(size) - 1);
      while (s < bit(n)) {
        bool hits = std::all_of(clique.begin(), clique.end(), [&](int i) { return (sets[i] & s) != 0; });
        if (hits) return size;
        if (s == 0) break;
        Mask c = s & (~s + 1), r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
      }
    }
    return n;
  };
  // Bron-Kerbosch with pivoting over the touching relation, bounded.
  std::optional<Bramble> found;
  long budget = 200000;
  std::vector<int> r;
  std::function<void(std::vector<int>, std::vector<int>)> bk = [&](std::vector<int> p, std::vector<int> x) {
    if (found || budget-- <= 0) return;
    if (p.empty() && x.empty()) {
      if (order_of(r) >= target) {
        Bramble b;
        for (int i : r) {
          std::vector<int> set;
          for_each_bit(sets[i], [&](int v) { set.push_back(v); });
          b.push_back(set);
        }
        found = b;
      }
      return;
    }
    int pivot = p.empty() ? x[0] : p[0];
    std::vector<char> pn(m, 0);
    for (int w : touch[pivot]) pn[w] = 1;
    std::vector<int> cand;
    for (int v : p)
      if (!pn[v]) cand.push_back(v);
    for (int v : cand) {
      std::vector<char> nv(m, 0);
      for (int w : touch[v]) nv[w] = 1;
      std::vector<int> p2, x2;
      for (int w : p)
        if (nv[w]) p2.push_back(w);
      for (int w : x)
        if (nv[w]) x2.push_back(w);
      r.push_back(v);
      bk(p2, x2);
      r.pop_back();
      p.erase(std::find(p.begin(), p.end(), v));
      x.push_back(v);
      if (found) return;
    }
  };
  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);
  bk(all, {});
  return found;
}

std::optional<GridEmbedding> find_grid_subgraph(const Graph& g, int rows, int cols) {
  int cells = rows * cols;
  if (cells > g.n()) return std::nullopt;
  GridEmbedding emb(cells, -1);
  std::vector<char> used(g.n(), 0);
  auto pdeg = [&](int c) {
    int i = c / cols, j = c % cols;
    return (i > 0) + (i + 1 < rows) + (j > 0) + (j + 1 < cols);
  };
  std::function<bool(int)> place = [&](int c) {
    if (c == cells) return true;
    int i = c / cols, j = c % cols;
    std::vector<int> cand;
    if (j > 0) cand = g.neighbors(emb[c - 1]);
    else if (i > 0) cand = g.neighbors(emb[c - cols]);
    else {
      cand.resize(g.n());
      std::iota(cand.begin(), cand.end(), 0);
    }
    for (int v : cand) {
      if (used[v] || g.degree(v) < pdeg(c)) continue;
      if (i > 0 && !g.adjacent(v, emb[c - cols])) continue;
      emb[c] = v;
      used[v] = 1;
      if (place(c + 1)) return true;
      used[v] = 0;
    }
    emb[c] = -1;
    return false;
  };
  if (place(0)) return emb;
  return std::nullopt;
}

bool validate_grid_subgraph(const Graph& g, int rows, int cols, const GridEmbedding& emb) {
  if (static_cast<int>(emb.size()) != rows * cols) return false;
  std::set<int> seen;
  for (int v : emb)
    if (v < 0 || v >= g.n() || !seen.insert(v).second) return false;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      if (j + 1 < cols && !g.adjacent(emb[i * cols + j], emb[i * cols + j + 1])) return false;
      if (i + 1 < rows && !g.adjacent(emb[i * cols + j], emb[(i + 1) * cols + j])) return false;
    }
  return true;
}

namespace {

// Grid dimensions whose presence proves tw >= n.
std::pair<int, int> lower_grid_shape(int n) {
  if (n <= 0) return {1, 1};
  if (n == 1) return {1, 2};
  return {n, n};
}

bool is_path_decomposition(const TreeDecomposition& td) {
  for (int t = 0; t < td.tree.n(); ++t)
    if (td.tree.degree(t) > 2) return false;
  return true;
}

}  // namespace

TreewidthCertificates treewidth_certificates(const Graph& g, int n, const MinorConfig& cfg) {
  TreewidthCertificates c;
  auto [rows, cols] = lower_grid_shape(n);
  bool lower = false;
  std::optional<GridEmbedding> grid = find_grid_subgraph(g, rows, cols);
  if (grid) {
    c.lower_kind = LowerCertificateKind::GridSubgraph;
    c.grid = *grid;
    lower = true;
  }
  if (!lower && g.n() <= 10) {
    if (auto b = find_bramble(g, n + 1)) {
      c.lower_kind = LowerCertificateKind::Bramble;
      c.bramble = *b;
      lower = true;
    }
  }
  if (!lower && rows * cols <= cfg.pattern_cap && g.n() <= 64) {
    if (auto m = find_minor(g, grid_pattern(rows, cols), cfg)) {
      c.lower_kind = LowerCertificateKind::GridMinor;
      c.minor = *m;
      lower = true;
    }
  }
  if (!lower) fail(ErrorKind::CertificateNotFound, "no lower-bound certificate for treewidth " + std::to_string(n));

  std::vector<std::vector<int>> orders;
  if (grid && rows * cols > 1) {
    std::vector<char> placed(g.n(), 0);
    for (int v : *grid) placed[v] = 1;
    std::vector<int> rest;
    for (int v = 0; v < g.n(); ++v)
      if (!placed[v]) rest.push_back(v);
    std::vector<int> by_col, by_row;
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) by_col.push_back((*grid)[i * cols + j]);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) by_row.push_back((*grid)[i * cols + j]);
    for (auto* o : {&by_col, &by_row}) {
      o->insert(o->end(), rest.begin(), rest.end());
      orders.push_back(*o);
    }
  }
  if (g.n() <= kExactTreewidthCap) {
    std::vector<int> order;
    exact_pathwidth(g, &order);
    orders.push_back(order);
  }
  orders.push_back(min_fill_ordering(g));
  orders.push_back(degeneracy_order(g));
  for (const auto& order : orders) {
    if (static_cast<int>(order.size()) != g.n()) continue;
    TreeDecomposition pd = pd_from_ordering(g, order);
    TdCheck chk = validate_td(g, pd);
    if (chk.valid && chk.width <= n) {
      c.upper = pd;
      return c;
    }
  }
  fail(ErrorKind::CertificateNotFound, "no path decomposition of width " + std::to_string(n));
}

bool validate_certificates(const Graph& g, int n, const TreewidthCertificates& c) {
  auto [rows, cols] = lower_grid_shape(n);
  bool lower = false;
  switch (c.lower_kind) {
    case LowerCertificateKind::GridSubgraph: lower = validate_grid_subgraph(g, rows, cols, c.grid); break;
    case LowerCertificateKind::Bramble:
      lower = validate_bramble(g, c.bramble) && bramble_order(g, c.bramble) >= n + 1;
      break;
    case LowerCertificateKind::GridMinor: lower = verify_minor_model(g, grid_pattern(rows, cols), c.minor); break;
  }
  TdCheck chk = validate_td(g, c.upper);
  return lower && chk.valid && chk.width <= n && is_path_decomposition(c.upper);
}

TreeDecomposition NiceDecomposition::as_td() const {
  TreeDecomposition td;
  std::vector<Edge> e;
  for (int t = 0; t < static_cast<int>(nodes.size()); ++t) {
    td.bags.push_back(nodes[t].bag);
    for (int c : nodes[t].children) e.emplace_back(t, c);
  }
  td.tree = build_graph(static_cast<int>(nodes.size()), e);
  return td;
}

NiceDecomposition nice_form(const Graph& g, const TreeDecomposition& td, int root) {
  if (!validate_td(g, td).valid) fail(ErrorKind::InvalidDecomposition, "input decomposition does not validate");
  require(root >= 0 && root < td.tree.n(), ErrorKind::IndexOutOfRange, "root node");
  NiceDecomposition nd;
  auto add = [&](NiceKind kind, int vertex, std::vector<int> bag, std::vector<int> children) {
    nd.nodes.push_back({kind, vertex, std::move(bag), std::move(children)});
    return static_cast<int>(nd.nodes.size()) - 1;
  };
  // Transforms the chain top `node` with bag `from` into bag `to`.
  auto morph = [&](int node, std::vector<int> from, const std::vector<int>& to) {
    for (int v : std::vector<int>(from)) {
      if (std::binary_search(to.begin(), to.end(), v)) continue;
      from.erase(std::find(from.begin(), from.end(), v));
      node = add(NiceKind::Forget, v, from, {node});
    }
    for (int v : to) {
      if (std::binary_search(from.begin(), from.end(), v)) continue;
      from.insert(std::upper_bound(from.begin(), from.end(), v), v);
      node = add(NiceKind::Introduce, v, from, {node});
    }
    return node;
  };
  std::function<int(int, int)> build = [&](int t, int parent) {
    const std::vector<int>& bag = td.bags[t];
    std::vector<int> tops;
    for (int c : td.tree.neighbors(t)) {
      if (c == parent) continue;
      tops.push_back(morph(build(c, t), td.bags[c], bag));
    }
    if (tops.empty()) return morph(add(NiceKind::Leaf, -1, {}, {}), {}, bag);
    int node = tops[0];
    for (size_t i = 1; i < tops.size(); ++i) node = add(NiceKind::Join, -1, bag, {node, tops[i]});
    return node;
  };
  nd.root = build(root, -1);
  return nd;
}

bool check_nice(const NiceDecomposition& nd) {
  for (const auto& node : nd.nodes) {
    switch (node.kind) {
      case NiceKind::Leaf:
        if (!node.children.empty() || !node.bag.empty()) return false;
        break;
      case NiceKind::Introduce: {
        if (node.children.size() != 1) return false;
        std::vector<int> expect = nd.nodes[node.children[0]].bag;
        if (std::binary_search(expect.begin(), expect.end(), node.vertex)) return false;
        expect.insert(std::upper_bound(expect.begin(), expect.end(), node.vertex), node.vertex);
        if (expect != node.bag) return false;
        break;
      }
      case NiceKind::Forget: {
        if (node.children.size() != 1) return false;
        std::vector<int> expect = nd.nodes[node.children[0]].bag;
        auto it = std::find(expect.begin(), expect.end(), node.vertex);
        if (it == expect.end()) return false;
        expect.erase(it);
        if (expect != node.bag) return false;
        break;
      }
      case NiceKind::Join:
        if (node.children.size() != 2) return false;
        for (int c : node.children)
          if (nd.nodes[c].bag != node.bag) return false;
        break;
    }
  }
  return true;
}

void write_td(std::ostream& os, const TreeDecomposition& td, int n) {
  int width = 0;
  for (const auto& b : td.bags) width = std::max(width, static_cast<int>(b.size()));
  os << "s td " << td.bags.size() << ' ' << width << ' ' << n << '\n';
  for (size_t t = 0; t < td.bags.size(); ++t) {
    os << "b " << t + 1;
    for (int v : td.bags[t]) os << ' ' << v + 1;
    os << '\n';
  }
  for (auto [a, b] : td.tree.edges()) os << a + 1 << ' ' << b + 1 << '\n';
}

TreeDecomposition read_td(std::istream& is, int* n_out) {
  std::string line;
  int bags = -1, n = -1;
  TreeDecomposition td;
  std::vector<Edge> edges;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (tok == "s") {
      std::string kind;
      int w;
      if (!(ls >> kind >> bags >> w >> n) || kind != "td") fail(ErrorKind::ParseError, "bad td header");
      td.bags.assign(bags, {});
    } else if (tok == "b") {
      int id, v;
      if (!(ls >> id) || id < 1 || id > bags) fail(ErrorKind::ParseError, "bad bag line");
      while (ls >> v) td.bags[id - 1].push_back(v - 1);
      std::sort(td.bags[id - 1].begin(), td.bags[id - 1].end());
    } else {
      int a = std::stoi(tok), b;
      if (!(ls >> b)) fail(ErrorKind::ParseError, "bad tree edge");
      edges.emplace_back(a - 1, b - 1);
    }
  }
  if (bags < 0) fail(ErrorKind::ParseError, "missing td header");
  td.tree = build_graph(bags, edges);
  if (n_out) *n_out = n;
  return td;
}

}  // namespace gm
