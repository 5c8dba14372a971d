#include "gm/graph.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

#include "gm/flow.hpp"

namespace gm {

bool Graph::adjacent(int u, int v) const {
  if (!masks_.empty()) return (masks_[u] >> v) & 1;
  const auto& a = adj_[u];
  return std::binary_search(a.begin(), a.end(), v);
}

std::string Graph::label(int v) const {
  if (labels_.empty()) return std::to_string(v);
  return labels_[v];
}

Graph build_graph(int n, std::vector<Edge> edges, std::vector<std::string> labels) {
  require(n >= 0, ErrorKind::IndexOutOfRange, "negative vertex count");
  require(labels.empty() || static_cast<int>(labels.size()) == n, ErrorKind::PreconditionViolated,
          "label count differs from vertex count");
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      fail(ErrorKind::IndexOutOfRange,
           "edge (" + std::to_string(u) + "," + std::to_string(v) + ") with n=" + std::to_string(n));
    if (u == v) fail(ErrorKind::SelfLoop, "loop at " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  Graph g;
  g.adj_.assign(n, {});
  for (auto [u, v] : edges) {
    g.adj_[u].push_back(v);
    g.adj_[v].push_back(u);
  }
  for (auto& a : g.adj_) std::sort(a.begin(), a.end());
  g.edges_ = std::move(edges);
  g.labels_ = std::move(labels);
  if (n <= 64) {
    g.masks_.assign(n, 0);
    for (auto [u, v] : g.edges_) {
      g.masks_[u] |= bit(v);
      g.masks_[v] |= bit(u);
    }
  }
  return g;
}

Subgraph induced_subgraph(const Graph& g, const std::vector<int>& keep) {
  Subgraph s;
  s.old_to_new.assign(g.n(), -1);
  std::vector<int> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (int v : sorted) {
    require(v >= 0 && v < g.n(), ErrorKind::IndexOutOfRange, "induced_subgraph vertex");
    s.old_to_new[v] = static_cast<int>(s.new_to_old.size());
    s.new_to_old.push_back(v);
  }
  std::vector<Edge> edges;
  for (auto [u, v] : g.edges())
    if (s.old_to_new[u] >= 0 && s.old_to_new[v] >= 0) edges.emplace_back(s.old_to_new[u], s.old_to_new[v]);
  std::vector<std::string> labels;
  if (g.has_labels())
    for (int v : s.new_to_old) labels.push_back(g.labels()[v]);
  s.graph = build_graph(static_cast<int>(sorted.size()), std::move(edges), std::move(labels));
  return s;
}

Subgraph delete_vertices(const Graph& g, const std::vector<int>& drop) {
  std::vector<char> gone(g.n(), 0);
  for (int v : drop) {
    require(v >= 0 && v < g.n(), ErrorKind::IndexOutOfRange, "delete_vertices vertex");
    gone[v] = 1;
  }
  std::vector<int> keep;
  for (int v = 0; v < g.n(); ++v)
    if (!gone[v]) keep.push_back(v);
  return induced_subgraph(g, keep);
}

Graph add_edges(const Graph& g, const std::vector<Edge>& extra) {
  std::vector<Edge> edges = g.edges();
  edges.insert(edges.end(), extra.begin(), extra.end());
  return build_graph(g.n(), std::move(edges), g.labels());
}

Graph remove_edges(const Graph& g, const std::vector<Edge>& drop) {
  std::vector<Edge> d;
  for (auto [u, v] : drop) d.emplace_back(std::min(u, v), std::max(u, v));
  std::sort(d.begin(), d.end());
  std::vector<Edge> edges;
  for (const Edge& e : g.edges())
    if (!std::binary_search(d.begin(), d.end(), e)) edges.push_back(e);
  return build_graph(g.n(), std::move(edges), g.labels());
}

Graph disjoint_union(const Graph& a, const Graph& b) {
  std::vector<Edge> edges = a.edges();
  for (auto [u, v] : b.edges()) edges.emplace_back(u + a.n(), v + a.n());
  std::vector<std::string> labels;
  if (a.has_labels() || b.has_labels()) {
    for (int v = 0; v < a.n(); ++v) labels.push_back(a.label(v));
    for (int v = 0; v < b.n(); ++v) labels.push_back(b.label(v));
  }
  return build_graph(a.n() + b.n(), std::move(edges), std::move(labels));
}

std::vector<std::vector<int>> connected_components(const Graph& g) {
  std::vector<int> comp(g.n(), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < g.n(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> members{s};
    comp[s] = static_cast<int>(out.size());
    for (size_t i = 0; i < members.size(); ++i)
      for (int w : g.neighbors(members[i]))
        if (comp[w] < 0) {
          comp[w] = comp[s];
          members.push_back(w);
        }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

bool is_connected(const Graph& g) { return connected_components(g).size() <= 1; }

Mask mask_component(const Graph& g, Mask within, int start) {
  Mask seen = bit(start), frontier = bit(start);
  while (frontier) {
    Mask next = 0;
    for_each_bit(frontier, [&](int v) { next |= g.mask(v); });
    next &= within & ~seen;
    seen |= next;
    frontier = next;
  }
  return seen;
}

bool mask_connected(const Graph& g, Mask set) {
  if (!set) return true;
  return mask_component(g, set, lowest(set)) == set;
}

std::vector<int> bfs_distances(const Graph& g, const std::vector<int>& sources) {
  std::vector<int> dist(g.n(), -1);
  std::queue<int> q;
  for (int s : sources)
    if (dist[s] < 0) {
      dist[s] = 0;
      q.push(s);
    }
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int w : g.neighbors(u))
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
  }
  return dist;
}

std::vector<int> shortest_path(const Graph& g, int s, int t, const std::vector<char>& allowed) {
  if (!allowed[s] || !allowed[t]) return {};
  std::vector<int> parent(g.n(), -2);
  std::queue<int> q;
  q.push(s);
  parent[s] = -1;
  while (!q.empty() && parent[t] == -2) {
    int u = q.front();
    q.pop();
    for (int w : g.neighbors(u))
      if (allowed[w] && parent[w] == -2) {
        parent[w] = u;
        q.push(w);
      }
  }
  if (parent[t] == -2) return {};
  std::vector<int> path;
  for (int v = t; v != -1; v = parent[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

BlockDecomposition blocks(const Graph& g) {
  BlockDecomposition out;
  int n = g.n();
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<char> is_cut(n, 0);
  std::vector<Edge> stack;
  int timer = 0;

  auto emit = [&](int u, int v) {
    std::vector<Edge> comp;
    while (true) {
      Edge e = stack.back();
      stack.pop_back();
      comp.push_back(e);
      if (e == Edge{u, v}) break;
    }
    if (comp.size() == 1) {
      auto [a, b] = comp[0];
      out.bridges.emplace_back(std::min(a, b), std::max(a, b));
      return;
    }
    std::vector<int> verts;
    for (auto& e : comp) {
      verts.push_back(e.first);
      verts.push_back(e.second);
      if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    std::sort(comp.begin(), comp.end());
    out.blocks.push_back(std::move(verts));
    out.block_edges.push_back(std::move(comp));
  };

  std::function<void(int, int)> dfs = [&](int u, int parent) {
    disc[u] = low[u] = timer++;
    int children = 0;
    for (int w : g.neighbors(u)) {
      if (w == parent) continue;
      if (disc[w] < 0) {
        ++children;
        stack.emplace_back(u, w);
        dfs(w, u);
        low[u] = std::min(low[u], low[w]);
        if (low[w] >= disc[u]) {
          if (parent >= 0 || children > 1) is_cut[u] = 1;
          emit(u, w);
        }
      } else if (disc[w] < disc[u]) {
        stack.emplace_back(u, w);
        low[u] = std::min(low[u], disc[w]);
      }
    }
  };
  for (int v = 0; v < n; ++v)
    if (disc[v] < 0) dfs(v, -1);
  for (int v = 0; v < n; ++v)
    if (is_cut[v]) out.cut_vertices.push_back(v);
  std::sort(out.bridges.begin(), out.bridges.end());
  return out;
}

int Separation::order() const {
  std::vector<int> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::vector<int> both;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(both));
  both.erase(std::unique(both.begin(), both.end()), both.end());
  return static_cast<int>(both.size());
}

bool verify_separation(const Graph& g, const Separation& sep) {
  std::vector<char> in_a(g.n(), 0), in_b(g.n(), 0);
  for (int v : sep.a) {
    if (v < 0 || v >= g.n()) return false;
    in_a[v] = 1;
  }
  for (int v : sep.b) {
    if (v < 0 || v >= g.n()) return false;
    in_b[v] = 1;
  }
  for (int v = 0; v < g.n(); ++v)
    if (!in_a[v] && !in_b[v]) return false;
  for (auto [u, v] : g.edges())
    if (!((in_a[u] && in_a[v]) || (in_b[u] && in_b[v]))) return false;
  return true;
}

namespace {

// Split-vertex network: v_in = 2v, v_out = 2v+1, then source and sink.
struct SplitNetwork {
  FlowNetwork net;
  int source, sink;
  std::vector<int> through;  // arc v_in -> v_out

  SplitNetwork(const Graph& g, const std::vector<int>& x, const std::vector<int>& y,
               const std::vector<int>& caps = {})
      : net(2 * g.n() + 2), source(2 * g.n()), sink(2 * g.n() + 1), through(g.n()) {
    std::vector<int> xs = x, ys = y;
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    net.reserve_arcs(static_cast<int>(xs.size() + ys.size()) + g.n() + 2 * g.m());
    for (int v : xs) net.add_arc(source, 2 * v, FlowNetwork::kInf);
    for (int v = 0; v < g.n(); ++v) {
      through[v] = net.add_arc(2 * v, 2 * v + 1, caps.empty() ? 1 : caps[v]);
      for (int w : g.neighbors(v)) net.add_arc(2 * v + 1, 2 * w, FlowNetwork::kInf);
    }
    for (int v : ys) net.add_arc(2 * v + 1, sink, FlowNetwork::kInf);
  }
};

}  // namespace

MengerResult menger(const Graph& g, const std::vector<int>& x, const std::vector<int>& y, int k,
                    const std::vector<char>& blocked) {
  require(k >= 0, ErrorKind::PreconditionViolated, "menger needs k >= 0");
  require(blocked.empty() || static_cast<int>(blocked.size()) == g.n(), ErrorKind::PreconditionViolated,
          "blocked flags differ from vertex count");
  auto is_blocked = [&](int v) { return !blocked.empty() && blocked[v]; };
  for (int v : x) require(v >= 0 && v < g.n() && !is_blocked(v), ErrorKind::IndexOutOfRange, "menger X vertex");
  for (int v : y) require(v >= 0 && v < g.n() && !is_blocked(v), ErrorKind::IndexOutOfRange, "menger Y vertex");

  std::vector<int> unit_caps;
  if (!blocked.empty())
    for (int v = 0; v < g.n(); ++v) unit_caps.push_back(blocked[v] ? 0 : 1);
  SplitNetwork sn(g, x, y, unit_caps);
  MengerResult res;
  int flow = sn.net.max_flow(sn.source, sn.sink, k);
  res.order = flow;
  std::vector<char> in_x(g.n(), 0), in_y(g.n(), 0);
  for (int v : x) in_x[v] = 1;
  for (int v : y) in_y[v] = 1;

  if (flow >= k) {
    res.linked = true;
    // Walk each unit of flow from source to sink through the split nodes.
    const FlowNetwork& net = sn.net;
    std::vector<int> left(net.arc_count(), 0);
    std::vector<std::vector<int>> carrying(net.nodes());
    for (int id = 0; id < net.arc_count(); id += 2)
      if (net.flow(id) > 0) {
        carrying[net.arc(id ^ 1).to].push_back(id);
        left[id] = net.flow(id);
      }
    for (int unit = 0; unit < k; ++unit) {
      std::vector<int> walk;
      int u = sn.source;
      while (u != sn.sink) {
        int next = -1;
        for (int id : carrying[u])
          if (left[id] > 0) {
            next = id;
            break;
          }
        left[next]--;
        u = net.arc(next).to;
        if (u < 2 * g.n() && u % 2 == 0) walk.push_back(u / 2);
      }
      // Trim to a proper X-Y path: stop at the first Y vertex, start at the last X before it.
      size_t end = 0;
      while (!in_y[walk[end]]) ++end;
      size_t begin = end;
      while (!in_x[walk[begin]]) --begin;
      res.paths.emplace_back(walk.begin() + begin, walk.begin() + end + 1);
    }
    return res;
  }

  // Among minimum separators prefer those avoiding X ∪ Y: a terminal costs
  // one unit more than an inner vertex, which never outweighs a size change.
  const int big = g.n() + 1;
  std::vector<int> caps(g.n());
  for (int v = 0; v < g.n(); ++v) caps[v] = is_blocked(v) ? 0 : (in_x[v] || in_y[v]) ? big + 1 : big;
  SplitNetwork wn(g, x, y, caps);
  wn.net.max_flow(wn.source, wn.sink);
  std::vector<char> reach = wn.net.reachable_from(wn.source);
  for (int v = 0; v < g.n(); ++v) {
    if (reach[2 * v]) res.separation.a.push_back(v);
    if (!reach[2 * v + 1]) res.separation.b.push_back(v);
  }
  return res;
}

int max_disjoint_paths(const Graph& g, const std::vector<int>& x, const std::vector<int>& y) {
  SplitNetwork sn(g, x, y);
  return sn.net.max_flow(sn.source, sn.sink);
}

void write_edge_list(std::ostream& os, const Graph& g) {
  os << g.n() << ' ' << g.m() << '\n';
  for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
  if (g.has_labels())
    for (int v = 0; v < g.n(); ++v) os << "# label " << v << ' ' << g.labels()[v] << '\n';
}

Graph read_edge_list(std::istream& is) {
  std::string line;
  int n = -1, m = -1;
  std::vector<Edge> edges;
  std::vector<std::pair<int, std::string>> named;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') {
      std::string tag;
      if (first == "#" && ls >> tag && tag == "label") {
        int v;
        std::string name;
        if (!(ls >> v >> name)) fail(ErrorKind::ParseError, "bad label line: " + line);
        named.emplace_back(v, name);
      }
      continue;
    }
    std::istringstream full(line);
    int a, b;
    if (!(full >> a >> b)) fail(ErrorKind::ParseError, "bad line: " + line);
    if (n < 0) {
      n = a;
      m = b;
    } else {
      edges.emplace_back(a, b);
    }
  }
  if (n < 0) fail(ErrorKind::ParseError, "missing header");
  if (static_cast<int>(edges.size()) != m)
    fail(ErrorKind::ParseError, "expected " + std::to_string(m) + " edges, found " + std::to_string(edges.size()));
  std::vector<std::string> labels;
  if (!named.empty()) {
    labels.resize(n);
    for (int v = 0; v < n; ++v) labels[v] = std::to_string(v);
    for (auto& [v, name] : named) {
      require(v >= 0 && v < n, ErrorKind::IndexOutOfRange, "label for missing vertex");
      labels[v] = name;
    }
  }
  return build_graph(n, std::move(edges), std::move(labels));
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open " + path);
  return read_edge_list(in);
}

void write_edge_list_file(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::ParseError, "cannot write " + path);
  write_edge_list(out, g);
}

void write_dot(std::ostream& os, const Graph& g, const std::string& name) {
  os << "graph " << name << " {\n";
  for (int v = 0; v < g.n(); ++v) {
    os << "  " << v;
    if (g.has_labels()) os << " [label=\"" << g.labels()[v] << "\"]";
    os << ";\n";
  }
  for (auto [u, v] : g.edges()) os << "  " << u << " -- " << v << ";\n";
  os << "}\n";
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::SearchCapExceeded: return "SearchCapExceeded";
    case ErrorKind::RootCountMismatch: return "RootCountMismatch";
    case ErrorKind::CertificateNotFound: return "CertificateNotFound";
    case ErrorKind::InvalidDecomposition: return "InvalidDecomposition";
    case ErrorKind::InvalidLinkage: return "InvalidLinkage";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NotTight: return "NotTight";
    case ErrorKind::TerminalNotOnBoundary: return "TerminalNotOnBoundary";
    case ErrorKind::ParameterTooSmall: return "ParameterTooSmall";
    case ErrorKind::FamilyTooSmall: return "FamilyTooSmall";
    case ErrorKind::GenerationCapExceeded: return "GenerationCapExceeded";
    case ErrorKind::VitalityValidationFailed: return "VitalityValidationFailed";
    case ErrorKind::CliqueTooSmall: return "CliqueTooSmall";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace gm
