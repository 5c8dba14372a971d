#include "gm/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gm/decomposition.hpp"
#include "gm/error.hpp"
#include "gm/flow.hpp"
#include "gm/parallel.hpp"
#include "json.hpp"

namespace gm {

namespace {

Graph complete_graph(int t) {
  std::vector<Edge> e;
  for (int i = 0; i < t; ++i)
    for (int j = i + 1; j < t; ++j) e.push_back({i, j});
  return build_graph(t, e);
}

// Contractible working copy: vertex v stands for the branch set bags[v].
struct MinorWork {
  std::vector<std::set<int>> adj;
  std::vector<std::vector<int>> bags;
  std::vector<char> alive;
  std::int64_t edges = 0;
  int vertices = 0;

  explicit MinorWork(const Graph& g) : adj(g.n()), bags(g.n()), alive(g.n(), 1), edges(g.m()), vertices(g.n()) {
    for (int v = 0; v < g.n(); ++v) {
      adj[v].insert(g.neighbors(v).begin(), g.neighbors(v).end());
      bags[v] = {v};
    }
  }

  void remove_vertex(int v) {
    for (int u : adj[v]) adj[u].erase(v);
    edges -= static_cast<std::int64_t>(adj[v].size());
    adj[v].clear();
    alive[v] = 0;
    --vertices;
  }
  void remove_edge(int u, int v) {
    adj[u].erase(v);
    adj[v].erase(u);
    --edges;
  }
  // Merges v into u.
  void contract(int u, int v) {
    for (int w : adj[v]) {
      if (w == u) continue;
      adj[w].erase(v);
      if (adj[u].insert(w).second) adj[w].insert(u);
      else --edges;
    }
    adj[u].erase(v);
    --edges;
    adj[v].clear();
    alive[v] = 0;
    --vertices;
    bags[u].insert(bags[u].end(), bags[v].begin(), bags[v].end());
    bags[v].clear();
  }
  int common(int u, int v) const {
    int c = 0;
    for (int w : adj[u]) c += adj[v].count(w) > 0;
    return c;
  }
};

// 8|E| >= 2^t |V|, i.e. |E| >= 2^(t-3) |V|, without fractions.
bool dense_enough(std::int64_t edges, std::int64_t vertices, int t) {
  if (t >= 40) return false;
  return 8 * edges >= (std::int64_t{1} << t) * vertices;
}

// Shrinks the working minor until no deletion or contraction keeps it dense.
void make_minimal(MinorWork& w, int t) {
  int n = static_cast<int>(w.alive.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < n && !changed; ++v)
      if (w.alive[v] && w.vertices > 1 &&
          dense_enough(w.edges - static_cast<std::int64_t>(w.adj[v].size()), w.vertices - 1, t)) {
        w.remove_vertex(v);
        changed = true;
      }
    for (int u = 0; u < n && !changed; ++u) {
      if (!w.alive[u]) continue;
      for (int v : w.adj[u]) {
        if (v < u) continue;
        if (dense_enough(w.edges - 1, w.vertices, t)) {
          w.remove_edge(u, v);
          changed = true;
          break;
        }
        if (dense_enough(w.edges - 1 - w.common(u, v), w.vertices - 1, t)) {
          w.contract(u, v);
          changed = true;
          break;
        }
      }
    }
  }
}

std::optional<std::vector<int>> find_cycle(const Graph& g) {
  std::vector<int> depth(g.n(), -2), path;
  std::optional<std::vector<int>> cycle;
  auto dfs = [&](auto&& self, int v, int parent) -> void {
    depth[v] = static_cast<int>(path.size());
    path.push_back(v);
    for (int u : g.neighbors(v)) {
      if (cycle) return;
      if (u == parent) continue;
      if (depth[u] == -2) self(self, u, v);
      else if (depth[u] >= 0) cycle = std::vector<int>(path.begin() + depth[u], path.end());
    }
    path.pop_back();
    depth[v] = -1;
  };
  for (int v = 0; v < g.n() && !cycle; ++v)
    if (depth[v] == -2) dfs(dfs, v, -1);
  return cycle;
}

// K_t model in a graph with |E| >= 2^(t-3)|V|: in a minimal such minor every
// edge lies in 2^(t-3) triangles, so a minimum-degree vertex has a neighbourhood
// dense enough for K_(t-1).
std::optional<MinorModel> dense_model(const Graph& g, int t) {
  if (t == 0) return MinorModel{};
  if (g.n() == 0 || !dense_enough(g.m(), g.n(), t)) return std::nullopt;
  MinorWork w(g);
  make_minimal(w, t);
  std::vector<int> alive;
  std::vector<int> local(g.n(), -1);
  for (int v = 0; v < g.n(); ++v)
    if (w.alive[v]) {
      local[v] = static_cast<int>(alive.size());
      alive.push_back(v);
    }
  std::vector<Edge> e;
  for (int v : alive)
    for (int u : w.adj[v])
      if (v < u) e.push_back({local[v], local[u]});
  Graph h = build_graph(static_cast<int>(alive.size()), e);
  auto lift = [&](const std::vector<int>& hs) {
    std::vector<int> bag;
    for (int x : hs) bag.insert(bag.end(), w.bags[alive[x]].begin(), w.bags[alive[x]].end());
    std::sort(bag.begin(), bag.end());
    return bag;
  };
  if (t == 1) return MinorModel{lift({0})};
  if (t == 2) {
    if (h.m() == 0) return std::nullopt;
    return MinorModel{lift({h.edges()[0].first}), lift({h.edges()[0].second})};
  }
  if (t == 3) {
    auto cyc = find_cycle(h);
    if (!cyc) return std::nullopt;
    return MinorModel{lift({(*cyc)[0]}), lift({(*cyc)[1]}), lift(std::vector<int>(cyc->begin() + 2, cyc->end()))};
  }
  int x = 0;
  for (int v = 1; v < h.n(); ++v)
    if (h.degree(v) < h.degree(x)) x = v;
  Subgraph nb = induced_subgraph(h, h.neighbors(x));
  auto sub = dense_model(nb.graph, t - 1);
  if (!sub) return std::nullopt;
  MinorModel out;
  for (const auto& s : *sub) {
    std::vector<int> hs;
    for (int y : s) hs.push_back(nb.new_to_old[y]);
    out.push_back(lift(hs));
  }
  out.push_back(lift({x}));
  return out;
}

// Some clique with at least t vertices, by branch and bound.
std::optional<std::vector<int>> find_clique(const Graph& g, int t) {
  std::vector<int> current;
  std::optional<std::vector<int>> found;
  auto rec = [&](auto&& self, std::vector<int> cand) -> void {
    if (found) return;
    if (static_cast<int>(current.size()) >= t) {
      found = current;
      return;
    }
    while (!cand.empty() && !found) {
      if (static_cast<int>(current.size() + cand.size()) < t) return;
      int v = cand.back();
      cand.pop_back();
      std::vector<int> next;
      for (int u : cand)
        if (g.adjacent(u, v)) next.push_back(u);
      current.push_back(v);
      self(self, next);
      current.pop_back();
    }
  };
  std::vector<int> all;
  for (int v = 0; v < g.n(); ++v)
    if (g.degree(v) + 1 >= t) all.push_back(v);
  rec(rec, all);
  return found;
}

}  // namespace

CliqueMinorResult dense_clique_minor(const Graph& g, int t) {
  require(t >= 0, ErrorKind::PreconditionViolated, "negative clique order");
  if (t == 0) return {MinorModel{}, "density"};
  if (auto model = dense_model(g, t)) {
    require(verify_minor_model(g, complete_graph(t), *model), ErrorKind::PreconditionViolated,
            "dense minor reduction produced an invalid model");
    return {*model, "density"};
  }
  if (auto c = find_clique(g, t)) {
    MinorModel model;
    for (int i = 0; i < t; ++i) model.push_back({(*c)[i]});
    std::sort(model.begin(), model.end());
    return {model, "clique"};
  }
  return {std::nullopt, "below density 2^(t-3) and no K_t subgraph"};
}

int clique_rule_order(int l, int d) { return 5 * l / 2 + 3 * d * d + 1; }

std::optional<int> clique_irrelevant_vertex(const AnnotatedGraph& host, int d, const MinorModel& model) {
  const Graph& g = host.graph;
  std::set<int> z(host.annotated.begin(), host.annotated.end());
  int t = static_cast<int>(model.size());
  require(t >= clique_rule_order(static_cast<int>(z.size()), d), ErrorKind::CliqueTooSmall,
          "clique model below floor(5l/2) + 3d^2 + 1");
  require(verify_minor_model(g, complete_graph(t), model), ErrorKind::PreconditionViolated,
          "not a clique minor model");
  int n = g.n();
  int best_order = -1, best_a = -1;
  std::vector<int> best_side;
  for (const auto& x : model) {
    if (std::any_of(x.begin(), x.end(), [&](int v) { return z.count(v) > 0; })) continue;
    // Node 2v is v's entry, 2v + 1 its exit; the split arc carries v's capacity.
    FlowNetwork net(2 * n + 2);
    int source = 2 * n, sink = 2 * n + 1;
    std::vector<char> in_x(n, 0);
    for (int v : x) in_x[v] = 1;
    for (int v = 0; v < n; ++v) net.add_arc(2 * v, 2 * v + 1, in_x[v] ? FlowNetwork::kInf : 1);
    for (auto [u, v] : g.edges()) {
      net.add_arc(2 * u + 1, 2 * v, FlowNetwork::kInf);
      net.add_arc(2 * v + 1, 2 * u, FlowNetwork::kInf);
    }
    for (int v : z) net.add_arc(source, 2 * v, FlowNetwork::kInf);
    for (int v : x) net.add_arc(2 * v + 1, sink, FlowNetwork::kInf);
    int order = net.max_flow(source, sink);
    // The sink side closest to the sink gives the largest A.
    std::vector<char> t_side = net.reaching(sink);
    std::vector<int> b_only;
    for (int v = 0; v < n; ++v)
      if (t_side[2 * v]) b_only.push_back(v);
    int a_size = n - static_cast<int>(b_only.size());
    if (best_order < 0 || order < best_order || (order == best_order && a_size > best_a)) {
      best_order = order;
      best_a = a_size;
      best_side = b_only;
    }
  }
  if (best_side.empty()) return std::nullopt;
  return best_side.front();
}

namespace {

bool use_bruteforce(const AnnotatedGraph& host, int k, int d, const PipelineConfig& cfg) {
  switch (cfg.engine) {
    case IrrelevanceEngine::Oracle:
      return true;
    case IrrelevanceEngine::Dp:
      return false;
    case IrrelevanceEngine::Auto:
      break;
  }
  std::set<int> r(host.annotated.begin(), host.annotated.end());
  return host.graph.n() <= cfg.folio.oracle_vertex_cap && d <= cfg.folio.oracle_detail_cap &&
         k <= cfg.folio.oracle_root_cap;
}

// Exact width when n <= 20; otherwise the min-fill width, which only proves "met".
TreewidthEvidence measure_width(const Graph& g, int threshold) {
  if (g.n() <= 20) {
    TreewidthResult r = exact_treewidth(g, threshold);
    return {r.width, r.above ? WidthKind::LowerBound : WidthKind::Exact};
  }
  return {validate_td(g, heuristic_td(g)).width, WidthKind::UpperBound};
}

bool threshold_met(const TreewidthEvidence& e, int threshold) {
  return e.kind != WidthKind::LowerBound && e.width <= threshold;
}

// Candidates outside R, farthest from R first (unreachable ones first of all).
std::vector<int> oracle_candidates(const AnnotatedGraph& host) {
  const Graph& g = host.graph;
  std::vector<int> dist = bfs_distances(g, host.annotated);
  std::set<int> r(host.annotated.begin(), host.annotated.end());
  std::vector<int> out;
  for (int v = 0; v < g.n(); ++v)
    if (!r.count(v)) out.push_back(v);
  auto key = [&](int v) { return dist[v] < 0 ? g.n() + 1 : dist[v]; };
  std::stable_sort(out.begin(), out.end(), [&](int a, int b) { return key(a) > key(b); });
  return out;
}

std::optional<int> oracle_vertex(const AnnotatedGraph& host, int k, int d, const PipelineConfig& cfg) {
  std::vector<int> cand = oracle_candidates(host);
  FolioEngine engine = use_bruteforce(host, k, d, cfg) ? FolioEngine::Oracle : FolioEngine::Dp;
  FolioConfig inner = cfg.folio;
  int threads = std::max(1, cfg.threads);
  if (threads > 1) inner.threads = 1;
  // Batches keep the answer the first certified candidate regardless of thread count.
  for (size_t start = 0; start < cand.size(); start += threads) {
    size_t end = std::min(cand.size(), start + threads);
    std::vector<char> ok(end - start, 0);
    parallel_for(static_cast<int>(end - start), threads, [&](int i) {
      ok[i] = strongly_irrelevant(host, k, d, cand[start + i], inner, engine);
    });
    for (size_t i = 0; i < ok.size(); ++i)
      if (ok[i]) return cand[start + i];
  }
  return std::nullopt;
}

}  // namespace

ReductionResult reduce(const AnnotatedGraph& host, int k, int d, const PipelineConfig& cfg) {
  require(cfg.treewidth_threshold >= 1, ErrorKind::PreconditionViolated, "treewidth threshold below 1");
  require(k >= 0 && d >= 0, ErrorKind::PreconditionViolated, "negative k or d");
  for (int r : host.annotated)
    require(r >= 0 && r < host.graph.n(), ErrorKind::IndexOutOfRange, "annotated vertex out of range");
  std::set<int> rset(host.annotated.begin(), host.annotated.end());
  int l = static_cast<int>(rset.size());
  int need = clique_rule_order(l, d);

  AnnotatedGraph cur = host;
  std::vector<int> to_input(host.graph.n());
  for (int v = 0; v < host.graph.n(); ++v) to_input[v] = v;
  ReductionTrace trace;

  while (true) {
    trace.treewidth = measure_width(cur.graph, cfg.treewidth_threshold);
    if (threshold_met(trace.treewidth, cfg.treewidth_threshold)) {
      trace.status = ReductionStatus::ThresholdMet;
      break;
    }
    std::optional<int> victim;
    std::string why;
    if (cfg.rules != RuleSet::Oracle) {
      CliqueMinorResult clique = dense_clique_minor(cur.graph, need);
      if (clique.model) {
        victim = clique_irrelevant_vertex(cur, d, *clique.model);
        why = "clique-rule";
      }
    }
    if (!victim && cfg.rules != RuleSet::CliqueRule) {
      victim = oracle_vertex(cur, k, d, cfg);
      why = "oracle";
    }
    if (!victim) {
      trace.status = ReductionStatus::Stuck;
      break;
    }
    trace.deletions.push_back({to_input[*victim], why});
    Subgraph rest = delete_vertices(cur.graph, {*victim});
    AnnotatedGraph next{rest.graph, {}};
    for (int r : cur.annotated) next.annotated.push_back(rest.old_to_new[r]);
    std::vector<int> next_to_input(rest.graph.n());
    for (int v = 0; v < rest.graph.n(); ++v) next_to_input[v] = to_input[rest.new_to_old[v]];
    cur = std::move(next);
    to_input = std::move(next_to_input);
  }
  trace.final_graph = cur;
  trace.final_to_input = to_input;
  return {cur, trace};
}

AnnotatedGraph replay(const AnnotatedGraph& input, const ReductionTrace& trace) {
  std::vector<int> drop;
  for (const Deletion& del : trace.deletions) drop.push_back(del.vertex);
  Subgraph rest = delete_vertices(input.graph, drop);
  AnnotatedGraph out{rest.graph, {}};
  for (int r : input.annotated) {
    require(rest.old_to_new[r] >= 0, ErrorKind::InvalidDecomposition, "trace deletes an annotated vertex");
    out.annotated.push_back(rest.old_to_new[r]);
  }
  return out;
}

Folio solve_folio(const AnnotatedGraph& host, int k, int d, const PipelineConfig& cfg, ReductionTrace* trace) {
  ReductionResult r = reduce(host, k, d, cfg);
  FolioConfig fc = cfg.folio;
  fc.threads = std::max(fc.threads, cfg.threads);
  Folio f = kd_folio(r.reduced, k, d, FolioEngine::Dp, fc);
  if (trace) *trace = std::move(r.trace);
  return f;
}

std::string width_kind_name(WidthKind k) {
  switch (k) {
    case WidthKind::Exact:
      return "exact";
    case WidthKind::LowerBound:
      return "lower-bound";
    case WidthKind::UpperBound:
      return "upper-bound";
  }
  return "";
}

std::string trace_json(const ReductionTrace& trace) {
  nlohmann::json dels = nlohmann::json::array();
  for (const Deletion& del : trace.deletions) dels.push_back({{"vertex", del.vertex}, {"justification", del.justification}});
  nlohmann::json edges = nlohmann::json::array();
  for (auto [a, b] : trace.final_graph.graph.edges()) edges.push_back({a, b});
  nlohmann::json out = {
      {"deletions", dels},
      {"final_graph",
       {{"vertices", trace.final_graph.graph.n()},
        {"edges", edges},
        {"annotated", trace.final_graph.annotated},
        {"input_ids", trace.final_to_input}}},
      {"treewidth", {{"width", trace.treewidth.width}, {"kind", width_kind_name(trace.treewidth.kind)}}},
      {"status", trace.status == ReductionStatus::ThresholdMet ? "threshold-met" : "stuck"},
  };
  return out.dump();
}

}  // namespace gm
