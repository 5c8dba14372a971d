#include "gm/folio.hpp"
#include "gm/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "json.hpp"

namespace gm {

bool Folio::contains(const RootedGraph& rg) const { return contains(canonical_code(rg)); }

int detail(const RootedGraph& rg) {
  std::vector<int> r = rg.roots;
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return std::max(rg.graph.n() - static_cast<int>(r.size()), rg.graph.m());
}

RootedGraph paths_pattern(int k) {
  require(k >= 0, ErrorKind::PreconditionViolated, "negative pair count");
  RootedGraph rg{build_graph(k, {}), {}};
  for (int i = 0; i < k; ++i) {
    rg.roots.push_back(i);
    rg.roots.push_back(i);
  }
  return rg;
}

namespace {

void check_roots(const RootedGraph& host) {
  for (int r : host.roots)
    require(r >= 0 && r < host.graph.n(), ErrorKind::IndexOutOfRange, "root outside the host");
}

// Restricted growth strings: block[i] is the pattern vertex of root label i.
void for_each_root_partition(int k, const std::function<void(const std::vector<int>&, int)>& f) {
  std::vector<int> block(k, 0);
  std::function<void(int, int)> rec = [&](int i, int blocks) {
    if (i == k) {
      f(block, blocks);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      block[i] = b;
      rec(i + 1, std::max(blocks, b + 1));
    }
  };
  rec(0, 0);
}

}  // namespace

Folio folio_bruteforce(const RootedGraph& host, int d, const FolioConfig& cfg) {
  const int k = static_cast<int>(host.roots.size());
  require(d >= 0, ErrorKind::PreconditionViolated, "negative detail");
  check_roots(host);
  require(host.graph.n() <= cfg.oracle_vertex_cap && d <= cfg.oracle_detail_cap && k <= cfg.oracle_root_cap,
          ErrorKind::SearchCapExceeded, "folio oracle limited to small hosts, detail and root counts");
  Folio folio{k, d, {}};
  std::unordered_map<CanonicalCode, bool> memo;

  for_each_root_partition(k, [&](const std::vector<int>& block, int b) {
    // Labels sitting on one host vertex cannot go to different branch sets.
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (host.roots[i] == host.roots[j] && block[i] != block[j]) return;
    for (int extra = 0; extra <= d; ++extra) {
      int p = b + extra;
      std::vector<Edge> pairs;
      for (int a = 0; a < p; ++a)
        for (int c = a + 1; c < p; ++c) pairs.emplace_back(a, c);
      int np = static_cast<int>(pairs.size());
      // Feasibility per edge subset; a superset of an infeasible subset is infeasible.
      std::unordered_map<std::uint64_t, bool> feasible;
      std::function<void(int, int, std::uint64_t)> choose = [&](int from, int left, std::uint64_t mask) {
        if (left == 0) {
          bool doomed = false;
          for_each_bit(mask, [&](int e) {
            auto it = feasible.find(mask & ~bit(e));
            doomed = doomed || it == feasible.end() || !it->second;
          });
          if (doomed) {
            feasible[mask] = false;
            return;
          }
          std::vector<Edge> edges;
          for_each_bit(mask, [&](int e) { edges.push_back(pairs[e]); });
          RootedGraph pat{build_graph(p, edges), block};
          CanonicalCode code = canonical_code(pat);
          auto it = memo.find(code);
          bool ok;
          if (it != memo.end()) {
            ok = it->second;
          } else {
            ok = find_rooted_minor(host, pat, cfg.minor).has_value();
            memo.emplace(code, ok);
          }
          feasible[mask] = ok;
          if (ok) folio.members.insert(code);
          return;
        }
        for (int e = from; e <= np - left; ++e) choose(e + 1, left - 1, mask | bit(e));
      };
      for (int size = 0; size <= std::min(d, np); ++size) choose(0, size, 0);
    }
  });
  return folio;
}

namespace {

using i8 = std::int8_t;

// Partial solution restricted to a bag. owner/piece are per bag position (-1:
// vertex unused). Owners are pattern vertices; a closed owner has no vertex
// left in the bag and its branch set is final.
struct DpState {
  std::vector<i8> owner, piece;
  std::vector<std::uint32_t> mask;  // root labels per owner
  std::vector<char> closed;
  std::vector<std::pair<i8, i8>> edges;
};

class FolioDp {
 public:
  FolioDp(const RootedGraph& host, int d, const FolioConfig& cfg) : g_(host.graph), d_(d), cfg_(cfg) {
    k_ = static_cast<int>(host.roots.size());
    label_.assign(g_.n(), 0);
    for (int i = 0; i < k_; ++i) label_[host.roots[i]] |= 1u << i;
  }

  Folio run(const NiceDecomposition& nd) {
    std::vector<StateSet> sets(nd.nodes.size());
    // nice_form emits children before parents.
    for (size_t t = 0; t < nd.nodes.size(); ++t) {
      const NiceNode& node = nd.nodes[t];
      switch (node.kind) {
        case NiceKind::Leaf:
          emit(sets[t], DpState{});
          break;
        case NiceKind::Introduce:
          sets[t] = introduce(sets[node.children[0]], node.bag, node.vertex);
          break;
        case NiceKind::Forget:
          sets[t] = forget(sets[node.children[0]], nd.nodes[node.children[0]].bag, node.vertex);
          break;
        case NiceKind::Join:
          sets[t] = join(sets[node.children[0]], sets[node.children[1]]);
          break;
      }
      for (int c : node.children) StateSet().swap(sets[c]);
    }
    StateSet cur = std::move(sets[nd.root]);
    std::vector<int> bag = nd.nodes[nd.root].bag;
    while (!bag.empty()) {
      cur = forget(cur, bag, bag.back());
      bag.pop_back();
    }
    Folio folio{k_, d_, {}};
    for (const auto& [key, s] : cur) {
      int n = static_cast<int>(s.mask.size());
      RootedGraph pat;
      std::vector<Edge> edges;
      for (auto [a, b] : s.edges) edges.emplace_back(a, b);
      pat.graph = build_graph(n, edges);
      pat.roots.assign(k_, -1);
      for (int x = 0; x < n; ++x)
        for (int i = 0; i < k_; ++i)
          if (s.mask[x] >> i & 1) pat.roots[i] = x;
      folio.members.insert(canonical_code(pat));
    }
    return folio;
  }

 private:
  using StateSet = std::unordered_map<std::string, DpState>;

  static bool has_edge(const DpState& s, int a, int b) {
    auto e = std::make_pair(static_cast<i8>(std::min(a, b)), static_cast<i8>(std::max(a, b)));
    return std::find(s.edges.begin(), s.edges.end(), e) != s.edges.end();
  }

  int unrooted_closed(const DpState& s) const {
    int c = 0;
    for (size_t x = 0; x < s.mask.size(); ++x) c += s.closed[x] && s.mask[x] == 0;
    return c;
  }

  // Renumbers owners (open by first bag appearance, then closed by a
  // neighbourhood key) and pieces, and returns the state's key.
  static std::string normalize(DpState& s) {
    int no = static_cast<int>(s.mask.size());
    std::vector<int> remap(no, -1);
    int next = 0;
    for (i8 o : s.owner)
      if (o >= 0 && remap[o] < 0) remap[o] = next++;
    std::vector<std::vector<int>> nb(no);
    for (auto [a, b] : s.edges) {
      nb[a].push_back(b);
      nb[b].push_back(a);
    }
    auto ncode = [&](int y) {
      if (remap[y] >= 0) return remap[y];
      if (s.mask[y]) return 64 + __builtin_ctz(s.mask[y]);
      return 1000;
    };
    std::vector<std::pair<std::vector<int>, int>> closed;
    for (int x = 0; x < no; ++x) {
      if (remap[x] >= 0) continue;
      std::vector<int> key{s.mask[x] == 0 ? 1 : 0, static_cast<int>(s.mask[x])};
      std::vector<int> codes;
      for (int y : nb[x]) codes.push_back(ncode(y));
      std::sort(codes.begin(), codes.end());
      key.insert(key.end(), codes.begin(), codes.end());
      closed.emplace_back(std::move(key), x);
    }
    std::sort(closed.begin(), closed.end());
    for (auto& c : closed) remap[c.second] = next++;

    DpState t;
    t.mask.assign(no, 0);
    t.closed.assign(no, 0);
    for (int x = 0; x < no; ++x) {
      t.mask[remap[x]] = s.mask[x];
      t.closed[remap[x]] = s.closed[x];
    }
    t.owner.resize(s.owner.size());
    t.piece.resize(s.piece.size());
    std::vector<int> pmap(256, -1);
    int pnext = 0;
    for (size_t j = 0; j < s.owner.size(); ++j) {
      if (s.owner[j] < 0) {
        t.owner[j] = t.piece[j] = -1;
        continue;
      }
      t.owner[j] = static_cast<i8>(remap[s.owner[j]]);
      int& pm = pmap[static_cast<unsigned char>(s.piece[j])];
      if (pm < 0) pm = pnext++;
      t.piece[j] = static_cast<i8>(pm);
    }
    for (auto [a, b] : s.edges) {
      int x = remap[a], y = remap[b];
      t.edges.emplace_back(static_cast<i8>(std::min(x, y)), static_cast<i8>(std::max(x, y)));
    }
    std::sort(t.edges.begin(), t.edges.end());
    s = std::move(t);

    std::string key;
    key.push_back(static_cast<char>(s.owner.size()));
    for (size_t j = 0; j < s.owner.size(); ++j) {
      key.push_back(static_cast<char>(s.owner[j]));
      key.push_back(static_cast<char>(s.piece[j]));
    }
    key.push_back(static_cast<char>(no));
    for (int x = 0; x < no; ++x) {
      key.push_back(static_cast<char>(s.mask[x] & 0xff));
      key.push_back(static_cast<char>(s.mask[x] >> 8));
      key.push_back(s.closed[x]);
    }
    for (auto [a, b] : s.edges) {
      key.push_back(static_cast<char>(a));
      key.push_back(static_cast<char>(b));
    }
    return key;
  }

  void emit(StateSet& out, DpState s) {
    std::string key = normalize(s);
    if (out.try_emplace(std::move(key), std::move(s)).second && ++created_ > cfg_.state_budget)
      fail(ErrorKind::BudgetExceeded, "folio DP exceeded its state budget");
  }

  StateSet introduce(const StateSet& child, const std::vector<int>& bag, int v) {
    StateSet out;
    int jv = static_cast<int>(std::find(bag.begin(), bag.end(), v) - bag.begin());
    int nb = static_cast<int>(bag.size());
    std::uint32_t lab = label_[v];
    for (const auto& [key, s] : child) {
      DpState base = s;
      base.owner.insert(base.owner.begin() + jv, -1);
      base.piece.insert(base.piece.begin() + jv, -1);
      if (lab == 0) emit(out, base);
      std::vector<int> present;
      int next_piece = 0;
      for (int j = 0; j < nb; ++j) {
        if (base.owner[j] < 0) continue;
        present.push_back(base.owner[j]);
        next_piece = std::max(next_piece, base.piece[j] + 1);
      }
      std::sort(present.begin(), present.end());
      present.erase(std::unique(present.begin(), present.end()), present.end());
      std::vector<int> choices = present;
      choices.push_back(-1);  // a fresh pattern vertex
      for (int x : choices) {
        DpState t = base;
        if (x < 0) {
          x = static_cast<int>(t.mask.size());
          t.mask.push_back(0);
          t.closed.push_back(0);
        }
        t.mask[x] |= lab;
        t.owner[jv] = static_cast<i8>(x);
        // v joins every piece of x it touches.
        std::vector<int> merged;
        std::vector<int> others;
        for (int j = 0; j < nb; ++j) {
          if (j == jv || t.owner[j] < 0 || !g_.adjacent(bag[j], v)) continue;
          if (t.owner[j] == x)
            merged.push_back(t.piece[j]);
          else if (!has_edge(t, x, t.owner[j]))
            others.push_back(t.owner[j]);
        }
        for (int j = 0; j < nb; ++j)
          if (j != jv && t.owner[j] == x &&
              std::find(merged.begin(), merged.end(), t.piece[j]) != merged.end())
            t.piece[j] = static_cast<i8>(next_piece);
        t.piece[jv] = static_cast<i8>(next_piece);
        std::sort(others.begin(), others.end());
        others.erase(std::unique(others.begin(), others.end()), others.end());
        // Each newly available adjacency may or may not become a pattern edge.
        int no = static_cast<int>(others.size());
        for (std::uint32_t sub = 0; sub < (1u << no); ++sub) {
          if (static_cast<int>(t.edges.size()) + __builtin_popcount(sub) > d_) continue;
          DpState u = t;
          for (int i = 0; i < no; ++i)
            if (sub >> i & 1)
              u.edges.emplace_back(static_cast<i8>(std::min(x, others[i])), static_cast<i8>(std::max(x, others[i])));
          emit(out, std::move(u));
        }
      }
    }
    return out;
  }

  StateSet forget(const StateSet& child, const std::vector<int>& child_bag, int v) {
    StateSet out;
    int jv = static_cast<int>(std::find(child_bag.begin(), child_bag.end(), v) - child_bag.begin());
    int nb = static_cast<int>(child_bag.size());
    for (const auto& [key, s] : child) {
      DpState t = s;
      int x = t.owner[jv];
      if (x >= 0) {
        bool piece_stays = false, owner_stays = false;
        for (int j = 0; j < nb; ++j) {
          if (j == jv) continue;
          piece_stays = piece_stays || (t.owner[j] >= 0 && t.piece[j] == t.piece[jv]);
          owner_stays = owner_stays || t.owner[j] == x;
        }
        // A piece leaving while its owner has another piece can never reconnect.
        if (!piece_stays && owner_stays) continue;
        if (!owner_stays) {
          t.closed[x] = 1;
          if (t.mask[x] == 0 && unrooted_closed(t) > d_) continue;
        }
      }
      t.owner.erase(t.owner.begin() + jv);
      t.piece.erase(t.piece.begin() + jv);
      emit(out, std::move(t));
    }
    return out;
  }

  StateSet join(const StateSet& a, const StateSet& b) {
    StateSet out;
    std::unordered_map<std::string, std::vector<const DpState*>> by_owner;
    for (const auto& [key, s] : b) by_owner[std::string(s.owner.begin(), s.owner.end())].push_back(&s);
    for (const auto& [key, sa] : a) {
      auto it = by_owner.find(std::string(sa.owner.begin(), sa.owner.end()));
      if (it == by_owner.end()) continue;
      int nb = static_cast<int>(sa.owner.size());
      int open = 0;
      for (i8 o : sa.owner) open = std::max(open, o + 1);
      int na = static_cast<int>(sa.mask.size());
      for (const DpState* sbp : it->second) {
        const DpState& sb = *sbp;
        DpState t = sa;
        // Pieces: union of the two piece relations on the bag.
        std::vector<int> parent(nb);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
        for (int i = 0; i < nb; ++i)
          for (int j = i + 1; j < nb; ++j)
            if (sa.owner[i] >= 0 && sa.owner[j] >= 0 && (sa.piece[i] == sa.piece[j] || sb.piece[i] == sb.piece[j]))
              parent[find(j)] = find(i);
        for (int i = 0; i < nb; ++i) t.piece[i] = sa.owner[i] >= 0 ? static_cast<i8>(find(i)) : -1;
        for (int x = 0; x < open; ++x) t.mask[x] |= sb.mask[x];
        auto shift = [&](int y) { return y < open ? y : y + na - open; };
        for (size_t y = open; y < sb.mask.size(); ++y) {
          t.mask.push_back(sb.mask[y]);
          t.closed.push_back(sb.closed[y]);
        }
        for (auto [x, y] : sb.edges) {
          auto e = std::make_pair(static_cast<i8>(shift(x)), static_cast<i8>(shift(y)));
          if (std::find(t.edges.begin(), t.edges.end(), e) == t.edges.end()) t.edges.push_back(e);
        }
        if (static_cast<int>(t.edges.size()) > d_ || unrooted_closed(t) > d_) continue;
        emit(out, std::move(t));
      }
    }
    return out;
  }

  const Graph& g_;
  int d_;
  int k_ = 0;
  const FolioConfig& cfg_;
  std::vector<std::uint32_t> label_;
  std::int64_t created_ = 0;
};

}  // namespace

Folio folio_dp(const RootedGraph& host, int d, const TreeDecomposition& td, const FolioConfig& cfg) {
  require(d >= 0, ErrorKind::PreconditionViolated, "negative detail");
  check_roots(host);
  require(host.roots.size() <= 16, ErrorKind::SearchCapExceeded, "folio DP supports at most 16 root labels");
  if (host.graph.n() == 0) {
    NiceDecomposition nd;
    nd.nodes.push_back({NiceKind::Leaf, -1, {}, {}});
    nd.root = 0;
    return FolioDp(host, d, cfg).run(nd);
  }
  TdCheck check = validate_td(host.graph, td);
  if (!check.valid) fail(ErrorKind::InvalidDecomposition, "decomposition does not validate for the host");
  require(check.width < 60, ErrorKind::BudgetExceeded, "decomposition too wide for the folio DP");
  NiceDecomposition nd = nice_form(host.graph, td);
  return FolioDp(host, d, cfg).run(nd);
}

Folio folio_dp_auto(const RootedGraph& host, int d, const FolioConfig& cfg) {
  if (host.graph.n() == 0) return folio_dp(host, d, TreeDecomposition{}, cfg);
  TreeDecomposition td =
      host.graph.n() <= kExactTreewidthCap ? exact_treewidth(host.graph).td : heuristic_td(host.graph);
  return folio_dp(host, d, td, cfg);
}

namespace {

// All |R|^k ordered tuples, in odometer order.
std::vector<std::vector<int>> root_tuples(const std::vector<int>& r, int k, std::int64_t budget) {
  require(k >= 0, ErrorKind::PreconditionViolated, "negative root count");
  std::int64_t count = 1;
  for (int i = 0; i < k; ++i) {
    count *= static_cast<std::int64_t>(r.size());
    require(count <= budget, ErrorKind::BudgetExceeded, "too many root tuples");
  }
  std::vector<std::vector<int>> out;
  if (count == 0) return out;
  std::vector<int> idx(k, 0);
  while (true) {
    std::vector<int> t(k);
    for (int i = 0; i < k; ++i) t[i] = r[idx[i]];
    out.push_back(std::move(t));
    int i = k - 1;
    while (i >= 0 && idx[i] + 1 == static_cast<int>(r.size())) idx[i--] = 0;
    if (i < 0) break;
    ++idx[i];
  }
  return out;
}

}  // namespace

Folio kd_folio(const AnnotatedGraph& host, int k, int d, FolioEngine engine, const FolioConfig& cfg) {
  auto tuples = root_tuples(host.annotated, k, cfg.multiset_budget);
  std::vector<Folio> parts(tuples.size());
  parallel_for(static_cast<int>(tuples.size()), cfg.threads, [&](int i) {
    RootedGraph rg{host.graph, tuples[i]};
    parts[i] = engine == FolioEngine::Oracle ? folio_bruteforce(rg, d, cfg) : folio_dp_auto(rg, d, cfg);
  });
  Folio out{k, d, {}};
  for (const Folio& f : parts) out.members.insert(f.members.begin(), f.members.end());
  return out;
}

bool strongly_irrelevant(const AnnotatedGraph& host, int k, int d, int v, const FolioConfig& cfg,
                         FolioEngine engine) {
  require(v >= 0 && v < host.graph.n(), ErrorKind::IndexOutOfRange, "vertex out of range");
  require(std::find(host.annotated.begin(), host.annotated.end(), v) == host.annotated.end(),
          ErrorKind::PreconditionViolated, "strong irrelevance is defined for vertices outside R");
  auto tuples = root_tuples(host.annotated, k, cfg.multiset_budget);
  Subgraph rest = delete_vertices(host.graph, {v});
  std::atomic<bool> same{true};
  parallel_for(static_cast<int>(tuples.size()), cfg.threads, [&](int i) {
    if (!same) return;
    RootedGraph full{host.graph, tuples[i]};
    RootedGraph minus{rest.graph, {}};
    for (int r : tuples[i]) minus.roots.push_back(rest.old_to_new[r]);
    // Folio(G - v) is always contained in Folio(G), so sizes decide equality.
    auto run = [&](const RootedGraph& rg) {
      return engine == FolioEngine::Oracle ? folio_bruteforce(rg, d, cfg) : folio_dp_auto(rg, d, cfg);
    };
    if (run(full).size() != run(minus).size()) same = false;
  });
  return same;
}

std::string folio_json(const Folio& f) {
  nlohmann::json out = nlohmann::json::array();
  for (const CanonicalCode& code : f.members) {
    RootedGraph rg = decode_code(code);
    nlohmann::json edges = nlohmann::json::array();
    for (auto [a, b] : rg.graph.edges()) edges.push_back({a, b});
    out.push_back({{"code", code_to_hex(code)},
                   {"vertices", rg.graph.n()},
                   {"edges", edges},
                   {"root_map", rg.roots},
                   {"detail", detail(rg)}});
  }
  return out.dump();
}

}  // namespace gm
