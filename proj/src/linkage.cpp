#include "gm/linkage.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "gm/minor.hpp"

namespace gm {

bool validate_linkage(const Graph& g, const Linkage& l) {
  std::vector<char> used(g.n(), 0);
  for (const Path& p : l) {
    if (p.empty()) return false;
    for (size_t i = 0; i < p.size(); ++i) {
      if (p[i] < 0 || p[i] >= g.n() || used[p[i]]) return false;
      used[p[i]] = 1;
      if (i > 0 && !g.adjacent(p[i - 1], p[i])) return false;
    }
  }
  return true;
}

Pattern normalize_pattern(Pattern p) {
  for (auto& [s, t] : p)
    if (s > t) std::swap(s, t);
  std::sort(p.begin(), p.end());
  return p;
}

Pattern pattern_of(const Graph& g, const Linkage& l) {
  require(validate_linkage(g, l), ErrorKind::InvalidLinkage, "paths are not disjoint host paths");
  Pattern p;
  for (const Path& path : l) p.emplace_back(path.front(), path.back());
  return normalize_pattern(p);
}

namespace {

void check_pattern(const Graph& g, const Pattern& p, const LinkageConfig& cfg) {
  for (auto [s, t] : p)
    require(s >= 0 && s < g.n() && t >= 0 && t < g.n(), ErrorKind::IndexOutOfRange, "pattern terminal");
  require(static_cast<int>(p.size()) <= cfg.pair_cap || g.n() <= cfg.vertex_cap, ErrorKind::SearchCapExceeded,
          "pattern with " + std::to_string(p.size()) + " pairs on " + std::to_string(g.n()) + " vertices");
}

// Two pairs sharing a vertex can never be realised by disjoint paths.
bool terminals_disjoint(const Pattern& p) {
  std::vector<int> seen;
  for (auto [s, t] : p) {
    seen.push_back(s);
    if (t != s) seen.push_back(t);
  }
  std::sort(seen.begin(), seen.end());
  return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
}

class PathSearch {
 public:
  PathSearch(const Graph& g, const Pattern& p, bool spanning, std::int64_t limit, std::int64_t budget)
      : g_(g), p_(p), spanning_(spanning), limit_(limit), budget_(budget), used_(g.n(), 0), terminal_(g.n(), 0) {
    for (auto [s, t] : p) terminal_[s] = terminal_[t] = 1;
  }

  std::int64_t run() {
    start_pair(0);
    return count_;
  }
  bool exhausted() const { return exhausted_; }
  const Linkage& first() const { return first_; }

 private:
  bool done() const { return count_ >= limit_ || exhausted_; }

  void start_pair(size_t i) {
    if (done()) return;
    if (i == p_.size()) {
      if (spanning_ && std::count(used_.begin(), used_.end(), 0) != 0) return;
      if (count_ == 0) first_ = current_;
      ++count_;
      return;
    }
    auto [s, t] = p_[i];
    used_[s] = 1;
    current_.push_back({s});
    if (s == t) {
      if (feasible(i + 1, -1)) start_pair(i + 1);
    } else {
      extend(i);
    }
    current_.pop_back();
    used_[s] = 0;
  }

  void extend(size_t i) {
    if (done()) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    int head = current_.back().back();
    int target = p_[i].second;
    if (!feasible(i, head)) return;
    for (int w : g_.neighbors(head)) {
      if (used_[w]) continue;
      if (w == target) {
        used_[w] = 1;
        current_.back().push_back(w);
        start_pair(i + 1);
        current_.back().pop_back();
        used_[w] = 0;
      } else if (!terminal_[w]) {
        used_[w] = 1;
        current_.back().push_back(w);
        extend(i);
        current_.back().pop_back();
        used_[w] = 0;
      }
      if (done()) return;
    }
  }

  // Every pair from i on can still be joined through unused non-terminals;
  // with spanning, every unused vertex is reachable from some open end.
  bool feasible(size_t i, int head) {
    for (size_t j = i; j < p_.size(); ++j) {
      int from = (j == i && head >= 0) ? head : p_[j].first;
      if (from == p_[j].second) continue;
      if (!reach(from, p_[j].second)) return false;
    }
    if (spanning_) {
      std::vector<int> sources;
      if (head >= 0) sources.push_back(head);
      for (size_t j = (head >= 0 ? i + 1 : i); j < p_.size(); ++j) sources.push_back(p_[j].first);
      std::vector<char> seen(g_.n(), 0);
      std::vector<int> stack;
      for (int s : sources) seen[s] = 1, stack.push_back(s);
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int w : g_.neighbors(u))
          if (!used_[w] && !seen[w]) seen[w] = 1, stack.push_back(w);
      }
      for (int v = 0; v < g_.n(); ++v)
        if (!used_[v] && !seen[v]) return false;
    }
    return true;
  }

  bool reach(int from, int to) {
    mark_.assign(g_.n(), 0);
    stack_.assign(1, from);
    mark_[from] = 1;
    while (!stack_.empty()) {
      int u = stack_.back();
      stack_.pop_back();
      for (int w : g_.neighbors(u)) {
        if (w == to) return true;
        if (mark_[w] || used_[w] || terminal_[w]) continue;
        mark_[w] = 1;
        stack_.push_back(w);
      }
    }
    return false;
  }

  const Graph& g_;
  const Pattern& p_;
  bool spanning_;
  std::int64_t limit_, budget_, nodes_ = 0, count_ = 0;
  bool exhausted_ = false;
  std::vector<char> used_, terminal_, mark_;
  std::vector<int> stack_;
  Linkage current_, first_;
};

// Vertex order keeping the processed/unprocessed boundary small: greedy from
// every start vertex, best maximum frontier wins.
std::vector<int> frontier_order(const Graph& g) {
  int n = g.n();
  std::vector<int> best;
  int best_cost = n + 1;
  for (int start = 0; start < n; ++start) {
    std::vector<int> order{start};
    std::vector<char> in(n, 0);
    std::vector<int> outside(n);  // neighbours not yet placed
    for (int v = 0; v < n; ++v) outside[v] = g.degree(v);
    auto place = [&](int v) {
      in[v] = 1;
      for (int w : g.neighbors(v)) --outside[w];
    };
    place(start);
    int frontier = outside[start] > 0 ? 1 : 0;
    int cost = 1;
    while (static_cast<int>(order.size()) < n) {
      int pick = -1, pick_front = n + 1, pick_links = -1;
      for (int v = 0; v < n; ++v) {
        if (in[v]) continue;
        int links = 0, closed = 0;
        for (int w : g.neighbors(v))
          if (in[w]) {
            ++links;
            if (outside[w] == 1) ++closed;
          }
        int front = frontier - closed + (g.degree(v) - links > 0 ? 1 : 0);
        if (front < pick_front || (front == pick_front && links > pick_links)) {
          pick = v;
          pick_front = front;
          pick_links = links;
        }
      }
      cost = std::max(cost, frontier + 1);
      place(pick);
      order.push_back(pick);
      frontier = pick_front;
      if (cost >= best_cost) break;
    }
    if (static_cast<int>(order.size()) == n && cost < best_cost) {
      best_cost = cost;
      best = order;
    }
  }
  return best;
}

constexpr std::uint8_t kFree = 0;
constexpr std::uint8_t kSaturated = 1;
constexpr std::uint8_t kTagBase = 2;     // open end of the fragment holding terminal (code - 2)
constexpr std::uint8_t kGroupBase = 128;  // open end of a terminal-free fragment

bool is_group(std::uint8_t c) { return c >= kGroupBase; }
bool is_tag(std::uint8_t c) { return c >= kTagBase && c < kGroupBase; }

void canonicalize(std::string& s) {
  std::uint8_t next = kGroupBase, remap[128];
  std::fill(std::begin(remap), std::end(remap), 0);
  for (char& ch : s) {
    auto c = static_cast<std::uint8_t>(ch);
    if (!is_group(c)) continue;
    std::uint8_t& r = remap[c - kGroupBase];
    if (!r) r = next++;
    ch = static_cast<char>(r);
  }
}

}  // namespace

std::int64_t count_linkages_dfs(const Graph& g, const Pattern& p, bool spanning_only, std::int64_t limit,
                                std::int64_t budget, bool* exhausted) {
  if (exhausted) *exhausted = false;
  if (limit <= 0) return 0;
  if (!terminals_disjoint(p)) return 0;
  PathSearch search(g, p, spanning_only, limit, budget);
  std::int64_t c = search.run();
  if (exhausted) *exhausted = search.exhausted();
  return c;
}

std::int64_t count_linkages_frontier(const Graph& g, const Pattern& p, bool spanning_only, std::int64_t limit) {
  if (limit <= 0) return 0;
  if (!terminals_disjoint(p)) return 0;
  require(2 * p.size() < kGroupBase - kTagBase, ErrorKind::SearchCapExceeded, "too many pairs for frontier DP");
  int n = g.n();
  std::vector<int> tag(n, -1);  // terminal id, or -2 for a single-vertex pair
  for (size_t i = 0; i < p.size(); ++i) {
    auto [s, t] = p[i];
    if (s == t) {
      tag[s] = -2;
    } else {
      tag[s] = static_cast<int>(2 * i);
      tag[t] = static_cast<int>(2 * i + 1);
    }
  }
  std::vector<int> order = frontier_order(g), pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  std::vector<int> last(n);  // position of the last neighbour (or self)
  for (int v = 0; v < n; ++v) {
    last[v] = pos[v];
    for (int w : g.neighbors(v)) last[v] = std::max(last[v], pos[w]);
  }
  auto add = [limit](std::int64_t a, std::int64_t b) { return std::min(limit, a + b); };

  std::vector<int> front;
  std::unordered_map<std::string, std::int64_t> states{{std::string(), 1}};
  for (int i = 0; i < n && !states.empty(); ++i) {
    int v = order[i];
    std::uint8_t init = tag[v] == -1 ? kFree : tag[v] == -2 ? kSaturated : static_cast<std::uint8_t>(kTagBase + tag[v]);
    front.push_back(v);
    {
      std::unordered_map<std::string, std::int64_t> next;
      for (auto& [s, c] : states) next[s + static_cast<char>(init)] = c;
      states.swap(next);
    }
    int vs = static_cast<int>(front.size()) - 1;
    std::vector<int> earlier;
    for (int w : g.neighbors(v))
      if (pos[w] < i) earlier.push_back(w);
    std::sort(earlier.begin(), earlier.end(), [&](int a, int b) { return pos[a] < pos[b]; });
    for (int w : earlier) {
      int ws = static_cast<int>(std::find(front.begin(), front.end(), w) - front.begin());
      std::unordered_map<std::string, std::int64_t> next;
      next.reserve(states.size() * 2);
      for (auto& [s, c] : states) {
        next[s] = add(next[s], c);  // edge left out
        auto a = static_cast<std::uint8_t>(s[ws]), b = static_cast<std::uint8_t>(s[vs]);
        if (a == kSaturated || b == kSaturated) continue;
        std::string t = s;
        auto set = [&](int slot, std::uint8_t code) { t[slot] = static_cast<char>(code); };
        auto other_end = [&](int slot, std::uint8_t code) {
          for (int j = 0; j < static_cast<int>(t.size()); ++j)
            if (j != slot && static_cast<std::uint8_t>(t[j]) == code) return j;
          return -1;
        };
        if (a == kFree && b == kFree) {
          set(ws, 255);
          set(vs, 255);
        } else if (a == kFree || b == kFree) {
          int fresh = a == kFree ? ws : vs, end = a == kFree ? vs : ws;
          set(fresh, static_cast<std::uint8_t>(t[end]));
          set(end, kSaturated);
        } else {
          if (a == b) continue;  // closing a cycle
          int oa = is_group(a) ? other_end(ws, a) : -1, ob = is_group(b) ? other_end(vs, b) : -1;
          set(ws, kSaturated);
          set(vs, kSaturated);
          if (is_tag(a) && is_tag(b)) {
            if (((a - kTagBase) ^ 1) != (b - kTagBase)) continue;
          } else if (is_tag(a)) {
            set(ob, a);
          } else if (is_tag(b)) {
            set(oa, b);
          } else {
            set(ob, a);
          }
        }
        canonicalize(t);
        next[t] = add(next[t], c);
      }
      states.swap(next);
    }
    // Retire vertices whose neighbourhood is fully processed.
    std::vector<int> keep_slots;
    std::vector<int> new_front;
    for (int j = 0; j < static_cast<int>(front.size()); ++j) {
      if (last[front[j]] <= i) continue;
      keep_slots.push_back(j);
      new_front.push_back(front[j]);
    }
    if (keep_slots.size() != front.size()) {
      std::unordered_map<std::string, std::int64_t> next;
      for (auto& [s, c] : states) {
        bool ok = true;
        for (int j = 0; j < static_cast<int>(front.size()) && ok; ++j) {
          if (last[front[j]] > i) continue;
          auto code = static_cast<std::uint8_t>(s[j]);
          ok = code == kSaturated || (code == kFree && !spanning_only);
        }
        if (!ok) continue;
        std::string t;
        for (int j : keep_slots) t.push_back(s[j]);
        canonicalize(t);
        next[t] = add(next[t], c);
      }
      states.swap(next);
      front.swap(new_front);
    }
  }
  auto it = states.find(std::string());
  return it == states.end() ? 0 : it->second;
}

LinkageCount count_linkages_detailed(const Graph& g, const Pattern& p, bool spanning_only, std::int64_t limit,
                                     const LinkageConfig& cfg) {
  check_pattern(g, p, cfg);
  if (limit <= 0 || !terminals_disjoint(p)) return {0, CountMethod::Trivial};
  bool exhausted = false;
  std::int64_t c = count_linkages_dfs(g, p, spanning_only, limit, cfg.dfs_budget, &exhausted);
  if (!exhausted) return {c, CountMethod::Dfs};
  return {count_linkages_frontier(g, p, spanning_only, limit), CountMethod::FrontierDp};
}

std::int64_t count_linkages(const Graph& g, const Pattern& p, bool spanning_only, std::int64_t limit,
                            const LinkageConfig& cfg) {
  return count_linkages_detailed(g, p, spanning_only, limit, cfg).count;
}

std::optional<Linkage> disjoint_paths(const Graph& g, const Pattern& p, const LinkageConfig& cfg) {
  check_pattern(g, p, cfg);
  if (!terminals_disjoint(p)) return std::nullopt;
  if (p.size() <= 2 && g.n() <= 64) {
    // Each pair becomes one isolated pattern vertex rooted at both terminals.
    RootedGraph host{g, {}}, pattern{build_graph(static_cast<int>(p.size()), {}), {}};
    for (size_t i = 0; i < p.size(); ++i) {
      host.roots.push_back(p[i].first);
      host.roots.push_back(p[i].second);
      pattern.roots.push_back(static_cast<int>(i));
      pattern.roots.push_back(static_cast<int>(i));
    }
    auto model = find_rooted_minor(host, pattern);
    if (!model) return std::nullopt;
    Linkage l;
    for (size_t i = 0; i < p.size(); ++i) {
      std::vector<char> allowed(g.n(), 0);
      for (int v : (*model)[i]) allowed[v] = 1;
      l.push_back(shortest_path(g, p[i].first, p[i].second, allowed));
    }
    return l;
  }
  PathSearch search(g, p, false, 1, INT64_MAX);
  if (search.run() == 0) return std::nullopt;
  return search.first();
}

bool is_vital(const Graph& g, const Linkage& l, const LinkageConfig& cfg) {
  Pattern p = pattern_of(g, l);
  int covered = 0;
  for (const Path& path : l) covered += static_cast<int>(path.size());
  if (covered != g.n()) return false;
  return count_linkages(g, p, false, 2, cfg) == 1;
}

Linkage restrict_linkage(const Graph& g, const std::vector<int>& keep, const Linkage& l) {
  require(validate_linkage(g, l), ErrorKind::InvalidLinkage, "linkage does not validate");
  std::vector<char> in(g.n(), 0);
  for (int v : keep) {
    require(v >= 0 && v < g.n(), ErrorKind::IndexOutOfRange, "subgraph vertex");
    in[v] = 1;
  }
  Linkage out;
  for (const Path& path : l) {
    Path run;
    for (int v : path) {
      if (in[v]) {
        run.push_back(v);
      } else if (!run.empty()) {
        out.push_back(std::move(run));
        run.clear();
      }
    }
    if (!run.empty()) out.push_back(std::move(run));
  }
  return out;
}

Linkage relabel_linkage(const Linkage& l, const std::vector<int>& old_to_new) {
  Linkage out = l;
  for (Path& p : out)
    for (int& v : p) {
      v = old_to_new[v];
      require(v >= 0, ErrorKind::InvalidLinkage, "path vertex outside the subgraph");
    }
  return out;
}

VitalDeletion vital_after_delete(const Graph& g, const Linkage& l, int v) {
  require(v >= 0 && v < g.n(), ErrorKind::IndexOutOfRange, "deleted vertex");
  require(validate_linkage(g, l), ErrorKind::InvalidLinkage, "linkage does not validate");
  VitalDeletion out;
  out.sub = delete_vertices(g, {v});
  std::vector<int> keep = out.sub.new_to_old;
  out.linkage = relabel_linkage(restrict_linkage(g, keep, l), out.sub.old_to_new);
  for (const Path& p : out.linkage) {
    out.terminals.push_back(p.front());
    if (p.back() != p.front()) out.terminals.push_back(p.back());
  }
  std::sort(out.terminals.begin(), out.terminals.end());
  return out;
}

Pattern read_pattern(std::istream& is) {
  Pattern p;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok[0] == '#') continue;
    int s, t;
    if (tok != "pair" || !(ls >> s >> t)) fail(ErrorKind::ParseError, "expected 'pair s t': " + line);
    p.emplace_back(s, t);
  }
  return p;
}

void write_pattern(std::ostream& os, const Pattern& p) {
  for (auto [s, t] : p) os << "pair " << s << ' ' << t << '\n';
}

}  // namespace gm
