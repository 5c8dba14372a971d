#include "gm/minor.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "gm/canonical.hpp"

namespace gm {

namespace {

bool set_connected(const Graph& g, const std::vector<int>& set) {
  if (set.empty()) return false;
  std::vector<char> in(g.n(), 0), seen(g.n(), 0);
  for (int v : set) in[v] = 1;
  std::vector<int> stack{set[0]};
  seen[set[0]] = 1;
  size_t count = 0;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    ++count;
    for (int w : g.neighbors(u))
      if (in[w] && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return count == set.size();
}

// Branch-set growth search. Every open requirement of the partial model is a
// "deficiency" whose resolution must add some free vertex to some branch set;
// the deficiency with the fewest options is branched on, and option i excludes
// options 1..i-1 so the subtrees are disjoint.
class Engine {
 public:
  Engine(const Graph& host, const Graph& pattern, Mask red, bool use_red)
      : g_(host), h_(pattern.n()), red_(red), use_red_(use_red), padj_(pattern.n(), 0), comp_(pattern.n()) {
    for (auto [x, y] : pattern.edges()) {
      padj_[x] |= bit(y);
      padj_[y] |= bit(x);
    }
    pedges_ = pattern.edges();
    auto comps = connected_components(pattern);
    for (size_t c = 0; c < comps.size(); ++c)
      for (int x : comps[c]) comp_[x] = static_cast<int>(c);
    alive_ = host.all();
    b_.assign(h_, 0);
    x_.assign(h_, 0);
  }

  void set_alive(Mask alive) { alive_ = alive; }
  void reset() {
    std::fill(b_.begin(), b_.end(), 0);
    std::fill(x_.begin(), x_.end(), 0);
    memo_.clear();
  }
  void seed(int x, int v) { b_[x] |= bit(v); }
  bool solve() { return search(); }

  MinorModel model() const {
    MinorModel m(h_);
    for (int x = 0; x < h_; ++x) for_each_bit(b_[x], [&](int v) { m[x].push_back(v); });
    return m;
  }

 private:
  struct Option {
    int x;
    int v;
  };

  Mask nbhd(Mask set) const {
    Mask out = 0;
    for_each_bit(set, [&](int v) { out |= g_.mask(v); });
    return out & ~set;
  }

  bool realized(int x, int y) const { return (nbhd(b_[x]) & b_[y]) != 0; }

  std::string key() const {
    std::string k(reinterpret_cast<const char*>(b_.data()), b_.size() * sizeof(Mask));
    k.append(reinterpret_cast<const char*>(x_.data()), x_.size() * sizeof(Mask));
    return k;
  }

  bool feasible(Mask free) const {
    int empty = 0, unmet = 0;
    for (int x = 0; x < h_; ++x) {
      if (!b_[x]) ++empty;
      else if (use_red_ && !(b_[x] & red_)) ++unmet;
    }
    if (empty > popcount(free)) return false;
    if (use_red_ && empty + unmet > popcount(free & red_)) return false;
    for (int x = 0; x < h_; ++x) {
      if (!b_[x]) continue;
      Mask room = b_[x] | (free & ~x_[x]);
      Mask reach = mask_component(g_, room, lowest(b_[x]));
      if ((reach & b_[x]) != b_[x]) return false;
      if (use_red_ && !(reach & red_)) return false;
    }
    for (auto [x, y] : pedges_) {
      if (!b_[x] || !b_[y] || realized(x, y)) continue;
      Mask room = b_[x] | b_[y] | free;
      if (!(mask_component(g_, room, lowest(b_[x])) & b_[y])) return false;
    }
    return true;
  }

  // Options for the most constrained deficiency; `done` when none remain.
  std::vector<Option> pick(Mask free, bool& done) const {
    std::vector<Option> best;
    bool have = false;
    auto offer = [&](std::vector<Option>&& opts) {
      if (!have || opts.size() < best.size()) {
        best = std::move(opts);
        have = true;
      }
    };
    auto add_all = [&](std::vector<Option>& opts, int x, Mask cand) {
      for_each_bit(cand, [&](int v) { opts.push_back({x, v}); });
    };
    for (int x = 0; x < h_ && !(have && best.empty()); ++x) {
      if (!b_[x]) continue;
      Mask comp = mask_component(g_, b_[x], lowest(b_[x]));
      if (comp != b_[x]) {
        std::vector<Option> opts;
        add_all(opts, x, nbhd(comp) & free & ~x_[x]);
        offer(std::move(opts));
      } else if (use_red_ && !(b_[x] & red_)) {
        std::vector<Option> opts;
        Mask cand = nbhd(b_[x]) & free & ~x_[x];
        add_all(opts, x, cand & red_);
        add_all(opts, x, cand & ~red_);
        offer(std::move(opts));
      }
    }
    for (auto [x, y] : pedges_) {
      if (have && best.empty()) break;
      if (!b_[x] && !b_[y]) continue;
      if (b_[x] && b_[y]) {
        if (realized(x, y)) continue;
        std::vector<Option> opts;
        Mask cx = nbhd(b_[x]) & free & ~x_[x];
        Mask cy = nbhd(b_[y]) & free & ~x_[y];
        Mask touch_y = nbhd(b_[y]), touch_x = nbhd(b_[x]);
        add_all(opts, x, cx & touch_y);
        add_all(opts, y, cy & touch_x);
        add_all(opts, x, cx & ~touch_y);
        add_all(opts, y, cy & ~touch_x);
        offer(std::move(opts));
      } else {
        int full = b_[x] ? x : y, empty = b_[x] ? y : x;
        Mask around = nbhd(b_[full]) & free;
        std::vector<Option> opts;
        Mask seedable = around & ~x_[empty];
        if (use_red_) {
          add_all(opts, empty, seedable & red_);
          add_all(opts, empty, seedable & ~red_);
        } else {
          add_all(opts, empty, seedable);
        }
        add_all(opts, full, around & ~x_[full]);
        offer(std::move(opts));
      }
    }
    if (!have) {
      // Seed the first pattern component that has no branch set yet.
      std::vector<char> started(h_, 0);
      for (int x = 0; x < h_; ++x)
        if (b_[x]) started[comp_[x]] = 1;
      for (int x = 0; x < h_; ++x)
        if (!started[comp_[x]]) {
          std::vector<Option> opts;
          Mask cand = free & ~x_[x];
          if (use_red_) cand &= red_;
          add_all(opts, x, cand);
          offer(std::move(opts));
          break;
        }
    }
    done = !have;
    return best;
  }

  bool search() {
    Mask used = 0;
    for (Mask m : b_) used |= m;
    Mask free = alive_ & ~used;
    if (!feasible(free)) return false;
    bool done = false;
    std::vector<Option> opts = pick(free, done);
    if (done) return true;
    if (opts.empty()) return false;
    std::string k = key();
    if (memo_.count(k)) return false;
    std::vector<Mask> saved = x_;
    for (size_t i = 0; i < opts.size(); ++i) {
      const Option& o = opts[i];
      if (x_[o.x] & bit(o.v)) continue;
      b_[o.x] |= bit(o.v);
      if (search()) return true;
      b_[o.x] &= ~bit(o.v);
      x_[o.x] |= bit(o.v);
    }
    x_ = saved;
    if (memo_.size() < kMemoLimit) memo_.insert(std::move(k));
    return false;
  }

  static constexpr size_t kMemoLimit = 4'000'000;

  const Graph& g_;
  int h_;
  Mask red_;
  bool use_red_;
  std::vector<Mask> padj_;
  std::vector<int> comp_;
  std::vector<Edge> pedges_;
  Mask alive_;
  std::vector<Mask> b_, x_;
  std::unordered_set<std::string> memo_;
};

void check_caps(const Graph& host, const Graph& pattern, const MinorConfig& cfg) {
  require(pattern.n() <= cfg.pattern_cap, ErrorKind::SearchCapExceeded,
          "pattern has " + std::to_string(pattern.n()) + " vertices, cap " + std::to_string(cfg.pattern_cap));
  require(host.n() <= std::min(cfg.host_cap, 64), ErrorKind::SearchCapExceeded,
          "host has " + std::to_string(host.n()) + " vertices");
}

// Symmetry-reduced driver for root-free patterns: the model either uses host
// vertex s (then, up to automorphism, in the branch set of an orbit
// representative) or s can be deleted for the rest of the search.
std::optional<MinorModel> search_unrooted(const Graph& host, const Graph& pattern, Mask red, bool use_red) {
  int h = pattern.n();
  if (h == 0) return MinorModel{};
  Mask pool = use_red ? red : host.all();
  if (popcount(pool) < h || pattern.m() > host.m()) return std::nullopt;
  std::vector<int> orbit = automorphism_orbits(pattern);
  std::vector<int> reps;
  for (int x = 0; x < h; ++x)
    if (orbit[x] == x) reps.push_back(x);
  Engine engine(host, pattern, red, use_red);
  Mask alive = host.all();
  for (int s = 0; s < host.n(); ++s) {
    if (!(pool & bit(s))) continue;
    if (popcount(alive & pool) < h) break;
    engine.set_alive(alive);
    for (int x : reps) {
      engine.reset();
      engine.seed(x, s);
      if (engine.solve()) return engine.model();
    }
    alive &= ~bit(s);
  }
  return std::nullopt;
}

}  // namespace

bool verify_minor_model(const Graph& host, const Graph& pattern, const MinorModel& model) {
  if (static_cast<int>(model.size()) != pattern.n()) return false;
  std::vector<int> owner(host.n(), -1);
  for (int x = 0; x < pattern.n(); ++x) {
    for (int v : model[x]) {
      if (v < 0 || v >= host.n() || owner[v] != -1) return false;
      owner[v] = x;
    }
    if (!set_connected(host, model[x])) return false;
  }
  for (auto [x, y] : pattern.edges()) {
    bool found = false;
    for (int v : model[x]) {
      for (int w : host.neighbors(v))
        if (owner[w] == y) {
          found = true;
          break;
        }
      if (found) break;
    }
    if (!found) return false;
  }
  return true;
}

bool verify_rooted_model(const RootedGraph& host, const RootedGraph& pattern, const MinorModel& model) {
  if (host.roots.size() != pattern.roots.size()) return false;
  if (!verify_minor_model(host.graph, pattern.graph, model)) return false;
  for (size_t i = 0; i < host.roots.size(); ++i) {
    const auto& set = model[pattern.roots[i]];
    if (std::find(set.begin(), set.end(), host.roots[i]) == set.end()) return false;
  }
  return true;
}

bool verify_red_model(const AnnotatedGraph& host, const Graph& pattern, const MinorModel& model) {
  if (!verify_minor_model(host.graph, pattern, model)) return false;
  std::vector<char> red(host.graph.n(), 0);
  for (int v : host.annotated) red[v] = 1;
  for (const auto& set : model)
    if (std::none_of(set.begin(), set.end(), [&](int v) { return red[v]; })) return false;
  return true;
}

std::optional<MinorModel> find_minor(const Graph& host, const Graph& pattern, const MinorConfig& cfg) {
  check_caps(host, pattern, cfg);
  return search_unrooted(host, pattern, 0, false);
}

std::optional<MinorModel> find_red_minor(const AnnotatedGraph& host, const Graph& pattern, const MinorConfig& cfg) {
  check_caps(host.graph, pattern, cfg);
  Mask red = 0;
  for (int v : host.annotated) {
    require(v >= 0 && v < host.graph.n(), ErrorKind::IndexOutOfRange, "annotated vertex");
    red |= bit(v);
  }
  return search_unrooted(host.graph, pattern, red, true);
}

std::optional<MinorModel> find_rooted_minor(const RootedGraph& host, const RootedGraph& pattern,
                                            const MinorConfig& cfg) {
  require(host.roots.size() == pattern.roots.size(), ErrorKind::RootCountMismatch,
          "host has " + std::to_string(host.roots.size()) + " roots, pattern " +
              std::to_string(pattern.roots.size()));
  check_caps(host.graph, pattern.graph, cfg);
  const int k = static_cast<int>(host.roots.size());
  for (int i = 0; i < k; ++i) {
    require(host.roots[i] >= 0 && host.roots[i] < host.graph.n(), ErrorKind::IndexOutOfRange, "host root");
    require(pattern.roots[i] >= 0 && pattern.roots[i] < pattern.graph.n(), ErrorKind::IndexOutOfRange,
            "pattern root");
  }
  // One host vertex cannot lie in two branch sets.
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (host.roots[i] == host.roots[j] && pattern.roots[i] != pattern.roots[j]) return std::nullopt;
  if (pattern.graph.n() > host.graph.n() || pattern.graph.m() > host.graph.m()) return std::nullopt;
  Engine engine(host.graph, pattern.graph, 0, false);
  engine.reset();
  for (int i = 0; i < k; ++i) engine.seed(pattern.roots[i], host.roots[i]);
  if (engine.solve()) return engine.model();
  return std::nullopt;
}

Graph grid_pattern(int rows, int cols) {
  std::vector<Edge> e;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      if (j + 1 < cols) e.emplace_back(i * cols + j, i * cols + j + 1);
      if (i + 1 < rows) e.emplace_back(i * cols + j, (i + 1) * cols + j);
    }
  return build_graph(rows * cols, e);
}

int bidim(const AnnotatedGraph& host, int cap, const MinorConfig& cfg) {
  std::vector<int> red = host.annotated;
  std::sort(red.begin(), red.end());
  red.erase(std::unique(red.begin(), red.end()), red.end());
  int limit = std::min<int>(cap, static_cast<int>(std::sqrt(static_cast<double>(red.size())) + 1e-9));
  limit = std::min<int>(limit, static_cast<int>(std::sqrt(static_cast<double>(host.graph.n())) + 1e-9));
  int best = 0;
  for (int k = 1; k <= limit; ++k) {
    if (!find_red_minor(host, grid_pattern(k, k), cfg)) break;
    best = k;
  }
  return best;
}

}  // namespace gm
