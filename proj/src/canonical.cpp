#include "gm/canonical.hpp"

#include <algorithm>
#include <numeric>

namespace gm {

namespace {

// Replaces values by their dense rank in sorted order of `keys`.
template <class Key>
int rank_by(const std::vector<Key>& keys, std::vector<int>& out) {
  int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  out.assign(n, 0);
  int r = -1;
  for (int i = 0; i < n; ++i) {
    if (i == 0 || keys[order[i]] != keys[order[i - 1]]) ++r;
    out[order[i]] = r;
  }
  return r + 1;
}

class Labeller {
 public:
  Labeller(const Graph& g, const std::vector<int>& roots, const std::vector<int>& colors)
      : g_(g), n_(g.n()), roots_(roots), colors_(colors) {}

  CanonicalForm run() {
    std::vector<std::pair<std::vector<int>, int>> init(n_);
    for (int i = 0; i < static_cast<int>(roots_.size()); ++i) init[roots_[i]].first.push_back(i);
    for (int v = 0; v < n_; ++v) {
      // Roots sort after plain vertices; position lists are already ascending.
      init[v].first.insert(init[v].first.begin(), init[v].first.empty() ? 0 : 1);
      init[v].second = colors_.empty() ? 0 : colors_[v];
    }
    std::vector<int> color;
    rank_by(init, color);
    std::vector<int> path;
    search(color, path);
    return {best_code_, best_label_};
  }

 private:
  int refine(std::vector<int>& color) const {
    int cells = *std::max_element(color.begin(), color.end()) + 1;
    while (true) {
      std::vector<std::vector<int>> sig(n_);
      for (int v = 0; v < n_; ++v) {
        sig[v].push_back(color[v]);
        std::vector<int> nb;
        for (int w : g_.neighbors(v)) nb.push_back(color[w]);
        std::sort(nb.begin(), nb.end());
        sig[v].insert(sig[v].end(), nb.begin(), nb.end());
      }
      std::vector<int> next;
      int c = rank_by(sig, next);
      color.swap(next);
      if (c == cells) return c;
      cells = c;
    }
  }

  CanonicalCode encode(const std::vector<int>& label) const {
    std::vector<int> inv(n_);
    for (int v = 0; v < n_; ++v) inv[label[v]] = v;
    CanonicalCode code;
    code.push_back(static_cast<char>(n_ >> 8));
    code.push_back(static_cast<char>(n_ & 0xff));
    code.push_back(static_cast<char>(roots_.size() >> 8));
    code.push_back(static_cast<char>(roots_.size() & 0xff));
    for (int r : roots_) code.push_back(static_cast<char>(label[r]));
    code.push_back(static_cast<char>(colors_.empty() ? 0 : 1));
    if (!colors_.empty())
      for (int i = 0; i < n_; ++i) {
        code.push_back(static_cast<char>((colors_[inv[i]] >> 8) & 0xff));
        code.push_back(static_cast<char>(colors_[inv[i]] & 0xff));
      }
    unsigned char acc = 0;
    int bits = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        acc = static_cast<unsigned char>((acc << 1) | (g_.adjacent(inv[i], inv[j]) ? 1 : 0));
        if (++bits == 8) {
          code.push_back(static_cast<char>(acc));
          acc = 0;
          bits = 0;
        }
      }
    if (bits) code.push_back(static_cast<char>(acc << (8 - bits)));
    return code;
  }

  std::vector<int> orbit_of_stabilizer(const std::vector<int>& path) const {
    std::vector<int> parent(n_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (const auto& gen : generators_) {
      bool fixes = std::all_of(path.begin(), path.end(), [&](int v) { return gen[v] == v; });
      if (!fixes) continue;
      for (int v = 0; v < n_; ++v) parent[find(v)] = find(gen[v]);
    }
    for (int v = 0; v < n_; ++v) parent[v] = find(v);
    return parent;
  }

  void search(std::vector<int> color, std::vector<int>& path) {
    int cells = refine(color);
    if (cells == n_) {
      leaf(color);
      return;
    }
    std::vector<int> size(cells, 0);
    for (int c : color) ++size[c];
    int target = 0;
    while (size[target] == 1) ++target;
    std::vector<int> explored;
    for (int v = 0; v < n_; ++v) {
      if (color[v] != target) continue;
      if (!explored.empty()) {
        std::vector<int> orbit = orbit_of_stabilizer(path);
        bool same = std::any_of(explored.begin(), explored.end(), [&](int u) { return orbit[u] == orbit[v]; });
        if (same) continue;
      }
      explored.push_back(v);
      std::vector<std::pair<int, int>> key(n_);
      for (int u = 0; u < n_; ++u) key[u] = {color[u], u == v ? 0 : 1};
      std::vector<int> child;
      rank_by(key, child);
      path.push_back(v);
      search(child, path);
      path.pop_back();
    }
  }

  void leaf(const std::vector<int>& label) {
    CanonicalCode code = encode(label);
    if (best_label_.empty() || code < best_code_) {
      best_code_ = code;
      best_label_ = label;
      return;
    }
    if (code == best_code_) {
      std::vector<int> inv(n_);
      for (int v = 0; v < n_; ++v) inv[best_label_[v]] = v;
      std::vector<int> gen(n_);
      for (int v = 0; v < n_; ++v) gen[v] = inv[label[v]];
      generators_.push_back(std::move(gen));
    }
  }

  const Graph& g_;
  int n_;
  std::vector<int> roots_;
  std::vector<int> colors_;
  CanonicalCode best_code_;
  std::vector<int> best_label_;
  std::vector<std::vector<int>> generators_;
};

}  // namespace

CanonicalForm canonical_form(const Graph& g, const std::vector<int>& roots, const std::vector<int>& colors) {
  require(g.n() <= kCanonicalCap, ErrorKind::SearchCapExceeded,
          "canonical labelling limited to " + std::to_string(kCanonicalCap) + " vertices");
  for (int r : roots) require(r >= 0 && r < g.n(), ErrorKind::IndexOutOfRange, "root out of range");
  require(colors.empty() || static_cast<int>(colors.size()) == g.n(), ErrorKind::PreconditionViolated,
          "colour vector size");
  if (g.n() == 0) {
    require(roots.empty(), ErrorKind::IndexOutOfRange, "roots on empty graph");
    return {CanonicalCode("\0\0\0\0\0", 5), {}};
  }
  return Labeller(g, roots, colors).run();
}

CanonicalCode canonical_code(const RootedGraph& rg) { return canonical_form(rg.graph, rg.roots).code; }

CanonicalCode canonical_code(const Graph& g) { return canonical_form(g).code; }

RootedGraph decode_code(const CanonicalCode& code) {
  auto byte = [&](size_t i) {
    require(i < code.size(), ErrorKind::ParseError, "truncated canonical code");
    return static_cast<unsigned char>(code[i]);
  };
  int n = (byte(0) << 8) | byte(1);
  int k = (byte(2) << 8) | byte(3);
  size_t pos = 4;
  RootedGraph rg;
  for (int i = 0; i < k; ++i) rg.roots.push_back(byte(pos++));
  bool colored = byte(pos++) != 0;
  if (colored) pos += 2 * static_cast<size_t>(n);
  std::vector<Edge> edges;
  int bitpos = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++bitpos)
      if ((byte(pos + bitpos / 8) >> (7 - bitpos % 8)) & 1) edges.emplace_back(i, j);
  rg.graph = build_graph(n, edges);
  return rg;
}

bool isomorphic(const Graph& a, const Graph& b) {
  if (a.n() != b.n() || a.m() != b.m()) return false;
  return canonical_code(a) == canonical_code(b);
}

std::vector<int> automorphism_orbits(const Graph& g, const std::vector<int>& roots) {
  std::vector<CanonicalCode> codes(g.n());
  for (int v = 0; v < g.n(); ++v) {
    std::vector<int> r = roots;
    r.push_back(v);
    codes[v] = canonical_form(g, r).code;
  }
  std::vector<int> rep(g.n());
  for (int v = 0; v < g.n(); ++v) {
    rep[v] = v;
    for (int u = 0; u < v; ++u)
      if (codes[u] == codes[v]) {
        rep[v] = rep[u];
        break;
      }
  }
  return rep;
}

std::string code_to_hex(const CanonicalCode& code) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (unsigned char c : code) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

CanonicalCode code_from_hex(const std::string& hex) {
  require(hex.size() % 2 == 0, ErrorKind::ParseError, "odd hex length");
  auto val = [](char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    fail(ErrorKind::ParseError, "bad hex digit");
  };
  CanonicalCode out;
  for (size_t i = 0; i < hex.size(); i += 2) out.push_back(static_cast<char>(val(hex[i]) * 16 + val(hex[i + 1])));
  return out;
}

}  // namespace gm
