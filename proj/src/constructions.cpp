#include "gm/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "gm/minor.hpp"

namespace gm {

namespace {

std::string cell_label(int r, int c) { return "g" + std::to_string(r + 1) + "," + std::to_string(c + 1); }

bool is_cycle_in(const Graph& g, const std::vector<int>& cyc) {
  if (cyc.size() < 3) return false;
  std::set<int> seen(cyc.begin(), cyc.end());
  if (seen.size() != cyc.size()) return false;
  for (size_t i = 0; i < cyc.size(); ++i)
    if (!g.adjacent(cyc[i], cyc[(i + 1) % cyc.size()])) return false;
  return true;
}

bool is_path_in(const Graph& g, const std::vector<int>& p) {
  if (p.empty()) return false;
  std::set<int> seen(p.begin(), p.end());
  if (seen.size() != p.size()) return false;
  for (size_t i = 0; i + 1 < p.size(); ++i)
    if (!g.adjacent(p[i], p[i + 1])) return false;
  return true;
}

bool pairwise_disjoint(const std::vector<std::vector<int>>& sets) {
  std::set<int> seen;
  for (const auto& s : sets)
    for (int v : s)
      if (!seen.insert(v).second) return false;
  return true;
}

// Edges of the listed cycles and paths, normalised.
std::set<Edge> edges_of(const std::vector<std::vector<int>>& cycles, const std::vector<std::vector<int>>& paths) {
  std::set<Edge> out;
  auto add = [&](int a, int b) { out.insert({std::min(a, b), std::max(a, b)}); };
  for (const auto& c : cycles)
    for (size_t i = 0; i < c.size(); ++i) add(c[i], c[(i + 1) % c.size()]);
  for (const auto& p : paths)
    for (size_t i = 0; i + 1 < p.size(); ++i) add(p[i], p[i + 1]);
  return out;
}

// Checks the circle/rail incidence conditions shared by meshes and annuli:
// each rail meets each circle in a non-empty subpath, visits the circles in
// order, and ends on the first and last circle.
bool rails_cross_circles(const std::vector<std::vector<int>>& circles, const std::vector<std::vector<int>>& rails) {
  std::map<int, int> circle_of;
  for (size_t j = 0; j < circles.size(); ++j)
    for (int v : circles[j]) circle_of[v] = static_cast<int>(j);
  for (const auto& rail : rails) {
    int expect = 0;
    for (size_t i = 0; i < rail.size(); ++i) {
      auto it = circle_of.find(rail[i]);
      if (it == circle_of.end()) return false;  // rails run only along circles and circle-to-circle edges
      int j = it->second;
      if (j == expect) continue;
      if (j != expect + 1) return false;
      expect = j;
    }
    if (expect + 1 != static_cast<int>(circles.size())) return false;
    if (circle_of[rail.front()] != 0) return false;
  }
  return true;
}

// Rails meet every circle in the same cyclic order (or its reverse).
bool rails_in_cyclic_order(const std::vector<std::vector<int>>& circles, const std::vector<std::vector<int>>& rails) {
  std::map<int, int> rail_of;
  for (size_t r = 0; r < rails.size(); ++r)
    for (int v : rails[r]) rail_of[v] = static_cast<int>(r);
  for (const auto& c : circles) {
    std::vector<int> seq;
    for (int v : c) {
      auto it = rail_of.find(v);
      if (it != rail_of.end() && (seq.empty() || seq.back() != it->second)) seq.push_back(it->second);
    }
    if (seq.size() > 1 && seq.front() == seq.back()) seq.pop_back();
    int n = static_cast<int>(rails.size());
    if (static_cast<int>(seq.size()) != n) return false;
    auto start = std::find(seq.begin(), seq.end(), 0);
    std::rotate(seq.begin(), start, seq.end());
    bool forward = true, backward = true;
    for (int i = 0; i < n; ++i) {
      forward = forward && seq[i] == i;
      backward = backward && seq[i] == (n - i) % n;
    }
    if (!forward && !backward) return false;
  }
  return true;
}

// Outer face of the wall's 2-core in its grid drawing: faces are traced
// from angular rotations and the one enclosing the largest area wins.
std::vector<int> wall_perimeter(const Graph& g, int cols) {
  int n = g.n();
  std::vector<int> deg(n);
  std::vector<char> gone(n, 0);
  for (int v = 0; v < n; ++v) deg[v] = g.degree(v);
  for (bool changed = true; changed;) {
    changed = false;
    for (int v = 0; v < n; ++v)
      if (!gone[v] && deg[v] <= 1) {
        gone[v] = 1;
        changed = true;
        for (int w : g.neighbors(v)) --deg[w];
      }
  }
  auto x = [cols](int v) { return static_cast<double>(v % cols); };
  auto y = [cols](int v) { return -static_cast<double>(v / cols); };
  std::vector<std::vector<int>> rot(n);
  for (int v = 0; v < n; ++v) {
    if (gone[v]) continue;
    for (int w : g.neighbors(v))
      if (!gone[w]) rot[v].push_back(w);
    std::sort(rot[v].begin(), rot[v].end(), [&](int a, int b) {
      return std::atan2(y(a) - y(v), x(a) - x(v)) < std::atan2(y(b) - y(v), x(b) - x(v));
    });
  }
  std::set<std::pair<int, int>> used;
  std::vector<int> best;
  double best_area = -1;
  for (int v = 0; v < n; ++v)
    for (int w : rot[v]) {
      if (used.count({v, w})) continue;
      std::vector<int> face;
      int a = v, b = w;
      while (!used.count({a, b})) {
        used.insert({a, b});
        face.push_back(a);
        // Next dart: the neighbour of b just before a in counter-clockwise order.
        const auto& r = rot[b];
        int idx = static_cast<int>(std::find(r.begin(), r.end(), a) - r.begin());
        int c = r[(idx + static_cast<int>(r.size()) - 1) % r.size()];
        a = b;
        b = c;
      }
      double area = 0;
      for (size_t i = 0; i < face.size(); ++i) {
        int p = face[i], q = face[(i + 1) % face.size()];
        area += x(p) * y(q) - x(q) * y(p);
      }
      if (std::abs(area) > best_area) {
        best_area = std::abs(area);
        best = face;
      }
    }
  return best;
}

}  // namespace

Graph grid(int n, int m) {
  require(n >= 1 && m >= 1, ErrorKind::ParameterTooSmall, "grid needs n, m >= 1");
  std::vector<Edge> e;
  std::vector<std::string> labels;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) {
      labels.push_back(cell_label(r, c));
      if (c + 1 < m) e.emplace_back(r * m + c, r * m + c + 1);
      if (r + 1 < n) e.emplace_back(r * m + c, (r + 1) * m + c);
    }
  return build_graph(n * m, e, labels);
}

WallSpec wall(int n) {
  require(n >= 1, ErrorKind::ParameterTooSmall, "wall needs n >= 1");
  int cols = 2 * n;
  std::vector<Edge> e;
  std::vector<std::string> labels;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < cols; ++c) {
      labels.push_back(cell_label(r, c));
      if (c + 1 < cols) e.emplace_back(r * cols + c, r * cols + c + 1);
      // Vertical edges survive where row and column parities agree.
      if (r + 1 < n && (r + c) % 2 == 0) e.emplace_back(r * cols + c, (r + 1) * cols + c);
    }
  WallSpec w;
  w.order = n;
  w.graph = build_graph(n * cols, e, labels);
  for (int r = 0; r < n; ++r) {
    std::vector<int> row;
    for (int c = 0; c < cols; ++c) row.push_back(r * cols + c);
    w.rows.push_back(row);
  }
  if (n >= 2) w.perimeter = wall_perimeter(w.graph, cols);
  return w;
}

bool validate_wall(const WallSpec& w) {
  const Graph& g = w.graph;
  for (int v = 0; v < g.n(); ++v)
    if (g.degree(v) > 3) return false;
  if (static_cast<int>(w.rows.size()) != w.order) return false;
  for (const auto& r : w.rows)
    if (!is_path_in(g, r) || static_cast<int>(r.size()) != 2 * w.order) return false;
  if (w.order >= 2 && !is_cycle_in(g, w.perimeter)) return false;
  return is_connected(g);
}

CylindricalMesh cylindrical_mesh(int n, int m, bool hub) {
  require(n >= 1 && m >= 1, ErrorKind::ParameterTooSmall, "cylindrical mesh needs n, m >= 1");
  int len = std::max(n, 3);
  CylindricalMesh mesh;
  std::vector<Edge> e;
  std::vector<std::string> labels;
  for (int i = 0; i < m; ++i) {
    std::vector<int> cyc;
    for (int p = 0; p < len; ++p) {
      int v = i * len + p;
      cyc.push_back(v);
      labels.push_back("c" + std::to_string(i + 1) + "," + std::to_string(p + 1));
      e.emplace_back(v, i * len + (p + 1) % len);
      if (i + 1 < m && p < n) e.emplace_back(v, v + len);
    }
    mesh.cycles.push_back(cyc);
  }
  for (int r = 0; r < n; ++r) {
    std::vector<int> rail;
    for (int i = 0; i < m; ++i) rail.push_back(i * len + r);
    mesh.rails.push_back(rail);
  }
  int total = m * len;
  if (hub) {
    mesh.hub = total++;
    labels.push_back("hub");
    for (int p = 0; p < len; ++p) e.emplace_back(mesh.hub, p);
  }
  mesh.graph = build_graph(total, e, labels);
  return mesh;
}

bool validate_mesh(const CylindricalMesh& mesh) {
  const Graph& g = mesh.graph;
  for (const auto& c : mesh.cycles)
    if (!is_cycle_in(g, c)) return false;
  for (const auto& r : mesh.rails)
    if (!is_path_in(g, r)) return false;
  if (!pairwise_disjoint(mesh.cycles) || !pairwise_disjoint(mesh.rails)) return false;
  std::set<Edge> covered = edges_of(mesh.cycles, mesh.rails);
  for (auto [a, b] : g.edges())
    if (a != mesh.hub && b != mesh.hub && !covered.count({a, b})) return false;
  for (const auto& r : mesh.rails)
    if (r.size() != mesh.cycles.size()) return false;  // one vertex per cycle
  return rails_cross_circles(mesh.cycles, mesh.rails) && rails_in_cyclic_order(mesh.cycles, mesh.rails);
}

RailedAnnulus railed_annulus(int w, int r) {
  require(w >= 1 && r >= 1, ErrorKind::ParameterTooSmall, "railed annulus needs w, r >= 1");
  RailedAnnulus a;
  std::vector<Edge> e;
  std::vector<std::string> labels;
  int next = 0;
  // Rail i owns positions [i] on boundary circles and [2i, 2i+1] on inner ones.
  std::vector<std::vector<int>> rails(r);
  for (int j = 0; j < w; ++j) {
    bool boundary = j == 0 || j == w - 1;
    int per = boundary ? 1 : 2;
    int len = std::max(3, r * per);
    std::vector<int> circ;
    for (int p = 0; p < len; ++p) {
      circ.push_back(next + p);
      labels.push_back("a" + std::to_string(j + 1) + "," + std::to_string(p + 1));
      e.emplace_back(next + p, next + (p + 1) % len);
    }
    for (int i = 0; i < r; ++i) {
      std::vector<int> here;
      for (int q = 0; q < per; ++q) here.push_back(circ[i * per + q]);
      if (!rails[i].empty()) e.emplace_back(rails[i].back(), here.front());
      // A one-circle annulus: the rail is a single vertex, nothing to append twice.
      for (int v : here)
        if (rails[i].empty() || rails[i].back() != v) rails[i].push_back(v);
    }
    a.circles.push_back(circ);
    next += len;
  }
  a.rails = rails;
  a.graph = build_graph(next, e, labels);
  return a;
}

bool validate_railed_annulus(const RailedAnnulus& a) {
  const Graph& g = a.graph;
  for (const auto& c : a.circles)
    if (!is_cycle_in(g, c)) return false;
  for (const auto& r : a.rails)
    if (!is_path_in(g, r)) return false;
  if (!pairwise_disjoint(a.circles) || !pairwise_disjoint(a.rails)) return false;
  std::set<Edge> covered = edges_of(a.circles, a.rails);
  if (covered.size() != g.edges().size()) return false;
  // Rails touch the boundary circles only at their ends.
  if (a.circles.size() >= 2)
    for (const auto& r : a.rails) {
      std::set<int> first(a.circles.front().begin(), a.circles.front().end());
      std::set<int> last(a.circles.back().begin(), a.circles.back().end());
      for (size_t i = 1; i + 1 < r.size(); ++i)
        if (first.count(r[i]) || last.count(r[i])) return false;
    }
  return rails_cross_circles(a.circles, a.rails) && rails_in_cyclic_order(a.circles, a.rails);
}

GammaInstance gamma_hat(int k, bool self_check) {
  require(k >= 2, ErrorKind::ParameterTooSmall, "gamma_hat needs k >= 2");
  require(k <= 5, ErrorKind::ParameterTooSmall, "gamma_hat supports k <= 5");
  GammaInstance gi;
  gi.k = k;
  int m = (1 << k) - 1;
  gi.m = m;
  std::vector<std::string> labels;
  std::vector<Edge> e;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      labels.push_back(c == 0 ? "v" + std::to_string(r + 1) : c == m - 1 ? "u" + std::to_string(r + 1) : cell_label(r, c));
      if (c + 1 < m) e.emplace_back(r * m + c, r * m + c + 1);
      if (r + 1 < m) e.emplace_back(r * m + c, (r + 1) * m + c);
    }
  for (int i = 1; i <= m; ++i) {
    gi.left.push_back((i - 1) * m);
    gi.right.push_back((i - 1) * m + m - 1);
  }
  auto v = [&](int i) { return gi.left[i - 1]; };
  auto u = [&](int i) { return gi.right[i - 1]; };
  // Chord partner by row, per side (1-based rows, 0 = none).
  std::vector<int> right_partner(m + 1, 0), left_partner(m + 1, 0);
  for (int i = 1; i <= (1 << (k - 1)) - 1; ++i) {
    int j = m - i + 1;
    e.emplace_back(u(i), u(j));
    right_partner[i] = j;
    right_partner[j] = i;
  }
  for (int i = 2; i <= k; ++i)
    for (int j = 1; j <= (1 << i) - 1; ++j) {
      int a = (1 << i) + j, b = (1 << (i + 1)) - j;
      if (a > m || b > m || a == b) continue;  // clipped to the grid
      e.emplace_back(v(a), v(b));
      left_partner[a] = b;
      left_partner[b] = a;
    }
  gi.graph = build_graph(m * m, e, labels);

  std::vector<int> s_row(k + 1), t_row(k + 1);
  for (int i = 1; i <= k; ++i) {
    s_row[i] = 1 << (i - 1);
    t_row[i] = i < k ? 3 * (1 << (i - 1)) : 1 << (k - 1);
    int s = v(s_row[i]), t = i < k ? v(t_row[i]) : u(t_row[i]);
    gi.pattern.emplace_back(s, t);
    gi.terminals.push_back(s);
    gi.terminals.push_back(t);
  }
  std::sort(gi.terminals.begin(), gi.terminals.end());

  // Witness: each path sweeps whole rows, hopping between rows along chords.
  for (int i = 1; i <= k; ++i) {
    Path path;
    int row = s_row[i];
    bool at_left = true;
    std::set<int> rows_seen;
    while (true) {
      if (!rows_seen.insert(row).second)
        fail(ErrorKind::VitalityValidationFailed, "witness revisits row " + std::to_string(row));
      for (int c = 0; c < m; ++c) path.push_back((row - 1) * m + (at_left ? c : m - 1 - c));
      at_left = !at_left;
      int here = path.back();
      if (here == gi.pattern[i - 1].second) break;
      int next = at_left ? left_partner[row] : right_partner[row];
      if (next == 0) fail(ErrorKind::VitalityValidationFailed, "witness for pair " + std::to_string(i) + " is stuck");
      row = next;
    }
    gi.witness.push_back(path);
  }
  size_t covered = 0;
  for (const Path& p : gi.witness) covered += p.size();
  if (!validate_linkage(gi.graph, gi.witness) || static_cast<int>(covered) != gi.graph.n())
    fail(ErrorKind::VitalityValidationFailed, "witness linkage does not span the grid");
  if (self_check && k <= 3 && !is_vital(gi.graph, gi.witness))
    fail(ErrorKind::VitalityValidationFailed, "witness linkage of gamma_hat(" + std::to_string(k) + ") is not vital");
  return gi;
}

AnnotatedGraph z_graph(int s) {
  require(s >= 1, ErrorKind::ParameterTooSmall, "z_graph needs s >= 1");
  int cols = s * (2 * s + 1);
  std::vector<Edge> e;
  std::vector<std::string> labels;
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < cols; ++c) {
      labels.push_back(r == 0 ? "x" + std::to_string(c + 1) : cell_label(r, c));
      if (c + 1 < cols) e.emplace_back(r * cols + c, r * cols + c + 1);
      if (r + 1 < s) e.emplace_back(r * cols + c, (r + 1) * cols + c);
    }
  auto x = [](int i) { return i - 1; };  // top row, 1-based
  AnnotatedGraph z;
  for (int i = 1; i <= s; ++i) {
    for (int j = 1; j <= s; ++j) {
      int a = (2 * s + 1) * (i - 1) + j, b = (2 * s + 1) * i - j + 1;
      e.emplace_back(x(a), x(b));
    }
    z.annotated.push_back(x((2 * s + 1) * (i - 1) + s + 1));
  }
  z.graph = build_graph(s * cols, e, labels);
  return z;
}

namespace {

constexpr int kMaxGadgetVertices = 10;

// Every d-regular graph on n vertices up to isomorphism. Vertices are
// completed one at a time; partial graphs are deduplicated by a canonical
// code coloured with residual degrees, which determine the completions.
std::vector<Graph> all_regular_graphs(int n, int d) {
  struct State {
    std::vector<std::uint32_t> adj;
    std::vector<int> residual;
  };
  auto to_graph = [n](const State& s) {
    std::vector<Edge> e;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (s.adj[a] >> b & 1) e.emplace_back(a, b);
    return build_graph(n, e);
  };
  auto viable = [n](const State& s) {
    for (int v = 0; v < n; ++v) {
      if (s.residual[v] == 0) continue;
      int partners = 0;
      for (int w = 0; w < n; ++w)
        if (w != v && s.residual[w] > 0 && !(s.adj[v] >> w & 1)) ++partners;
      if (partners < s.residual[v]) return false;
    }
    return true;
  };
  std::vector<State> level{State{std::vector<std::uint32_t>(n, 0), std::vector<int>(n, d)}};
  std::vector<Graph> done;
  std::set<CanonicalCode> done_codes;
  while (!level.empty()) {
    std::map<CanonicalCode, State> next;
    for (const State& s : level) {
      int v = -1;
      for (int x = 0; x < n && v < 0; ++x)
        if (s.residual[x] > 0) v = x;
      if (v < 0) {
        Graph g = to_graph(s);
        if (done_codes.insert(canonical_code(g)).second) done.push_back(g);
        continue;
      }
      std::vector<int> cand;
      for (int w = 0; w < n; ++w)
        if (w != v && s.residual[w] > 0 && !(s.adj[v] >> w & 1)) cand.push_back(w);
      int need = s.residual[v];
      if (static_cast<int>(cand.size()) < need) continue;
      std::vector<char> pick(cand.size(), 0);
      std::fill(pick.begin(), pick.begin() + need, 1);
      do {
        State t = s;
        for (size_t i = 0; i < cand.size(); ++i)
          if (pick[i]) {
            int w = cand[i];
            t.adj[v] |= 1u << w;
            t.adj[w] |= 1u << v;
            --t.residual[w];
          }
        t.residual[v] = 0;
        if (!viable(t)) continue;
        CanonicalCode code = canonical_form(to_graph(t), {}, t.residual).code;
        next.emplace(code, t);
      } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    level.clear();
    for (auto& [code, s] : next) level.push_back(s);
  }
  return done;
}

Graph complement(const Graph& g) {
  std::vector<Edge> e;
  for (int a = 0; a < g.n(); ++a)
    for (int b = a + 1; b < g.n(); ++b)
      if (!g.adjacent(a, b)) e.emplace_back(a, b);
  return build_graph(g.n(), e);
}

}  // namespace

std::vector<Graph> connected_regular_graphs(int n, int d) {
  require(n >= 1 && d >= 0 && d < n, ErrorKind::ParameterTooSmall, "regular graph parameters");
  if (n > kMaxGadgetVertices)
    fail(ErrorKind::GenerationCapExceeded, "exhaustive generation stops at " + std::to_string(kMaxGadgetVertices) +
                                               " vertices");
  if ((n * d) % 2) return {};
  // Generate the sparser of the graph and its complement.
  bool flip = n - 1 - d < d;
  std::vector<Graph> out;
  for (const Graph& g : all_regular_graphs(n, flip ? n - 1 - d : d)) {
    Graph h = flip ? complement(g) : g;
    if (is_connected(h)) out.push_back(h);
  }
  std::sort(out.begin(), out.end(),
            [](const Graph& a, const Graph& b) { return canonical_code(a) < canonical_code(b); });
  return out;
}

GadgetFamily regular_gadgets(int k) {
  require(k >= 1, ErrorKind::ParameterTooSmall, "regular_gadgets needs k >= 1");
  for (int n = 6;; n += 2) {
    std::vector<Graph> all = connected_regular_graphs(n, 5);  // throws past the cap
    if (static_cast<int>(all.size()) < k) continue;
    GadgetFamily fam;
    fam.n = n;
    for (int i = 0; i < k; ++i) {
      fam.members.push_back(all[i]);
      fam.codes.push_back(canonical_code(all[i]));
    }
    return fam;
  }
}

Graph gadget_block(const Graph& gadget) {
  int n = gadget.n();
  std::vector<Edge> e = gadget.edges();
  for (int v = 0; v < n; ++v) {
    e.emplace_back(n, v);
    e.emplace_back(n + 1, v);
  }
  return build_graph(n + 2, e);
}

HGraph h_graph(int k, const GadgetFamily& fam) {
  require(k >= 1, ErrorKind::ParameterTooSmall, "h_graph needs k >= 1");
  require(static_cast<int>(fam.members.size()) >= k, ErrorKind::FamilyTooSmall,
          "need " + std::to_string(k) + " gadgets, have " + std::to_string(fam.members.size()));
  HGraph h;
  std::vector<Edge> e;
  std::vector<std::string> labels;
  int next = 0;
  for (int i = 0; i < k; ++i) {
    const Graph& a = fam.members[i];
    int n = a.n();
    int ends[2];
    for (int side = 0; side < 2; ++side) {
      std::string tag = side == 0 ? "s" : "t";
      Graph block = gadget_block(a);
      for (auto [x, y] : block.edges()) e.emplace_back(next + x, next + y);
      for (int j = 0; j < n; ++j) labels.push_back("A" + std::to_string(i + 1) + tag + std::to_string(j + 1));
      labels.push_back(tag + std::to_string(i + 1));
      labels.push_back(tag + std::to_string(i + 1) + "'");
      ends[side] = next + n;
      next += n + 2;
    }
    e.emplace_back(ends[0], ends[1]);
    h.s.push_back(ends[0]);
    h.t.push_back(ends[1]);
  }
  h.graph = build_graph(next, e, labels);
  return h;
}

DecoratedGamma decorate_gamma(int k, const GadgetFamily& fam) {
  require(static_cast<int>(fam.members.size()) >= k, ErrorKind::FamilyTooSmall,
          "need " + std::to_string(k) + " gadgets, have " + std::to_string(fam.members.size()));
  DecoratedGamma d;
  d.core = gamma_hat(k);
  const Graph& core = d.core.graph;
  std::vector<Edge> e = core.edges();
  std::vector<std::string> labels = core.labels();
  int next = core.n();
  for (int i = 0; i < k; ++i) {
    const Graph& a = fam.members[i];
    int n = a.n();
    for (int side = 0; side < 2; ++side) {
      std::string tag = side == 0 ? "s" : "t";
      int attach = side == 0 ? d.core.pattern[i].first : d.core.pattern[i].second;
      std::vector<int> copy;
      for (int j = 0; j < n; ++j) {
        copy.push_back(next + j);
        labels.push_back("A" + std::to_string(i + 1) + tag + std::to_string(j + 1));
      }
      int twin = next + n;
      labels.push_back(tag + std::to_string(i + 1) + "'");
      for (auto [x, y] : a.edges()) e.emplace_back(copy[x], copy[y]);
      for (int c : copy) {
        e.emplace_back(attach, c);
        e.emplace_back(twin, c);
      }
      (side == 0 ? d.gadget_s : d.gadget_t).push_back(copy);
      (side == 0 ? d.s_twin : d.t_twin).push_back(twin);
      next += n + 1;
    }
  }
  d.graph = build_graph(next, e, labels);
  return d;
}

bool planar_by_minors(const Graph& g) {
  if (g.n() < 5) return true;
  if (g.m() > 3 * g.n() - 6) return false;
  std::vector<Edge> k5, k33;
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) k5.emplace_back(a, b);
  for (int a = 0; a < 3; ++a)
    for (int b = 3; b < 6; ++b) k33.emplace_back(a, b);
  MinorConfig cfg;
  cfg.host_cap = 64;
  return !find_minor(g, build_graph(5, k5), cfg) && !find_minor(g, build_graph(6, k33), cfg);
}

namespace {

// Perfect matching of `need` items into hosts by augmenting paths.
bool perfect_matching(int need, int hosts, const std::vector<std::vector<char>>& fits) {
  std::vector<int> owner(hosts, -1);
  for (int i = 0; i < need; ++i) {
    std::vector<char> seen(hosts, 0);
    std::function<bool(int)> augment = [&](int x) {
      for (int h = 0; h < hosts; ++h) {
        if (!fits[x][h] || seen[h]) continue;
        seen[h] = 1;
        if (owner[h] < 0 || augment(owner[h])) {
          owner[h] = x;
          return true;
        }
      }
      return false;
    };
    if (!augment(i)) return false;
  }
  return true;
}

}  // namespace

HkDeletionReport verify_hk_deletion(int k, const GadgetFamily& fam) {
  require(k >= 2, ErrorKind::ParameterTooSmall, "verify_hk_deletion needs k >= 2");
  require(k <= 2, ErrorKind::SearchCapExceeded, "verify_hk_deletion runs for k <= 2");
  HkDeletionReport rep;
  HGraph h = h_graph(k, fam);
  DecoratedGamma d = decorate_gamma(k, fam);
  int n = fam.n;

  // (i) Explicit model: gadget blocks map onto their copies, s_i absorbs its
  // linkage path up to t_i.
  MinorModel model(h.graph.n());
  int hv = 0;
  for (int i = 0; i < k; ++i) {
    for (int side = 0; side < 2; ++side) {
      const auto& copy = side == 0 ? d.gadget_s[i] : d.gadget_t[i];
      for (int j = 0; j < n; ++j) model[hv + j] = {copy[j]};
      if (side == 0) {
        const Path& p = d.core.witness[i];
        model[hv + n] = std::vector<int>(p.begin(), p.end() - 1);
      } else {
        model[hv + n] = {d.core.pattern[i].second};
      }
      model[hv + n + 1] = {side == 0 ? d.s_twin[i] : d.t_twin[i]};
      hv += n + 2;
    }
  }
  rep.minor_present = verify_minor_model(d.graph, h.graph, model);

  // (ii) Blocks of H that a deletion must still accommodate.
  std::vector<Graph> h_blocks;
  for (const auto& b : blocks(h.graph).blocks) {
    Graph bg = induced_subgraph(h.graph, b).graph;
    require(!planar_by_minors(bg), ErrorKind::PreconditionViolated, "H_k block is planar");
    h_blocks.push_back(bg);
  }
  int core_n = d.core.graph.n();
  for (int v = 0; v < d.graph.n(); ++v) {
    ++rep.vertices_checked;
    Subgraph rest = delete_vertices(d.graph, {v});
    std::vector<Graph> hosts;
    for (const auto& b : blocks(rest.graph).blocks) {
      int size = static_cast<int>(b.size());
      if (size < n + 2) continue;
      Graph bg = induced_subgraph(rest.graph, b).graph;
      if (size > n + 2) {
        require(size <= 14, ErrorKind::SearchCapExceeded, "large block in deletion check");
        if (planar_by_minors(bg)) continue;
        require(size < 2 * (n + 2), ErrorKind::SearchCapExceeded, "non-planar block could host two H blocks");
      }
      hosts.push_back(bg);
    }
    std::vector<std::vector<char>> fits(h_blocks.size(), std::vector<char>(hosts.size(), 0));
    for (size_t a = 0; a < h_blocks.size(); ++a)
      for (size_t b = 0; b < hosts.size(); ++b) {
        if (hosts[b].n() == h_blocks[a].n() && hosts[b].m() == h_blocks[a].m())
          fits[a][b] = canonical_code(hosts[b]) == canonical_code(h_blocks[a]);
        else
          fits[a][b] = find_minor(hosts[b], h_blocks[a]).has_value();
      }
    if (!perfect_matching(static_cast<int>(h_blocks.size()), static_cast<int>(hosts.size()), fits)) {
      ++rep.decided_by_blocks;
      continue;
    }
    // Every gadget block survives, so v is a non-terminal core vertex and the
    // bridges need the pattern linked through the core.
    require(v < core_n, ErrorKind::PreconditionViolated, "blocks survive a gadget deletion");
    Subgraph core_rest = delete_vertices(d.core.graph, {v});
    Pattern p;
    for (auto [s, t] : d.core.pattern) p.emplace_back(core_rest.old_to_new[s], core_rest.old_to_new[t]);
    ++rep.decided_by_paths;
    if (disjoint_paths(core_rest.graph, p)) rep.present_after.push_back(v);
  }
  rep.per_vertex_absent = rep.present_after.empty();
  return rep;
}

}  // namespace gm
