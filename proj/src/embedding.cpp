#include "gm/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gm {

namespace {

Edge norm(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

int index_in(const std::vector<int>& xs, int x) {
  auto it = std::find(xs.begin(), xs.end(), x);
  return it == xs.end() ? -1 : static_cast<int>(it - xs.begin());
}

bool is_cycle_of(const Graph& g, const std::vector<int>& c) {
  if (c.size() < 3) return false;
  std::set<int> seen(c.begin(), c.end());
  if (seen.size() != c.size()) return false;
  for (size_t i = 0; i < c.size(); ++i) {
    int a = c[i], b = c[(i + 1) % c.size()];
    if (a < 0 || a >= g.n() || b < 0 || b >= g.n() || !g.adjacent(a, b)) return false;
  }
  return true;
}

bool is_path_of(const Graph& g, const std::vector<int>& p) {
  if (p.empty()) return false;
  std::set<int> seen(p.begin(), p.end());
  if (seen.size() != p.size()) return false;
  for (int v : p)
    if (v < 0 || v >= g.n()) return false;
  for (size_t i = 0; i + 1 < p.size(); ++i)
    if (!g.adjacent(p[i], p[i + 1])) return false;
  return true;
}

std::set<Edge> cycle_edges(const std::vector<int>& c) {
  std::set<Edge> out;
  for (size_t i = 0; i < c.size(); ++i) out.insert(norm(c[i], c[(i + 1) % c.size()]));
  return out;
}

std::set<Edge> path_edges(const std::vector<int>& p) {
  std::set<Edge> out;
  for (size_t i = 0; i + 1 < p.size(); ++i) out.insert(norm(p[i], p[i + 1]));
  return out;
}

// Connected components of the faces, joined across every edge not in
// `barrier`; faces with skip[f] set get component -1 and block the flood.
std::vector<int> face_components(const PlaneGraph& pg, const Faces& f, const std::set<Edge>& barrier,
                                 const std::vector<char>& skip) {
  int nf = static_cast<int>(f.boundary.size());
  std::vector<std::vector<int>> adj(nf);
  for (int u = 0; u < pg.graph.n(); ++u)
    for (size_t i = 0; i < pg.rotation[u].size(); ++i) {
      int v = pg.rotation[u][i];
      if (u > v || barrier.count({u, v})) continue;
      int a = f.dart_face[u][i], b = f.face_of(pg, v, u);
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  std::vector<int> comp(nf, -1);
  int next = 0;
  for (int s = 0; s < nf; ++s) {
    if (comp[s] >= 0 || skip[s]) continue;
    std::vector<int> stack{s};
    comp[s] = next;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : adj[x])
        if (comp[y] < 0 && !skip[y]) {
          comp[y] = next;
          stack.push_back(y);
        }
    }
    ++next;
  }
  return comp;
}

// Face membership test for vertices that are not on the separating curve:
// any incident face decides.
bool vertex_in(const Faces& f, const std::vector<char>& in_disc, int v) {
  for (int face : f.dart_face[v])
    if (in_disc[face]) return true;
  return false;
}

std::vector<char> as_flags(int nf, const std::vector<int>& faces) {
  std::vector<char> out(nf, 0);
  for (int x : faces) out[x] = 1;
  return out;
}

// Rewrites the cycle so that its disc lies to the left (counter-clockwise).
std::vector<int> oriented(const PlaneGraph& pg, const Faces& f, const std::vector<int>& cycle) {
  auto disc = as_flags(static_cast<int>(f.boundary.size()), disc_faces(pg, f, cycle));
  if (disc[f.face_of(pg, cycle[0], cycle[1])]) return cycle;
  std::vector<int> rev(cycle.rbegin(), cycle.rend());
  return rev;
}

// Vertices of C strictly between positions i and j walking in direction dir.
std::vector<int> arc_interior(const std::vector<int>& c, int i, int j, int dir) {
  std::vector<int> out;
  int n = static_cast<int>(c.size());
  for (int x = (i + dir + n) % n; x != j; x = (x + dir + n) % n) out.push_back(c[x]);
  return out;
}

}  // namespace

int Faces::face_of(const PlaneGraph& pg, int u, int v) const {
  int i = index_in(pg.rotation[u], v);
  require(i >= 0, ErrorKind::PreconditionViolated, "face_of: not an edge");
  return dart_face[u][i];
}

Faces trace_faces(const PlaneGraph& pg) {
  const int n = pg.graph.n();
  Faces f;
  f.dart_face.assign(n, {});
  for (int v = 0; v < n; ++v) f.dart_face[v].assign(pg.rotation[v].size(), -1);
  // back[v][i]: position of v in the rotation of rotation[v][i]
  std::vector<std::vector<int>> back(n);
  for (int v = 0; v < n; ++v)
    for (int w : pg.rotation[v]) back[v].push_back(index_in(pg.rotation[w], v));
  for (int u = 0; u < n; ++u)
    for (size_t i = 0; i < pg.rotation[u].size(); ++i) {
      if (f.dart_face[u][i] >= 0) continue;
      int id = static_cast<int>(f.boundary.size());
      std::vector<int> walk;
      int x = u, xi = static_cast<int>(i);
      while (f.dart_face[x][xi] < 0) {
        f.dart_face[x][xi] = id;
        walk.push_back(x);
        int y = pg.rotation[x][xi];
        int deg = static_cast<int>(pg.rotation[y].size());
        int yi = (back[x][xi] - 1 + deg) % deg;
        x = y;
        xi = yi;
      }
      f.boundary.push_back(std::move(walk));
    }
  if (pg.outer_u >= 0) f.outer = f.face_of(pg, pg.outer_u, pg.outer_v);
  return f;
}

bool satisfies_euler(const PlaneGraph& pg) {
  const Graph& g = pg.graph;
  Faces f = trace_faces(pg);
  auto comps = connected_components(g);
  std::vector<int> comp_of(g.n(), -1);
  for (size_t c = 0; c < comps.size(); ++c)
    for (int v : comps[c]) comp_of[v] = static_cast<int>(c);
  std::vector<long> chi(comps.size(), 0);
  for (size_t c = 0; c < comps.size(); ++c) chi[c] = static_cast<long>(comps[c].size());
  for (auto [a, b] : g.edges()) chi[comp_of[a]] -= 1;
  for (const auto& walk : f.boundary) chi[comp_of[walk[0]]] += 1;
  for (size_t c = 0; c < comps.size(); ++c) {
    bool has_edge = comps[c].size() > 1;
    if (has_edge && chi[c] != 2) return false;
  }
  return true;
}

PlaneGraph make_plane_graph(const Graph& g, std::vector<std::vector<int>> rotation, int outer_u, int outer_v) {
  require(static_cast<int>(rotation.size()) == g.n(), ErrorKind::PreconditionViolated,
          "rotation needs one list per vertex");
  for (int v = 0; v < g.n(); ++v) {
    std::vector<int> a = rotation[v], b = g.neighbors(v);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    require(a == b, ErrorKind::PreconditionViolated,
            "rotation at vertex " + std::to_string(v) + " is not a permutation of its neighbours");
  }
  if (g.m() > 0)
    require(outer_u >= 0 && outer_u < g.n() && outer_v >= 0 && outer_v < g.n() && g.adjacent(outer_u, outer_v),
            ErrorKind::PreconditionViolated, "outer dart is not an edge");
  PlaneGraph pg{g, std::move(rotation), g.m() > 0 ? outer_u : -1, g.m() > 0 ? outer_v : -1};
  require(satisfies_euler(pg), ErrorKind::PreconditionViolated, "rotation system is not planar");
  return pg;
}

PlaneGraph plane_graph_from_positions(const Graph& g, const std::vector<double>& x, const std::vector<double>& y) {
  require(static_cast<int>(x.size()) == g.n() && static_cast<int>(y.size()) == g.n(),
          ErrorKind::PreconditionViolated, "one position per vertex");
  std::vector<std::vector<int>> rot(g.n());
  for (int v = 0; v < g.n(); ++v) {
    rot[v] = g.neighbors(v);
    std::sort(rot[v].begin(), rot[v].end(), [&](int a, int b) {
      return std::atan2(y[a] - y[v], x[a] - x[v]) < std::atan2(y[b] - y[v], x[b] - x[v]);
    });
  }
  PlaneGraph pg{g, rot, -1, -1};
  if (g.m() == 0) return make_plane_graph(g, rot, -1, -1);
  Faces f = trace_faces(pg);
  double best = 0;
  int outer = -1;
  for (size_t id = 0; id < f.boundary.size(); ++id) {
    const auto& w = f.boundary[id];
    double area = 0;
    for (size_t i = 0; i < w.size(); ++i) {
      int a = w[i], b = w[(i + 1) % w.size()];
      area += x[a] * y[b] - x[b] * y[a];
    }
    if (outer < 0 || area < best) {
      best = area;
      outer = static_cast<int>(id);
    }
  }
  const auto& w = f.boundary[outer];
  return make_plane_graph(g, rot, w[0], w[1 % w.size()]);
}

void write_plane_graph(std::ostream& os, const PlaneGraph& pg) {
  write_edge_list(os, pg.graph);
  for (int v = 0; v < pg.graph.n(); ++v) {
    os << "rot " << v;
    for (int w : pg.rotation[v]) os << ' ' << w;
    os << '\n';
  }
  if (pg.outer_u >= 0) os << "outer " << pg.outer_u << ' ' << pg.outer_v << '\n';
}

PlaneGraph read_plane_graph(std::istream& is) {
  std::stringstream edges;
  std::vector<std::pair<int, std::vector<int>>> rots;
  int ou = -1, ov = -1;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "rot") {
      int v;
      require(static_cast<bool>(ls >> v), ErrorKind::ParseError, "rot line without vertex");
      std::vector<int> order;
      int w;
      while (ls >> w) order.push_back(w);
      rots.emplace_back(v, order);
    } else if (head == "outer") {
      require(static_cast<bool>(ls >> ou >> ov), ErrorKind::ParseError, "outer line needs two vertices");
    } else {
      edges << line << '\n';
    }
  }
  Graph g = read_edge_list(edges);
  std::vector<std::vector<int>> rotation(g.n());
  std::vector<char> seen(g.n(), 0);
  for (auto& [v, order] : rots) {
    require(v >= 0 && v < g.n() && !seen[v], ErrorKind::ParseError, "bad rot line for vertex " + std::to_string(v));
    seen[v] = 1;
    rotation[v] = order;
  }
  for (int v = 0; v < g.n(); ++v)
    require(seen[v] || g.degree(v) == 0, ErrorKind::ParseError, "missing rot line for vertex " + std::to_string(v));
  return make_plane_graph(g, rotation, ou, ov);
}

std::vector<int> disc_faces(const PlaneGraph& pg, const Faces& f, const std::vector<int>& cycle) {
  int nf = static_cast<int>(f.boundary.size());
  auto comp = face_components(pg, f, cycle_edges(cycle), std::vector<char>(nf, 0));
  std::vector<int> out;
  for (int x = 0; x < nf; ++x)
    if (comp[x] != comp[f.outer]) out.push_back(x);
  return out;
}

// ---------------------------------------------------------------------------
// Concentric cycles

namespace {

struct NestView {
  Faces faces;
  std::vector<std::vector<char>> disc;        // per cycle, face flags
  std::vector<std::vector<char>> on_cycle;    // per cycle, vertex flags
  std::vector<int> disc_size;
};

NestView view_of(const ConcentricCycles& cc) {
  NestView nv;
  nv.faces = trace_faces(cc.plane);
  int nf = static_cast<int>(nv.faces.boundary.size());
  for (const auto& c : cc.cycles) {
    auto d = disc_faces(cc.plane, nv.faces, c);
    nv.disc_size.push_back(static_cast<int>(d.size()));
    nv.disc.push_back(as_flags(nf, d));
    std::vector<char> on(cc.plane.graph.n(), 0);
    for (int v : c) on[v] = 1;
    nv.on_cycle.push_back(on);
  }
  return nv;
}

// A C_i-path of `g` (endpoints on C_i, no edge of C_i, interior strictly
// inside Δ_i and outside the closed Δ_{i-1}); empty if none exists.
Path band_path(const Graph& g, const ConcentricCycles& cc, const NestView& nv, int i) {
  const auto& c = cc.cycles[i];
  const auto& on = nv.on_cycle[i];
  const auto& in = nv.disc[i];
  std::set<Edge> ce = cycle_edges(c);
  auto inside_prev = [&](int v) {
    if (i == 0) return false;
    return nv.on_cycle[i - 1][v] || vertex_in(nv.faces, nv.disc[i - 1], v);
  };
  for (int u : c)
    for (int w : g.neighbors(u))
      if (on[w] && u < w && !ce.count({u, w}) && in[nv.faces.face_of(cc.plane, u, w)]) return {u, w};
  int n = g.n();
  std::vector<char> band(n, 0);
  for (int v = 0; v < n; ++v)
    band[v] = !on[v] && g.degree(v) > 0 && vertex_in(nv.faces, in, v) && !inside_prev(v);
  std::vector<int> comp(n, -1);
  for (int s = 0; s < n; ++s) {
    if (!band[s] || comp[s] >= 0) continue;
    std::vector<int> members{s};
    comp[s] = s;
    for (size_t h = 0; h < members.size(); ++h)
      for (int y : g.neighbors(members[h]))
        if (band[y] && comp[y] < 0) {
          comp[y] = s;
          members.push_back(y);
        }
    // two distinct cycle vertices seen from this component close a path
    int u = -1, xu = -1;
    for (int x : members)
      for (int y : g.neighbors(x)) {
        if (!on[y]) continue;
        if (u < 0) {
          u = y;
          xu = x;
        } else if (y != u) {
          std::vector<char> allowed(n, 0);
          for (int m : members) allowed[m] = 1;
          Path mid = shortest_path(g, xu, x, allowed);
          Path out{u};
          out.insert(out.end(), mid.begin(), mid.end());
          out.push_back(y);
          return out;
        }
      }
  }
  return {};
}

}  // namespace

bool validate_concentric(const ConcentricCycles& cc) {
  const Graph& g = cc.plane.graph;
  if (cc.cycles.empty() || cc.plane.outer_u < 0) return false;
  std::vector<char> used(g.n(), 0);
  for (const auto& c : cc.cycles) {
    if (!is_cycle_of(g, c)) return false;
    for (int v : c) {
      if (used[v]) return false;
      used[v] = 1;
    }
  }
  NestView nv = view_of(cc);
  for (size_t i = 0; i + 1 < cc.cycles.size(); ++i) {
    for (size_t x = 0; x < nv.disc[i].size(); ++x)
      if (nv.disc[i][x] && !nv.disc[i + 1][x]) return false;
    if (nv.disc_size[i] >= nv.disc_size[i + 1]) return false;
    for (int v : cc.cycles[i])
      if (!vertex_in(nv.faces, nv.disc[i + 1], v)) return false;
  }
  return true;
}

bool is_tight(const ConcentricCycles& cc) {
  NestView nv = view_of(cc);
  for (size_t i = 0; i < cc.cycles.size(); ++i)
    if (!band_path(cc.plane.graph, cc, nv, static_cast<int>(i)).empty()) return false;
  return true;
}

ConcentricCycles tighten(const ConcentricCycles& cc) {
  require(validate_concentric(cc), ErrorKind::PreconditionViolated, "tighten: cycles are not concentric");
  ConcentricCycles cur = cc;
  bool changed = true;
  while (changed) {
    changed = false;
    NestView nv = view_of(cur);
    for (size_t i = 0; i < cur.cycles.size() && !changed; ++i) {
      Path q = band_path(cur.plane.graph, cur, nv, static_cast<int>(i));
      if (q.empty()) continue;
      const auto& c = cur.cycles[i];
      int iu = index_in(c, q.front()), iw = index_in(c, q.back());
      std::vector<std::vector<int>> cand;
      for (int dir : {1, -1}) {
        std::vector<int> cyc = q;
        auto back = arc_interior(c, iw, iu, dir);
        cyc.insert(cyc.end(), back.begin(), back.end());
        cand.push_back(cyc);
      }
      std::vector<std::vector<int>> discs;
      for (const auto& cy : cand) discs.push_back(disc_faces(cur.plane, nv.faces, cy));
      int pick = 0;
      if (i > 0) {
        auto inner = disc_faces(cur.plane, nv.faces, cur.cycles[i - 1]);
        pick = std::includes(discs[0].begin(), discs[0].end(), inner.begin(), inner.end()) ? 0 : 1;
      } else if (discs[1].size() != discs[0].size()) {
        pick = discs[1].size() > discs[0].size() ? 1 : 0;
      } else if (cand[1].size() > cand[0].size()) {
        pick = 1;
      }
      cur.cycles[i] = cand[pick];
      changed = true;
    }
  }
  return cur;
}

ConcentricCycles mesh_nest(const CylindricalMesh& mesh) {
  const Graph& g = mesh.graph;
  std::vector<double> x(g.n(), 0.0), y(g.n(), 0.0);
  for (size_t i = 0; i < mesh.cycles.size(); ++i) {
    const auto& c = mesh.cycles[i];
    for (size_t p = 0; p < c.size(); ++p) {
      double a = 2 * M_PI * static_cast<double>(p) / static_cast<double>(c.size());
      x[c[p]] = static_cast<double>(i + 1) * std::cos(a);
      y[c[p]] = static_cast<double>(i + 1) * std::sin(a);
    }
  }
  return {plane_graph_from_positions(g, x, y), mesh.cycles};
}

// ---------------------------------------------------------------------------
// Wells

namespace {

struct WellView {
  NestView nest;
  std::vector<char> in_boundary;  // faces inside the boundary cycle
  std::vector<char> on_boundary;
};

WellView well_view(const Well& w) {
  WellView v;
  v.nest = view_of(w.nest);
  v.in_boundary = as_flags(static_cast<int>(v.nest.faces.boundary.size()),
                           disc_faces(w.nest.plane, v.nest.faces, w.boundary));
  v.on_boundary.assign(w.nest.plane.graph.n(), 0);
  for (int b : w.boundary) v.on_boundary[b] = 1;
  return v;
}

Graph well_graph(const Well& w) {
  std::set<Edge> e;
  for (const auto& c : w.nest.cycles) {
    auto ce = cycle_edges(c);
    e.insert(ce.begin(), ce.end());
  }
  for (const auto& p : w.paths) {
    auto pe = path_edges(p);
    e.insert(pe.begin(), pe.end());
  }
  return build_graph(w.nest.plane.graph.n(), std::vector<Edge>(e.begin(), e.end()));
}

std::vector<char> interior_flags(const Well& w, const WellView& v, int idx) {
  const Faces& f = v.nest.faces;
  int nf = static_cast<int>(f.boundary.size());
  std::vector<char> skip(nf, 0);
  for (int x = 0; x < nf; ++x) skip[x] = !v.in_boundary[x];
  auto comp = face_components(w.nest.plane, f, path_edges(w.paths[idx]), skip);
  // the side holding most of the innermost disc is the centre
  std::map<int, int> votes;
  for (int x = 0; x < nf; ++x)
    if (v.nest.disc[0][x] && comp[x] >= 0) votes[comp[x]] += 1;
  int centre = -1, best = -1;
  for (auto [c, cnt] : votes)
    if (cnt > best) {
      best = cnt;
      centre = c;
    }
  std::vector<char> out(nf, 0);
  for (int x = 0; x < nf; ++x) out[x] = comp[x] >= 0 && comp[x] != centre;
  return out;
}

// Number of components of C ∩ P (a forest of paths).
int meet_components(const std::vector<char>& on_cycle, const std::set<Edge>& ce, const Path& p) {
  int verts = 0, edges = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (on_cycle[p[i]]) ++verts;
    if (i + 1 < p.size() && ce.count(norm(p[i], p[i + 1]))) ++edges;
  }
  return verts - edges;
}

bool violates_drained(const Well& w, const WellView& v, const std::vector<char>& delta, int idx, int i) {
  const auto& p = w.paths[idx];
  bool meets = std::any_of(p.begin(), p.end(), [&](int x) { return v.nest.on_cycle[i][x]; });
  if (!meets) return false;
  std::set<int> mine(p.begin(), p.end());
  for (size_t q = 0; q < w.paths.size(); ++q) {
    if (static_cast<int>(q) == idx) continue;
    for (int x : w.paths[q])
      if (v.nest.on_cycle[i + 1][x] && !mine.count(x) && vertex_in(v.nest.faces, delta, x)) return false;
  }
  return true;
}

Path splice(const Path& p, int from, int to, const std::vector<int>& mid) {
  // replace p[from..to] (from < to) by p[from], mid..., p[to]
  Path out(p.begin(), p.begin() + from + 1);
  out.insert(out.end(), mid.begin(), mid.end());
  out.insert(out.end(), p.begin() + to, p.end());
  return out;
}

// Shortcut of path idx along an arc of cycle ci whose inner part lies in Δ_P
// and avoids every path; applied only when the edge count drops.
bool try_drain_move(Well& w, const WellView& v, const std::vector<char>& delta, int idx, int ci) {
  const auto& c = w.nest.cycles[ci];
  const Path p = w.paths[idx];
  std::map<int, int> pos;
  for (size_t i = 0; i < p.size(); ++i) pos[p[i]] = static_cast<int>(i);
  std::set<int> others;
  for (size_t q = 0; q < w.paths.size(); ++q)
    if (static_cast<int>(q) != idx) others.insert(w.paths[q].begin(), w.paths[q].end());
  int n = static_cast<int>(c.size());
  int before = well_edge_count(w);
  for (size_t s = 0; s < p.size(); ++s) {
    int ic = index_in(c, p[s]);
    if (ic < 0) continue;
    for (int dir : {1, -1}) {
      std::vector<int> mid;
      int x = (ic + dir + n) % n;
      bool ok = true;
      while (!pos.count(c[x])) {
        if (others.count(c[x]) || !vertex_in(v.nest.faces, delta, c[x])) {
          ok = false;
          break;
        }
        mid.push_back(c[x]);
        x = (x + dir + n) % n;
      }
      if (!ok || c[x] == p[s]) continue;
      int a = static_cast<int>(s), b = pos[c[x]];
      if (mid.empty()) {
        if (std::abs(a - b) == 1 || !delta[v.nest.faces.face_of(w.nest.plane, p[s], c[x])]) continue;
      }
      if (a > b) {
        std::swap(a, b);
        std::reverse(mid.begin(), mid.end());
      }
      Well trial = w;
      trial.paths[idx] = splice(p, a, b, mid);
      if (well_edge_count(trial) < before) {
        w = std::move(trial);
        return true;
      }
    }
  }
  return false;
}

// Replaces a C_i-path of P lying outside Δ_i by the arc of C_i that together
// with it bounds a disc disjoint from the interior of Δ_i.
bool try_dry_move(Well& w, const WellView& v, int idx, int ci) {
  const auto& c = w.nest.cycles[ci];
  const auto& on = v.nest.on_cycle[ci];
  const auto& in = v.nest.disc[ci];
  const Faces& f = v.nest.faces;
  const Path p = w.paths[idx];
  std::set<Edge> ce = cycle_edges(c);
  std::set<int> others;
  for (size_t q = 0; q < w.paths.size(); ++q)
    if (static_cast<int>(q) != idx) others.insert(w.paths[q].begin(), w.paths[q].end());
  std::set<int> mine(p.begin(), p.end());
  int before = well_edge_count(w);
  int last = -1;
  for (int s = 0; s < static_cast<int>(p.size()); ++s) {
    if (!on[p[s]]) continue;
    int a = last;
    last = s;
    if (a < 0) continue;
    bool outside;
    if (s == a + 1) {
      if (ce.count(norm(p[a], p[s]))) continue;
      outside = !in[f.face_of(w.nest.plane, p[a], p[s])];
    } else {
      outside = !vertex_in(f, in, p[a + 1]);
    }
    if (!outside) continue;
    int ia = index_in(c, p[a]), ib = index_in(c, p[s]);
    for (int dir : {1, -1}) {
      auto mid = arc_interior(c, ia, ib, dir);
      bool free = std::none_of(mid.begin(), mid.end(), [&](int x) { return others.count(x) || mine.count(x); });
      if (!free) continue;
      std::vector<int> loop(p.begin() + a, p.begin() + s + 1);
      loop.insert(loop.end(), mid.rbegin(), mid.rend());
      auto disc = disc_faces(w.nest.plane, f, loop);
      bool clear = std::none_of(disc.begin(), disc.end(), [&](int x) { return in[x] != 0; });
      if (!clear) continue;
      Well trial = w;
      trial.paths[idx] = splice(p, a, s, mid);
      if (well_edge_count(trial) < before) {
        w = std::move(trial);
        return true;
      }
    }
  }
  return false;
}

}  // namespace

bool validate_well(const Well& w) {
  if (!validate_concentric(w.nest)) return false;
  const Graph& g = w.nest.plane.graph;
  if (!is_cycle_of(g, w.boundary)) return false;
  WellView v = well_view(w);
  const auto& f = v.nest.faces;
  int s = static_cast<int>(w.nest.cycles.size());
  for (size_t x = 0; x < v.in_boundary.size(); ++x)
    if (v.nest.disc[s - 1][x] && !v.in_boundary[x]) return false;
  std::set<Edge> be = cycle_edges(w.boundary);
  std::map<int, int> interior_owner;
  for (size_t q = 0; q < w.paths.size(); ++q) {
    const auto& p = w.paths[q];
    if (p.size() < 2 || !is_path_of(g, p)) return false;
    if (!v.on_boundary[p.front()] || !v.on_boundary[p.back()]) return false;
    for (size_t i = 1; i + 1 < p.size(); ++i) {
      if (v.on_boundary[p[i]] || !vertex_in(f, v.in_boundary, p[i])) return false;
      if (!interior_owner.emplace(p[i], static_cast<int>(q)).second) return false;
    }
    for (auto e : path_edges(p))
      if (be.count(e)) return false;
  }
  for (size_t q = 0; q < w.paths.size(); ++q)
    for (int end : {w.paths[q].front(), w.paths[q].back()})
      if (interior_owner.count(end)) return false;
  return true;
}

int well_edge_count(const Well& w) { return well_graph(w).m(); }

std::vector<int> path_interior(const Well& w, int path_index) {
  require(path_index >= 0 && path_index < static_cast<int>(w.paths.size()), ErrorKind::IndexOutOfRange,
          "path_interior: no such path");
  WellView v = well_view(w);
  auto flags = interior_flags(w, v, path_index);
  std::vector<int> out;
  for (size_t x = 0; x < flags.size(); ++x)
    if (flags[x]) out.push_back(static_cast<int>(x));
  return out;
}

bool is_tight_well(const Well& w) {
  Graph g = well_graph(w);
  NestView nv = view_of(w.nest);
  for (size_t i = 0; i < w.nest.cycles.size(); ++i)
    if (!band_path(g, w.nest, nv, static_cast<int>(i)).empty()) return false;
  return true;
}

// The second drained clause forbids a C_i-path of P inside a cell that also
// carries an edge of C_i. Every edge is its own cell here and a C_i-path has
// no C_i edge, so the clause holds automatically; only the first is checked.
bool is_drained(const Well& w) {
  if (w.paths.size() <= 1) return true;
  WellView v = well_view(w);
  int s = static_cast<int>(w.nest.cycles.size());
  for (size_t q = 0; q < w.paths.size(); ++q) {
    auto delta = interior_flags(w, v, static_cast<int>(q));
    for (int i = 0; i + 1 < s; ++i)
      if (violates_drained(w, v, delta, static_cast<int>(q), i)) return false;
  }
  return true;
}

bool is_dry(const Well& w) {
  if (!is_drained(w)) return false;
  int s = static_cast<int>(w.nest.cycles.size());
  NestView nv = view_of(w.nest);
  std::vector<std::set<Edge>> ce;
  for (const auto& c : w.nest.cycles) ce.push_back(cycle_edges(c));
  for (const auto& p : w.paths) {
    std::vector<int> comps(s);
    for (int j = 0; j < s; ++j) comps[j] = meet_components(nv.on_cycle[j], ce[j], p);
    if (std::all_of(comps.begin(), comps.end(), [](int c) { return c == 0; })) continue;  // never enters the nest
    if (comps[0] > 1) return false;
    int first = -1;
    for (int j = 0; j < s; ++j)
      if (comps[j] == 1) {
        if (first >= 0) return false;
        first = j;
      }
    if (first < 0) return false;
    for (int j = 0; j < first; ++j)
      if (comps[j] != 0) return false;
    for (int j = first + 1; j < s; ++j)
      if (comps[j] != 2) return false;
  }
  return true;
}

Well drain(const Well& w) {
  require(validate_well(w), ErrorKind::PreconditionViolated, "drain: invalid well");
  Well cur = w;
  if (cur.paths.size() <= 1) return cur;
  int s = static_cast<int>(cur.nest.cycles.size());
  WellView v = well_view(cur);  // the nest never changes, only paths do
  for (;;) {
    int np = static_cast<int>(cur.paths.size());
    std::vector<std::vector<char>> delta(np);
    std::vector<int> size(np), order(np);
    for (int q = 0; q < np; ++q) {
      delta[q] = interior_flags(cur, v, q);
      size[q] = static_cast<int>(std::count(delta[q].begin(), delta[q].end(), 1));
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return size[a] > size[b]; });
    bool moved = false;
    for (int q : order) {
      for (int i = s - 2; i >= 0 && !moved; --i)
        if (violates_drained(cur, v, delta[q], q, i)) moved = try_drain_move(cur, v, delta[q], q, i + 1);
      if (moved) break;
    }
    if (!moved) return cur;
  }
}

Well dry(const Well& w) {
  require(validate_well(w), ErrorKind::PreconditionViolated, "dry: invalid well");
  require(is_tight_well(w), ErrorKind::NotTight, "dry: cycles are not tight in the well");
  Well cur = drain(w);
  WellView v = well_view(cur);
  int s = static_cast<int>(cur.nest.cycles.size());
  for (;;) {
    bool moved = false;
    for (int i = s - 1; i >= 0 && !moved; --i)
      for (int q = 0; q < static_cast<int>(cur.paths.size()) && !moved; ++q) moved = try_dry_move(cur, v, q, i);
    if (!moved) return cur;
    cur = drain(cur);
  }
}

Well random_well(int s, int perimeter, int max_paths, std::mt19937_64& rng) {
  require(s >= 1 && perimeter >= 3 && max_paths >= 0, ErrorKind::ParameterTooSmall,
          "random_well needs s >= 1, perimeter >= 3");
  const int L = perimeter;
  auto id = [&](int level, int p) { return (level - 1) * L + p; };  // levels 1..s+1
  std::vector<Edge> e;
  std::vector<double> x, y;
  for (int level = 1; level <= s + 1; ++level)
    for (int p = 0; p < L; ++p) {
      e.emplace_back(id(level, p), id(level, (p + 1) % L));
      if (level <= s) e.emplace_back(id(level, p), id(level + 1, p));
      double a = 2 * M_PI * p / L;
      x.push_back(level * std::cos(a));
      y.push_back(level * std::sin(a));
    }
  Graph g = build_graph((s + 1) * L, e);
  Well w;
  w.nest.plane = plane_graph_from_positions(g, x, y);
  for (int level = 1; level <= s + 1; ++level) {
    std::vector<int> ring;
    for (int p = 0; p < L; ++p) ring.push_back(id(level, p));
    if (level <= s)
      w.nest.cycles.push_back(ring);
    else
      w.boundary = ring;
  }
  int m = std::min(max_paths, L / 2);
  if (m == 0) return w;
  m = std::uniform_int_distribution<int>(1, m)(rng);
  std::vector<int> spots(L);
  std::iota(spots.begin(), spots.end(), 0);
  std::shuffle(spots.begin(), spots.end(), rng);
  spots.resize(2 * m);
  std::sort(spots.begin(), spots.end());
  // random non-crossing matching of the chosen spots
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> open;
  for (int i = 0; i < 2 * m; ++i) {
    int left = 2 * m - i;
    bool can_open = static_cast<int>(open.size()) < left;
    bool can_close = !open.empty();
    bool do_open = can_open && (!can_close || std::bernoulli_distribution(0.5)(rng));
    if (do_open) {
      open.push_back(spots[i]);
    } else {
      pairs.emplace_back(open.back(), spots[i]);
      open.pop_back();
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](auto a, auto b) { return a.second - a.first < b.second - b.first; });
  std::vector<int> floor(L, s + 1);  // lowest level already used at each angle
  for (auto [a, b] : pairs) {
    bool room = true;
    for (int p = a; p <= b; ++p) room = room && floor[p] >= 2;
    if (!room) continue;
    Path path{id(s + 1, a)};
    int level = s;
    std::vector<int> low(L, s + 1);
    for (int p = a; p <= b; ++p) {
      int leave = s;
      if (p < b) {
        int cap = std::min(floor[p], floor[p + 1]) - 1;
        if (level <= cap && std::bernoulli_distribution(0.5)(rng))
          leave = level;
        else
          leave = std::uniform_int_distribution<int>(1, cap)(rng);
      }
      int step = leave < level ? -1 : 1;
      path.push_back(id(level, p));
      for (int l = level; l != leave;) {
        l += step;
        path.push_back(id(l, p));
      }
      low[p] = std::min(level, leave);
      level = leave;
    }
    path.push_back(id(s + 1, b));
    for (int p = a; p <= b; ++p) floor[p] = std::min(floor[p], low[p]);
    w.paths.push_back(path);
  }
  return w;
}

std::string well_json(const Well& w) {
  nlohmann::json j;
  j["boundary"] = w.boundary;
  j["cycles"] = w.nest.cycles;
  j["paths"] = w.paths;
  j["edge_count"] = well_edge_count(w);
  return j.dump();
}

// ---------------------------------------------------------------------------
// Routing

namespace {

struct Terminal {
  int side = 0;  // 0 outer cuff, 1 inner cuff
  int index = 0;
};

// Stack scan for a non-crossing matching; `skip` marks positions ignored.
bool non_crossing(const std::vector<int>& partner) {
  std::vector<int> stack;
  for (int i = 0; i < static_cast<int>(partner.size()); ++i) {
    if (partner[i] < 0) continue;
    if (!stack.empty() && stack.back() == partner[i])
      stack.pop_back();
    else
      stack.push_back(i);
  }
  return stack.empty();
}

// Vertex -> index along a cyclic order, as sorted (vertex, index) pairs.
class Positions {
 public:
  explicit Positions(const std::vector<int>& order) {
    for (size_t i = 0; i < order.size(); ++i) at_.emplace_back(order[i], static_cast<int>(i));
    std::sort(at_.begin(), at_.end());
  }
  // -1 when v is not on the order.
  int operator()(int v) const {
    auto it = std::lower_bound(at_.begin(), at_.end(), std::pair{v, -1});
    return it != at_.end() && it->first == v ? it->second : -1;
  }

 private:
  std::vector<std::pair<int, int>> at_;
};

void check_distinct_terminals(const Pattern& p) {
  std::vector<int> seen;
  for (auto [a, b] : p) {
    seen.push_back(a);
    if (b != a) seen.push_back(b);
  }
  std::sort(seen.begin(), seen.end());
  require(std::adjacent_find(seen.begin(), seen.end()) == seen.end(), ErrorKind::PreconditionViolated,
          "terminal used twice");
}

// One cuff of the cylinder: local pairs must not cross, and each local pair
// must leave every crossing endpoint on one side.
bool cuff_ok(int len, const std::vector<std::pair<int, int>>& local, const std::vector<int>& crossing) {
  std::vector<int> partner(len, -1);
  for (auto [a, b] : local) {
    partner[a] = b;
    partner[b] = a;
  }
  if (!non_crossing(partner)) return false;
  if (crossing.empty()) return true;
  for (auto [a, b] : local) {
    int lo = std::min(a, b), hi = std::max(a, b);
    int between = 0;
    for (int x : crossing) between += (x > lo && x < hi);
    if (between != 0 && between != static_cast<int>(crossing.size())) return false;
  }
  return true;
}

struct RailIndex {
  std::vector<std::vector<int>> at;   // at[r][j]: vertex of rail r on C_j
  std::vector<std::vector<int>> idx;  // idx[r][j]: its index along the rail
};

RailIndex index_rails(const ConcentricCycles& cc, const std::vector<Path>& rails) {
  const Graph& g = cc.plane.graph;
  int t = static_cast<int>(cc.cycles.size());
  std::vector<int> cycle_of(g.n(), -1);
  for (int j = 0; j < t; ++j)
    for (int v : cc.cycles[j]) cycle_of[v] = j;
  RailIndex ri;
  std::vector<char> used(g.n(), 0);
  for (const auto& r : rails) {
    require(is_path_of(g, r), ErrorKind::PreconditionViolated, "rail is not a path of the graph");
    std::vector<int> at(t, -1), idx(t, -1);
    for (size_t i = 0; i < r.size(); ++i) {
      require(!used[r[i]], ErrorKind::PreconditionViolated, "rails must be disjoint");
      used[r[i]] = 1;
      int j = cycle_of[r[i]];
      if (j < 0) continue;
      require(at[j] < 0, ErrorKind::PreconditionViolated, "rail meets a cycle more than once");
      at[j] = r[i];
      idx[j] = static_cast<int>(i);
    }
    for (int j = 0; j < t; ++j) require(at[j] >= 0, ErrorKind::PreconditionViolated, "rail misses a cycle");
    ri.at.push_back(at);
    ri.idx.push_back(idx);
  }
  return ri;
}

// Rail r walked from its vertex on C_from to its vertex on C_to.
std::vector<int> rail_segment(const std::vector<Path>& rails, const RailIndex& ri, int r, int from, int to) {
  int a = ri.idx[r][from], b = ri.idx[r][to];
  std::vector<int> out;
  int step = a <= b ? 1 : -1;
  for (int i = a;; i += step) {
    out.push_back(rails[r][i]);
    if (i == b) break;
  }
  return out;
}

void append(Path& p, const std::vector<int>& more) {
  for (int v : more)
    if (p.empty() || p.back() != v) p.push_back(v);
}

Linkage checked(const Graph& g, const Pattern& p, Linkage l) {
  for (size_t i = 0; i < p.size(); ++i)
    if (l[i].front() != p[i].first) std::reverse(l[i].begin(), l[i].end());
  require(validate_linkage(g, l) && pattern_of(g, l) == normalize_pattern(p), ErrorKind::InvalidLinkage,
          "routing produced an invalid linkage");
  return l;
}

}  // namespace

bool feasible_on_disc(const Pattern& p, const std::vector<int>& boundary_order) {
  Positions pos(boundary_order);
  check_distinct_terminals(p);
  std::vector<int> partner(boundary_order.size(), -1);
  for (auto [a, b] : p) {
    require(pos(a) >= 0 && pos(b) >= 0, ErrorKind::TerminalNotOnBoundary, "terminal is not on the boundary");
    if (a == b) continue;
    partner[pos(a)] = pos(b);
    partner[pos(b)] = pos(a);
  }
  return non_crossing(partner);
}

bool feasible_on_cylinder(const Pattern& p, const std::vector<int>& outer_order, const std::vector<int>& inner_order) {
  Positions po(outer_order), pi(inner_order);
  check_distinct_terminals(p);
  auto locate = [&](int v) {
    int o = po(v), i = pi(v);
    require(o >= 0 || i >= 0, ErrorKind::TerminalNotOnBoundary, "terminal is not on either cuff");
    require(o < 0 || i < 0, ErrorKind::PreconditionViolated, "vertex lies on both cuffs");
    return o >= 0 ? Terminal{0, o} : Terminal{1, i};
  };
  std::vector<std::pair<int, int>> local[2];
  std::vector<std::pair<int, int>> cross;  // (outer index, inner index)
  for (auto [a, b] : p) {
    if (a == b) continue;
    Terminal ta = locate(a), tb = locate(b);
    if (ta.side == tb.side)
      local[ta.side].emplace_back(ta.index, tb.index);
    else
      cross.push_back(ta.side == 0 ? std::pair{ta.index, tb.index} : std::pair{tb.index, ta.index});
  }
  std::vector<int> ends[2];
  for (auto [o, i] : cross) {
    ends[0].push_back(o);
    ends[1].push_back(i);
  }
  if (!cuff_ok(static_cast<int>(outer_order.size()), local[0], ends[0])) return false;
  if (!cuff_ok(static_cast<int>(inner_order.size()), local[1], ends[1])) return false;
  if (cross.size() <= 2) return true;
  // crossing pairs keep their cyclic order from one cuff to the other
  std::vector<int> by_outer(cross.size()), by_inner(cross.size());
  std::iota(by_outer.begin(), by_outer.end(), 0);
  by_inner = by_outer;
  std::sort(by_outer.begin(), by_outer.end(), [&](int a, int b) { return cross[a].first < cross[b].first; });
  std::sort(by_inner.begin(), by_inner.end(), [&](int a, int b) { return cross[a].second < cross[b].second; });
  auto start = std::find(by_inner.begin(), by_inner.end(), by_outer[0]);
  std::rotate(by_inner.begin(), start, by_inner.end());
  return by_inner == by_outer;
}

struct NestRouter::Impl {
  ConcentricCycles cc;
  std::vector<Path> rails;
  int t = 0;
  Faces faces;
  std::vector<std::vector<int>> ccw;  // cycles oriented with their disc on the left
  std::vector<std::vector<int>> pos;  // pos[j][v]: index of v along ccw[j], -1 off C_j
  RailIndex ri;
  std::vector<int> outer_rail, inner_rail;  // rail ending at v on C_t / C_1, or -1
  bool inner_empty = true;                  // nothing strictly inside C_1
  // band[s]: cycles C_s..C_{t-1-s} and the rail pieces between them
  std::vector<Graph> band;

  int rail_at(int r, int j) const { return ri.at[r][j]; }
  Path segment(int r, int from, int to) const { return rail_segment(rails, ri, r, from, to); }
};

NestRouter::NestRouter(const ConcentricCycles& cc, const std::vector<Path>& rails) {
  require(validate_concentric(cc), ErrorKind::PreconditionViolated, "cycles are not concentric");
  auto im = std::make_shared<Impl>();
  im->cc = cc;
  im->rails = rails;
  im->t = static_cast<int>(cc.cycles.size());
  const Graph& g = cc.plane.graph;
  im->faces = trace_faces(cc.plane);
  for (const auto& c : cc.cycles) {
    im->ccw.push_back(oriented(cc.plane, im->faces, c));
    std::vector<int> pos(g.n(), -1);
    for (size_t i = 0; i < im->ccw.back().size(); ++i) pos[im->ccw.back()[i]] = static_cast<int>(i);
    im->pos.push_back(std::move(pos));
  }
  im->ri = index_rails(cc, rails);
  im->outer_rail.assign(g.n(), -1);
  im->inner_rail.assign(g.n(), -1);
  for (size_t r = 0; r < rails.size(); ++r) {
    im->outer_rail[im->rail_at(static_cast<int>(r), im->t - 1)] = static_cast<int>(r);
    im->inner_rail[im->rail_at(static_cast<int>(r), 0)] = static_cast<int>(r);
  }
  auto inner = as_flags(static_cast<int>(im->faces.boundary.size()), disc_faces(cc.plane, im->faces, cc.cycles[0]));
  std::set<int> on(cc.cycles[0].begin(), cc.cycles[0].end());
  for (int v = 0; v < g.n(); ++v)
    if (!on.count(v) && g.degree(v) > 0 && vertex_in(im->faces, inner, v)) im->inner_empty = false;
  for (int lo = 0, hi = im->t - 1; lo < hi; ++lo, --hi) {
    std::vector<Edge> edges;
    for (int j = lo; j <= hi; ++j) {
      const auto& c = cc.cycles[j];
      for (size_t i = 0; i < c.size(); ++i) edges.push_back(norm(c[i], c[(i + 1) % c.size()]));
    }
    for (size_t r = 0; r < rails.size(); ++r) {
      auto seg = im->segment(static_cast<int>(r), lo, hi);
      for (size_t i = 0; i + 1 < seg.size(); ++i) edges.push_back(norm(seg[i], seg[i + 1]));
    }
    im->band.push_back(build_graph(g.n(), edges));
  }
  impl_ = std::move(im);
}

const std::vector<int>& NestRouter::outer_order() const { return impl_->ccw.back(); }
const std::vector<int>& NestRouter::inner_order() const { return impl_->ccw.front(); }

namespace {

void check_route_pattern(const Pattern& p) {
  check_distinct_terminals(p);
  for (auto [a, b] : p) require(a != b, ErrorKind::PreconditionViolated, "routing needs distinct pair ends");
}

}  // namespace

std::optional<Linkage> NestRouter::route_disc(const Pattern& p) const {
  const Impl& im = *impl_;
  check_route_pattern(p);
  const int t = im.t;
  const int k = static_cast<int>(p.size());
  require(t >= k, ErrorKind::PreconditionViolated, "route_disc needs t >= k");
  for (auto [a, b] : p)
    require(im.outer_rail[a] >= 0 && im.outer_rail[b] >= 0, ErrorKind::PreconditionViolated,
            "terminal is not a rail vertex on the outer cycle");
  if (!feasible_on_disc(p, im.ccw[t - 1])) return std::nullopt;

  Linkage out(k);
  std::vector<int> remaining(k);
  std::iota(remaining.begin(), remaining.end(), 0);
  for (int j = t - 1; !remaining.empty(); --j) {
    const auto& c = im.ccw[j];
    // terminals still waiting, sorted around C_j
    std::vector<std::pair<int, int>> around;  // (position, pair index)
    for (int q : remaining)
      for (int v : {p[q].first, p[q].second}) around.emplace_back(im.pos[j][im.rail_at(im.outer_rail[v], j)], q);
    std::sort(around.begin(), around.end());
    int m = static_cast<int>(around.size());
    int pick = -1, from = -1, to = -1;
    for (int i = 0; i < m && pick < 0; ++i) {
      int nx = (i + 1) % m;
      if (around[i].second == around[nx].second) {
        pick = around[i].second;
        from = around[i].first;
        to = around[nx].first;
      }
    }
    require(pick >= 0, ErrorKind::InvalidLinkage, "no consecutive pair on a feasible disc pattern");
    int ra = im.outer_rail[p[pick].first], rb = im.outer_rail[p[pick].second];
    if (im.rail_at(ra, j) != c[from]) std::swap(ra, rb);
    Path path = im.segment(ra, t - 1, j);
    append(path, arc_interior(c, from, to, 1));
    append(path, im.segment(rb, j, t - 1));
    out[pick] = path;
    remaining.erase(std::find(remaining.begin(), remaining.end(), pick));
  }
  return checked(im.cc.plane.graph, p, out);
}

std::optional<Linkage> NestRouter::route_cylinder(const Pattern& p) const {
  const Impl& im = *impl_;
  check_route_pattern(p);
  const Graph& g = im.cc.plane.graph;
  const int t = im.t;
  const int k = static_cast<int>(p.size());
  require(t >= 2 * k, ErrorKind::PreconditionViolated, "route_cylinder needs t >= 2k");
  require(im.inner_empty, ErrorKind::PreconditionViolated, "route_cylinder needs an empty inner disc");
  // vertex -> (side, rail); side 0 is the outer cuff
  auto term = [&](int v) {
    if (im.outer_rail[v] >= 0) return std::pair{0, im.outer_rail[v]};
    return std::pair{1, im.inner_rail[v]};
  };
  for (auto [a, b] : p)
    for (int v : {a, b})
      require(v >= 0 && v < g.n() && (im.outer_rail[v] >= 0 || im.inner_rail[v] >= 0),
              ErrorKind::PreconditionViolated, "terminal is not a rail end on C_t or C_1");
  if (!feasible_on_cylinder(p, im.ccw[t - 1], im.ccw[0])) return std::nullopt;

  // middle[q] collects the routed part between the current layers
  std::vector<Path> middle(k);
  std::vector<int> remaining(k);
  std::iota(remaining.begin(), remaining.end(), 0);
  int lo = 0, hi = t - 1;
  auto current = [&](int v) { return im.rail_at(term(v).second, term(v).first == 0 ? hi : lo); };
  std::vector<int> pair_of(g.n(), -1);
  for (int q = 0; q < k; ++q) pair_of[p[q].first] = pair_of[p[q].second] = q;

  while (!remaining.empty()) {
    std::vector<char> done(k, 0);
    bool any = false;
    for (int side = 0; side < 2; ++side) {
      int j = side == 0 ? hi : lo;
      const auto& c = im.ccw[j];
      std::vector<std::pair<int, int>> around;  // (position, terminal vertex)
      for (int q : remaining)
        for (int v : {p[q].first, p[q].second})
          if (term(v).first == side) around.emplace_back(im.pos[j][current(v)], v);
      std::sort(around.begin(), around.end());
      int m = static_cast<int>(around.size());
      if (m < 2) continue;
      for (int i = 0; i < m; ++i) {
        int nx = (i + 1) % m;
        int q = pair_of[around[i].second];
        if (q != pair_of[around[nx].second] || done[q]) continue;
        if (term(p[q].first).first != term(p[q].second).first) continue;
        Path path{current(around[i].second)};
        append(path, arc_interior(c, around[i].first, around[nx].first, 1));
        path.push_back(current(around[nx].second));
        if (around[i].second != p[q].first) std::reverse(path.begin(), path.end());
        middle[q] = path;
        done[q] = 1;
        any = true;
      }
    }
    if (any) {
      std::vector<int> keep;
      for (int q : remaining)
        if (!done[q]) keep.push_back(q);
      remaining = keep;
      if (remaining.empty()) break;
      // the rest moves one layer inwards from both cuffs
      --hi;
      ++lo;
      require(lo < hi, ErrorKind::InvalidLinkage, "ran out of layers");
      continue;
    }
    // Only crossing pairs are left, oriented outer -> inner. One of them (the
    // lead) runs down its rail to the middle layer, around it and down the
    // partner's rail; the others are linked by Menger in what remains. Which
    // way the lead turns decides the windings left for the others, so both
    // turns and every lead are tried.
    std::vector<std::pair<int, int>> cross;  // (outer terminal, inner terminal)
    for (int q : remaining) {
      auto [a, b] = p[q];
      require(term(a).first != term(b).first, ErrorKind::InvalidLinkage, "stuck local pair");
      cross.emplace_back(term(a).first == 0 ? a : b, term(a).first == 0 ? b : a);
    }
    const int mid = lo + (hi - lo + 1) / 2 - 1;
    const Graph& band = im.band[lo];
    bool routed = false;
    for (size_t lead = 0; lead < cross.size() && !routed; ++lead) {
      int ra = term(cross[lead].first).second, rb = term(cross[lead].second).second;
      for (int dir : {1, -1}) {
        if (ra == rb && dir == -1) break;
        Path l = im.segment(ra, hi, mid);
        if (ra != rb) {
          const auto& cm = im.ccw[mid];
          append(l, arc_interior(cm, im.pos[mid][im.rail_at(ra, mid)], im.pos[mid][im.rail_at(rb, mid)], dir));
        }
        append(l, im.segment(rb, mid, lo));
        std::vector<char> blocked(g.n(), 0);
        for (int v : l) blocked[v] = 1;
        std::vector<int> xs, ys;
        std::vector<int> pair_at(g.n(), -1);
        for (size_t i = 0; i < cross.size(); ++i) {
          if (i == lead) continue;
          xs.push_back(current(cross[i].first));
          ys.push_back(current(cross[i].second));
          pair_at[xs.back()] = remaining[i];
        }
        std::vector<Path> found;
        if (!xs.empty()) {
          MengerResult mr = menger(band, xs, ys, static_cast<int>(xs.size()), blocked);
          if (!mr.linked) continue;
          bool ends_match = true;
          for (auto path : mr.paths) {
            if (pair_at[path.front()] < 0) std::reverse(path.begin(), path.end());
            auto [a, b] = p[pair_at[path.front()]];
            int inner_end = term(a).first == 0 ? b : a;
            ends_match = ends_match && path.back() == current(inner_end);
            found.push_back(path);
          }
          if (!ends_match) continue;
        }
        int q0 = remaining[lead];
        middle[q0] = l;
        if (p[q0].first != cross[lead].first) std::reverse(middle[q0].begin(), middle[q0].end());
        for (auto& path : found) {
          int q = pair_at[path.front()];
          if (term(p[q].first).first != 0) std::reverse(path.begin(), path.end());
          middle[q] = path;
        }
        routed = true;
        break;
      }
    }
    require(routed, ErrorKind::InvalidLinkage, "no linkage for the remaining crossing pairs");
    break;
  }

  Linkage out(k);
  for (int q = 0; q < k; ++q) {
    auto [a, b] = p[q];
    // rail piece from a terminal to the vertex where its middle part starts
    auto reach = [&](int v, int vertex_on_rail) {
      auto [side, r] = term(v);
      int to = -1;
      for (int j = 0; j < t; ++j)
        if (im.rail_at(r, j) == vertex_on_rail) to = j;
      return im.segment(r, side == 0 ? t - 1 : 0, to);
    };
    Path path = reach(a, middle[q].front());
    append(path, middle[q]);
    auto tail = reach(b, middle[q].back());
    std::reverse(tail.begin(), tail.end());
    append(path, tail);
    out[q] = path;
  }
  return checked(g, p, out);
}

std::optional<Linkage> route_disc(const ConcentricCycles& cc, const std::vector<Path>& rails, const Pattern& p) {
  return NestRouter(cc, rails).route_disc(p);
}

std::optional<Linkage> route_cylinder(const ConcentricCycles& cc, const std::vector<Path>& rails, const Pattern& p) {
  return NestRouter(cc, rails).route_cylinder(p);
}

// ---------------------------------------------------------------------------
// Curve systems

namespace {

long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

bool chords_cross(int a, int b, int c, int d) {
  if (a > b) std::swap(a, b);
  bool c_in = c > a && c < b, d_in = d > a && d < b;
  return c_in != d_in;
}

}  // namespace

bool validate_curve_system(const CurveSystem& cs) {
  const int L = cs.perimeter;
  if (L < 1) return false;
  int cuffs = cs.kind == SurfaceKind::Disc ? 1 : 2;
  std::set<std::pair<int, int>> ends;
  for (const auto& c : cs.curves) {
    for (auto [cuff, pos] : {std::pair{c.cuff_a, c.pos_a}, std::pair{c.cuff_b, c.pos_b}}) {
      if (cuff < 0 || cuff >= cuffs || pos < 0 || pos >= L) return false;
      if (!ends.insert({cuff, pos}).second) return false;
    }
  }
  std::vector<const Curve*> local[2], cross;
  for (const auto& c : cs.curves) {
    if (c.cuff_a == c.cuff_b)
      local[c.cuff_a].push_back(&c);
    else
      cross.push_back(&c);
  }
  for (int cuff = 0; cuff < cuffs; ++cuff) {
    const auto& ls = local[cuff];
    for (size_t i = 0; i < ls.size(); ++i)
      for (size_t j = i + 1; j < ls.size(); ++j)
        if (chords_cross(ls[i]->pos_a, ls[i]->pos_b, ls[j]->pos_a, ls[j]->pos_b)) return false;
    // every crossing curve sits on the same side of each local curve
    for (const Curve* lc : ls) {
      int lo = std::min(lc->pos_a, lc->pos_b), hi = std::max(lc->pos_a, lc->pos_b);
      size_t between = 0;
      for (const Curve* x : cross) {
        int at = cuff == 0 ? x->pos_a : x->pos_b;
        between += at > lo && at < hi;
      }
      if (between != 0 && between != cross.size()) return false;
    }
  }
  for (const Curve* x : cross)
    if (x->cuff_a != 0) return false;
  // lifts (pos_a, 0) -> (pos_b + winding * L, 1) of two disjoint crossing
  // curves differ by less than a full turn at both ends in the same direction
  for (size_t i = 0; i < cross.size(); ++i)
    for (size_t j = i + 1; j < cross.size(); ++j) {
      long da = cross[i]->pos_a - cross[j]->pos_a;
      long db = (cross[i]->pos_b + static_cast<long>(cross[i]->winding) * L) -
                (cross[j]->pos_b + static_cast<long>(cross[j]->winding) * L);
      if (floor_div(da, L) != floor_div(db, L)) return false;
    }
  return true;
}

CurveSystem make_curve_system(SurfaceKind kind, int perimeter, std::vector<Curve> curves) {
  for (auto& c : curves) {
    if (c.cuff_a == c.cuff_b) {
      c.winding = 0;
    } else if (c.cuff_a == 1) {
      std::swap(c.cuff_a, c.cuff_b);
      std::swap(c.pos_a, c.pos_b);
      c.winding = -c.winding;
    }
  }
  CurveSystem cs{kind, perimeter, std::move(curves)};
  require(validate_curve_system(cs), ErrorKind::PreconditionViolated,
          "curves are not pairwise disjoint boundary-to-boundary curves");
  return cs;
}

int homotopy_classes(const CurveSystem& cs) {
  if (cs.curves.empty()) return 0;
  if (cs.kind == SurfaceKind::Disc) return 1;
  bool local[2] = {false, false};
  bool cross = false;
  for (const auto& c : cs.curves) {
    if (c.cuff_a == c.cuff_b)
      local[c.cuff_a] = true;
    else
      cross = true;
  }
  return static_cast<int>(local[0]) + static_cast<int>(local[1]) + static_cast<int>(cross);
}

}  // namespace gm
