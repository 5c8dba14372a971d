#pragma once

#include <vector>

#include "gm/canonical.hpp"
#include "gm/graph.hpp"
#include "gm/linkage.hpp"

namespace gm {

// n rows, m columns; vertex (r, c) is r * m + c, row 0 on top.
Graph grid(int n, int m);

struct WallSpec {
  int order = 0;
  Graph graph;  // on the n x 2n grid's vertex numbering
  std::vector<std::vector<int>> rows;  // horizontal paths, top to bottom
  std::vector<int> perimeter;          // boundary cycle (empty when order 1)
};
WallSpec wall(int n);
bool validate_wall(const WallSpec& w);

// Cycles C_1 (innermost) .. C_m and rails P_1 .. P_n. Each cycle lists its
// vertices in cyclic order; each rail runs from C_1 to C_m.
struct CylindricalMesh {
  Graph graph;
  std::vector<std::vector<int>> cycles;
  std::vector<std::vector<int>> rails;
  int hub = -1;  // optional vertex inside C_1 joined to all of C_1
};
// n rails, m cycles. Cycles get extra unrailed vertices when n < 3.
CylindricalMesh cylindrical_mesh(int n, int m, bool hub = false);
bool validate_mesh(const CylindricalMesh& mesh);

// w circles, r rails; on inner circles each rail runs along two circle vertices.
struct RailedAnnulus {
  Graph graph;
  std::vector<std::vector<int>> circles;
  std::vector<std::vector<int>> rails;
};
RailedAnnulus railed_annulus(int w, int r);
bool validate_railed_annulus(const RailedAnnulus& a);

struct GammaInstance {
  int k = 0;
  int m = 0;  // 2^k - 1
  Graph graph;
  std::vector<int> left;   // v_1 .. v_m (index i-1)
  std::vector<int> right;  // u_1 .. u_m
  Pattern pattern;         // (s_i, t_i) in order i = 1..k
  std::vector<int> terminals;
  Linkage witness;  // path i joins s_i to t_i
};
// Validates the witness with is_vital when k <= 3 and `self_check` is set.
GammaInstance gamma_hat(int k, bool self_check = true);

// s x s(2s+1) grid with top-row chords; annotated set A_s.
AnnotatedGraph z_graph(int s);

struct GadgetFamily {
  int n = 0;
  std::vector<Graph> members;  // sorted by canonical code
  std::vector<CanonicalCode> codes;
};
// Every connected d-regular graph on n vertices up to isomorphism (n <= 10).
std::vector<Graph> connected_regular_graphs(int n, int d);
GadgetFamily regular_gadgets(int k);

// A gadget with two extra vertices joined to all of it; ids 0..n-1 gadget,
// n the attachment vertex, n+1 its twin.
Graph gadget_block(const Graph& gadget);

struct HGraph {
  Graph graph;
  std::vector<int> s, t;  // the bridge ends per pair
};
HGraph h_graph(int k, const GadgetFamily& fam);

struct DecoratedGamma {
  GammaInstance core;  // core vertex ids are kept as 0..m*m-1
  Graph graph;
  std::vector<std::vector<int>> gadget_s, gadget_t;  // gadget copies at s_i and t_i
  std::vector<int> s_twin, t_twin;                   // s_i', t_i'
};
DecoratedGamma decorate_gamma(int k, const GadgetFamily& fam);

// Planarity by excluded K5 / K3,3 minors; intended for blocks of at most ~12 vertices.
bool planar_by_minors(const Graph& g);

struct HkDeletionReport {
  bool minor_present = false;
  bool per_vertex_absent = false;
  std::vector<int> present_after;  // vertices whose deletion left H_k as a minor
  int vertices_checked = 0;
  int decided_by_blocks = 0;  // deletions refuted by the block count alone
  int decided_by_paths = 0;   // deletions refuted by the disjoint-paths query
};
HkDeletionReport verify_hk_deletion(int k, const GadgetFamily& fam);

}  // namespace gm
