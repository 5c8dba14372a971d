#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gm/constructions.hpp"
#include "gm/graph.hpp"
#include "gm/linkage.hpp"

namespace gm {

// Graph with a rotation system: rotation[v] lists the neighbours of v in
// counter-clockwise order. The outer face is the face to the left of the
// dart outer_u -> outer_v.
struct PlaneGraph {
  Graph graph;
  std::vector<std::vector<int>> rotation;
  int outer_u = -1;
  int outer_v = -1;
};

struct Faces {
  std::vector<std::vector<int>> boundary;  // vertex walk of each face
  std::vector<std::vector<int>> dart_face;  // [v][i]: face left of v -> rotation[v][i]
  int outer = -1;

  int face_of(const PlaneGraph& pg, int u, int v) const;
};

Faces trace_faces(const PlaneGraph& pg);
// V - E + F = 2 for every component that has an edge.
bool satisfies_euler(const PlaneGraph& pg);
// Validates the rotation (a permutation of each neighbourhood), the outer dart and planarity.
PlaneGraph make_plane_graph(const Graph& g, std::vector<std::vector<int>> rotation, int outer_u, int outer_v);
// Rotation from a straight-line drawing; the outer face is the one with negative area.
PlaneGraph plane_graph_from_positions(const Graph& g, const std::vector<double>& x, const std::vector<double>& y);

// Edge list, then "rot v n1 n2 ..." for each vertex and "outer u v".
void write_plane_graph(std::ostream& os, const PlaneGraph& pg);
PlaneGraph read_plane_graph(std::istream& is);

// Faces (other than the outer one) enclosed by a cycle of the graph, sorted.
std::vector<int> disc_faces(const PlaneGraph& pg, const Faces& f, const std::vector<int>& cycle);

// C_1 (innermost) ... C_s (outermost) in a plane graph.
struct ConcentricCycles {
  PlaneGraph plane;
  std::vector<std::vector<int>> cycles;
};

// Cycles are cycles of the graph, pairwise disjoint, and each C_i lies strictly inside the disc of C_{i+1}.
bool validate_concentric(const ConcentricCycles& cc);
// No grounded C_i-path through the band between C_{i-1} and C_i (the whole disc for i = 1).
bool is_tight(const ConcentricCycles& cc);
ConcentricCycles tighten(const ConcentricCycles& cc);

// Cylindrical mesh drawn with C_1 at the centre (hub inside it when present).
ConcentricCycles mesh_nest(const CylindricalMesh& mesh);

// s-well: concentric cycles plus boundary-to-boundary paths inside the disc
// bounded by `boundary` (a cycle of the plane graph in cyclic order). The
// well's own graph is the union of the cycles and the paths.
struct Well {
  ConcentricCycles nest;
  std::vector<int> boundary;
  std::vector<Path> paths;
};

bool validate_well(const Well& w);
// |E(C ∪ P)| counted on the well's own graph.
int well_edge_count(const Well& w);
// Tightness of the cycles measured in the well's own graph.
bool is_tight_well(const Well& w);
bool is_drained(const Well& w);
bool is_dry(const Well& w);
// Rewrites paths along cycle arcs until drained; endpoints and path count are kept.
Well drain(const Well& w);
// Requires a tight well (NotTight otherwise).
Well dry(const Well& w);
// Faces of Δ_P: the side of P away from the innermost cycle.
std::vector<int> path_interior(const Well& w, int path_index);

// Cylindrical grid with s cycles and a boundary ring of `perimeter` vertices;
// up to `max_paths` non-crossing paths with random dips and bounces. Vertex
// (level, p) has id (level - 1) * perimeter + p and sits at radius `level`,
// angle 2πp / perimeter; level s + 1 is the boundary.
Well random_well(int s, int perimeter, int max_paths, std::mt19937_64& rng);
std::string well_json(const Well& w);

// Pairs must be a non-crossing matching of the cyclic order.
bool feasible_on_disc(const Pattern& p, const std::vector<int>& boundary_order);
// Terminals on two boundary cycles, both listed counter-clockwise.
bool feasible_on_cylinder(const Pattern& p, const std::vector<int>& outer_order, const std::vector<int>& inner_order);

// Rails: disjoint paths meeting every cycle exactly once. Terminals are the
// rails' vertices on the outer cycle C_t. The linkage stays on layers
// t .. t-k+1 and so avoids the open disc of C_1.
std::optional<Linkage> route_disc(const ConcentricCycles& cc, const std::vector<Path>& rails, const Pattern& p);
// Terminals are rail vertices on C_t or C_1; needs t >= 2k and nothing strictly inside C_1.
std::optional<Linkage> route_cylinder(const ConcentricCycles& cc, const std::vector<Path>& rails, const Pattern& p);

// Validates and indexes a nest with rails once, then routes any number of patterns.
class NestRouter {
 public:
  NestRouter(const ConcentricCycles& cc, const std::vector<Path>& rails);
  std::optional<Linkage> route_disc(const Pattern& p) const;
  std::optional<Linkage> route_cylinder(const Pattern& p) const;
  // C_t and C_1 in counter-clockwise order.
  const std::vector<int>& outer_order() const;
  const std::vector<int>& inner_order() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

enum class SurfaceKind { Disc, Cylinder };

// Boundary-to-boundary curve. Positions lie in [0, perimeter) on each cuff
// (cuff 0 for the disc). A crossing curve on the cylinder runs from cuff 0
// to cuff 1 and its lift to the universal cover ends at pos_b + winding * perimeter.
struct Curve {
  int cuff_a = 0;
  int pos_a = 0;
  int cuff_b = 0;
  int pos_b = 0;
  int winding = 0;
};

struct CurveSystem {
  SurfaceKind kind = SurfaceKind::Disc;
  int perimeter = 0;
  std::vector<Curve> curves;
};

// Orients crossing curves from cuff 0 and checks disjointness; PreconditionViolated otherwise.
CurveSystem make_curve_system(SurfaceKind kind, int perimeter, std::vector<Curve> curves);
bool validate_curve_system(const CurveSystem& cs);
int homotopy_classes(const CurveSystem& cs);

}  // namespace gm
