#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gm/error.hpp"

namespace gm {

using Mask = std::uint64_t;
using Edge = std::pair<int, int>;

inline int popcount(Mask m) { return __builtin_popcountll(m); }
inline int lowest(Mask m) { return __builtin_ctzll(m); }
inline Mask bit(int v) { return Mask{1} << v; }

// Calls f(v) for every set bit of m in increasing order.
template <class F>
void for_each_bit(Mask m, F&& f) {
  while (m) {
    int v = lowest(m);
    m &= m - 1;
    f(v);
  }
}

// Simple undirected graph on vertices 0..n-1. Immutable once built; every
// mutating helper returns a fresh graph.
class Graph {
 public:
  Graph() = default;

  int n() const { return static_cast<int>(adj_.size()); }
  int m() const { return static_cast<int>(edges_.size()); }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  bool adjacent(int u, int v) const;
  // Sorted list of edges (u, v) with u < v.
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(int v) const;

  // Adjacency bitmask; only available for n <= 64.
  bool has_masks() const { return !masks_.empty() || adj_.empty(); }
  Mask mask(int v) const { return masks_[v]; }
  Mask all() const { return n() >= 64 ? ~Mask{0} : (bit(n()) - 1); }

  friend Graph build_graph(int n, std::vector<Edge> edges, std::vector<std::string> labels);

 private:
  std::vector<std::vector<int>> adj_;
  std::vector<Edge> edges_;
  std::vector<std::string> labels_;
  std::vector<Mask> masks_;
};

// Graph plus a red/annotated vertex set.
struct AnnotatedGraph {
  Graph graph;
  std::vector<int> annotated;
};

// Graph plus an ordered root sequence; repetitions allowed.
struct RootedGraph {
  Graph graph;
  std::vector<int> roots;
};

// Rejects self-loops and out-of-range endpoints; parallel edges collapse.
Graph build_graph(int n, std::vector<Edge> edges, std::vector<std::string> labels = {});

struct Subgraph {
  Graph graph;
  std::vector<int> old_to_new;  // -1 for dropped vertices
  std::vector<int> new_to_old;
};

Subgraph induced_subgraph(const Graph& g, const std::vector<int>& keep);
Subgraph delete_vertices(const Graph& g, const std::vector<int>& drop);
Graph add_edges(const Graph& g, const std::vector<Edge>& extra);
Graph remove_edges(const Graph& g, const std::vector<Edge>& drop);
// Disjoint union, second graph shifted by a.n().
Graph disjoint_union(const Graph& a, const Graph& b);

std::vector<std::vector<int>> connected_components(const Graph& g);
bool is_connected(const Graph& g);
// Connectivity of the subgraph induced by `set` (n <= 64).
bool mask_connected(const Graph& g, Mask set);
Mask mask_component(const Graph& g, Mask within, int start);
std::vector<int> bfs_distances(const Graph& g, const std::vector<int>& sources);
// Shortest path inside `allowed`, neighbours visited in index order; empty if none.
std::vector<int> shortest_path(const Graph& g, int s, int t, const std::vector<char>& allowed);

// Maximal 2-connected pieces (at least three vertices) and bridges, which
// together partition E. Isolated vertices belong to neither.
struct BlockDecomposition {
  std::vector<std::vector<int>> blocks;  // sorted vertex lists
  std::vector<std::vector<Edge>> block_edges;
  std::vector<Edge> bridges;
  std::vector<int> cut_vertices;
};
BlockDecomposition blocks(const Graph& g);

// (A, B) with A ∪ B = V and no edge between A∖B and B∖A.
struct Separation {
  std::vector<int> a;
  std::vector<int> b;
  int order() const;
};
bool verify_separation(const Graph& g, const Separation& sep);

struct MengerResult {
  bool linked = false;
  int order = 0;
  std::vector<std::vector<int>> paths;  // vertex-disjoint X-Y paths
  Separation separation;                // set when not linked
};
// Either k vertex-disjoint X-Y paths or a separation of order < k with X ⊆ A, Y ⊆ B.
// Vertices flagged in `blocked` are treated as deleted: paths avoid them and
// a separation may place them in A ∩ B on top of its `order` unblocked ones.
MengerResult menger(const Graph& g, const std::vector<int>& x, const std::vector<int>& y, int k,
                    const std::vector<char>& blocked = {});
int max_disjoint_paths(const Graph& g, const std::vector<int>& x, const std::vector<int>& y);

// Edge-list text: "n m", then m lines "u v", optional "# label v name" lines.
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);
Graph read_edge_list_file(const std::string& path);
void write_edge_list_file(const std::string& path, const Graph& g);
void write_dot(std::ostream& os, const Graph& g, const std::string& name = "G");

}  // namespace gm
