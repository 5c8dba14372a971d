#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gm/graph.hpp"
#include "gm/minor.hpp"

namespace gm {

struct TreeDecomposition {
  Graph tree;
  std::vector<std::vector<int>> bags;  // sorted
};

struct TdCheck {
  bool valid = false;
  int width = -1;
  int adhesion = 0;
};
TdCheck validate_td(const Graph& g, const TreeDecomposition& td);

// Decomposition built from an elimination ordering (first eliminated first).
TreeDecomposition td_from_elimination(const Graph& g, const std::vector<int>& order);
// Path decomposition whose i-th bag holds order[i] and every earlier vertex
// that still has a neighbour at position >= i.
TreeDecomposition pd_from_ordering(const Graph& g, const std::vector<int>& order);

inline constexpr int kExactTreewidthCap = 20;

struct TreewidthResult {
  bool above = false;  // true when treewidth exceeds the supplied upper bound
  int width = -1;      // exact, or a lower bound above `upper` when `above`
  TreeDecomposition td;
};
// Exact treewidth by subset dynamic programming (n <= 20) or forest fast path.
TreewidthResult exact_treewidth(const Graph& g, int upper = 1 << 30);
int exact_pathwidth(const Graph& g, std::vector<int>* order = nullptr);

std::vector<int> min_fill_ordering(const Graph& g);
TreeDecomposition heuristic_td(const Graph& g);
// Cheap lower bounds: degeneracy and minor-min-width.
int degeneracy(const Graph& g);
int minor_min_width(const Graph& g);

// Bramble: connected vertex sets that pairwise touch.
using Bramble = std::vector<std::vector<int>>;
bool validate_bramble(const Graph& g, const Bramble& b);
// Smallest set meeting every element (exhaustive).
int bramble_order(const Graph& g, const Bramble& b);
// Search for a bramble of order >= target over connected sets (n <= 10).
std::optional<Bramble> find_bramble(const Graph& g, int target);

// Host vertex for every grid cell, row-major.
using GridEmbedding = std::vector<int>;
std::optional<GridEmbedding> find_grid_subgraph(const Graph& g, int rows, int cols);
bool validate_grid_subgraph(const Graph& g, int rows, int cols, const GridEmbedding& emb);

enum class LowerCertificateKind { GridSubgraph, Bramble, GridMinor };

struct TreewidthCertificates {
  LowerCertificateKind lower_kind = LowerCertificateKind::GridSubgraph;
  GridEmbedding grid;  // GridSubgraph
  Bramble bramble;     // Bramble
  MinorModel minor;    // GridMinor
  TreeDecomposition upper;
};
// Lower certificate for tw >= n and a path decomposition of width <= n.
TreewidthCertificates treewidth_certificates(const Graph& g, int n, const MinorConfig& cfg = {});
bool validate_certificates(const Graph& g, int n, const TreewidthCertificates& c);

enum class NiceKind { Leaf, Introduce, Forget, Join };

struct NiceNode {
  NiceKind kind = NiceKind::Leaf;
  int vertex = -1;  // introduced or forgotten vertex
  std::vector<int> bag;
  std::vector<int> children;
};

struct NiceDecomposition {
  std::vector<NiceNode> nodes;
  int root = -1;
  TreeDecomposition as_td() const;
};
// Rooted at `root`; the root keeps its original bag.
NiceDecomposition nice_form(const Graph& g, const TreeDecomposition& td, int root = 0);
bool check_nice(const NiceDecomposition& nd);

// `.td` text with 1-based bag ids and vertices.
void write_td(std::ostream& os, const TreeDecomposition& td, int n);
TreeDecomposition read_td(std::istream& is, int* n_out = nullptr);

}  // namespace gm
