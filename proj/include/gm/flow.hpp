#pragma once

#include <limits>
#include <vector>

namespace gm {

// Edmonds-Karp on a small directed network. BFS scans arcs in insertion
// order, so callers control tie-breaking by the order they add arcs.
class FlowNetwork {
 public:
  static constexpr int kInf = std::numeric_limits<int>::max() / 4;

  explicit FlowNetwork(int nodes) : head_(nodes, -1), tail_(nodes, -1) {}

  int add_node();
  void reserve_arcs(int arcs) {
    arcs_.reserve(2 * static_cast<size_t>(arcs));
    next_.reserve(2 * static_cast<size_t>(arcs));
  }
  // Returns the arc id of the forward arc.
  int add_arc(int from, int to, int cap);
  // Augments until no path exists or `limit` units have been pushed.
  int max_flow(int s, int t, int limit = kInf);
  int flow(int arc) const { return arcs_[arc ^ 1].cap; }
  int residual(int arc) const { return arcs_[arc].cap; }
  // Nodes reachable from s in the residual network.
  std::vector<char> reachable_from(int s) const;
  // Nodes that can reach t in the residual network.
  std::vector<char> reaching(int t) const;

  struct Arc {
    int to;
    int cap;
  };
  int nodes() const { return static_cast<int>(head_.size()); }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  const Arc& arc(int id) const { return arcs_[id]; }
  // Arcs leaving v in insertion order: first_arc(v), next_arc(id), ... until -1.
  int first_arc(int v) const { return head_[v]; }
  int next_arc(int id) const { return next_[id]; }

 private:
  void link(int from, int id);

  std::vector<int> head_, tail_, next_;
  std::vector<Arc> arcs_;
};

}  // namespace gm
