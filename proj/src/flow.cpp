#include "gm/flow.hpp"

#include <algorithm>
#include <queue>

namespace gm {

int FlowNetwork::add_node() {
  head_.push_back(-1);
  tail_.push_back(-1);
  return nodes() - 1;
}

void FlowNetwork::link(int from, int id) {
  next_.push_back(-1);
  if (tail_[from] < 0)
    head_[from] = id;
  else
    next_[tail_[from]] = id;
  tail_[from] = id;
}

int FlowNetwork::add_arc(int from, int to, int cap) {
  int id = static_cast<int>(arcs_.size());
  arcs_.push_back({to, cap});
  arcs_.push_back({from, 0});
  link(from, id);
  link(to, id + 1);
  return id;
}

int FlowNetwork::max_flow(int s, int t, int limit) {
  int total = 0;
  std::vector<int> via(nodes());
  while (total < limit) {
    std::fill(via.begin(), via.end(), -1);
    std::queue<int> q;
    q.push(s);
    via[s] = -2;
    while (!q.empty() && via[t] == -1) {
      int u = q.front();
      q.pop();
      for (int id = head_[u]; id >= 0; id = next_[id]) {
        const Arc& a = arcs_[id];
        if (a.cap > 0 && via[a.to] == -1) {
          via[a.to] = id;
          q.push(a.to);
        }
      }
    }
    if (via[t] == -1) break;
    int push = limit - total;
    for (int v = t; v != s; v = arcs_[via[v] ^ 1].to) push = std::min(push, arcs_[via[v]].cap);
    for (int v = t; v != s; v = arcs_[via[v] ^ 1].to) {
      arcs_[via[v]].cap -= push;
      arcs_[via[v] ^ 1].cap += push;
    }
    total += push;
  }
  return total;
}

std::vector<char> FlowNetwork::reachable_from(int s) const {
  std::vector<char> seen(nodes(), 0);
  std::vector<int> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int id = head_[u]; id >= 0; id = next_[id]) {
      const Arc& a = arcs_[id];
      if (a.cap > 0 && !seen[a.to]) {
        seen[a.to] = 1;
        stack.push_back(a.to);
      }
    }
  }
  return seen;
}

std::vector<char> FlowNetwork::reaching(int t) const {
  std::vector<char> seen(nodes(), 0);
  std::vector<int> stack{t};
  seen[t] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    // u can reach v if the arc u->v has residual capacity; arc id^1 is v->u.
    for (int id = head_[v]; id >= 0; id = next_[id]) {
      int u = arcs_[id].to;
      if (arcs_[id ^ 1].cap > 0 && !seen[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  return seen;
}

}  // namespace gm
