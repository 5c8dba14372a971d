#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "gm/graph.hpp"

namespace gm {

// Terminal pairs; {a, a} asks for the single-vertex path a.
using Pattern = std::vector<std::pair<int, int>>;
using Path = std::vector<int>;
using Linkage = std::vector<Path>;

struct LinkageConfig {
  int pair_cap = 4;           // patterns larger than this need |V| <= vertex_cap
  int vertex_cap = 14;
  std::int64_t dfs_budget = 2'000'000;  // DFS nodes before count_linkages switches to the frontier DP
};

bool validate_linkage(const Graph& g, const Linkage& l);
// Pairs with smaller endpoint first, sorted.
Pattern normalize_pattern(Pattern p);
Pattern pattern_of(const Graph& g, const Linkage& l);

std::optional<Linkage> disjoint_paths(const Graph& g, const Pattern& p, const LinkageConfig& cfg = {});

enum class CountMethod { Trivial, Dfs, FrontierDp };
struct LinkageCount {
  std::int64_t count = 0;  // saturates at the limit
  CountMethod method = CountMethod::Trivial;
};
LinkageCount count_linkages_detailed(const Graph& g, const Pattern& p, bool spanning_only, std::int64_t limit,
                                     const LinkageConfig& cfg = {});
std::int64_t count_linkages(const Graph& g, const Pattern& p, bool spanning_only, std::int64_t limit,
                            const LinkageConfig& cfg = {});

// Building blocks, exposed so tests can compare them.
std::int64_t count_linkages_dfs(const Graph& g, const Pattern& p, bool spanning_only, std::int64_t limit,
                                std::int64_t budget, bool* exhausted = nullptr);
std::int64_t count_linkages_frontier(const Graph& g, const Pattern& p, bool spanning_only, std::int64_t limit);

bool is_vital(const Graph& g, const Linkage& l, const LinkageConfig& cfg = {});

// Components of the paths inside the induced subgraph on `keep`, in host ids.
Linkage restrict_linkage(const Graph& g, const std::vector<int>& keep, const Linkage& l);
// Rewrites vertex ids through old_to_new (entries must be >= 0).
Linkage relabel_linkage(const Linkage& l, const std::vector<int>& old_to_new);

struct VitalDeletion {
  Subgraph sub;                // G - v with id maps
  std::vector<int> terminals;  // in new ids, sorted
  Linkage linkage;             // in new ids
};
VitalDeletion vital_after_delete(const Graph& g, const Linkage& l, int v);

// "pair s t" lines; vertices as integers.
Pattern read_pattern(std::istream& is);
void write_pattern(std::ostream& os, const Pattern& p);

}  // namespace gm
