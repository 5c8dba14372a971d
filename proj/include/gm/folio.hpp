#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gm/canonical.hpp"
#include "gm/decomposition.hpp"
#include "gm/graph.hpp"
#include "gm/minor.hpp"

namespace gm {

// Set of rooted patterns of detail <= d, each stored by canonical code. The
// root sequence of a member has the same length k as the host's.
struct Folio {
  int k = 0;
  int d = 0;
  std::set<CanonicalCode> members;

  bool contains(const CanonicalCode& code) const { return members.count(code) > 0; }
  bool contains(const RootedGraph& rg) const;
  size_t size() const { return members.size(); }
  bool operator==(const Folio& o) const { return k == o.k && d == o.d && members == o.members; }
  bool operator!=(const Folio& o) const { return !(*this == o); }
};

// max(vertices outside the root set, edges); repeated roots count once.
int detail(const RootedGraph& rg);

enum class FolioEngine { Oracle, Dp };

struct FolioConfig {
  int oracle_vertex_cap = 12;
  int oracle_detail_cap = 3;
  int oracle_root_cap = 4;
  std::int64_t state_budget = 4'000'000;  // DP states summed over all nodes
  std::int64_t multiset_budget = 4096;    // root tuples in kd_folio
  int threads = 1;
  MinorConfig minor;
};

// Every rooted pattern with at most |roots| + d vertices and detail <= d,
// kept when a rooted minor search in `host` succeeds.
Folio folio_bruteforce(const RootedGraph& host, int d, const FolioConfig& cfg = {});

// Dynamic program over a nice form of `td`: a state assigns bag vertices to
// branch-set pieces and records the partial pattern built so far.
Folio folio_dp(const RootedGraph& host, int d, const TreeDecomposition& td, const FolioConfig& cfg = {});

// folio_dp with an exact decomposition when |V| <= 20, min-fill otherwise.
Folio folio_dp_auto(const RootedGraph& host, int d, const FolioConfig& cfg = {});

// Union of the d-folios over all |R|^k ordered root tuples drawn from R.
Folio kd_folio(const AnnotatedGraph& host, int k, int d, FolioEngine engine = FolioEngine::Oracle,
               const FolioConfig& cfg = {});

// Deleting v keeps every d-folio over root tuples from R.
bool strongly_irrelevant(const AnnotatedGraph& host, int k, int d, int v, const FolioConfig& cfg = {},
                         FolioEngine engine = FolioEngine::Oracle);

// Rooted graph encoding of k disjoint paths: x_1 x_1 x_2 x_2 ... with no edges.
RootedGraph paths_pattern(int k);

// JSON list of {code, vertices, edges, root_map, detail}, ordered by code bytes.
std::string folio_json(const Folio& f);

}  // namespace gm
