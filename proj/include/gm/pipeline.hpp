#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gm/folio.hpp"
#include "gm/graph.hpp"
#include "gm/minor.hpp"

namespace gm {

struct CliqueMinorResult {
  std::optional<MinorModel> model;
  // "density" (minimal dense minor), "clique" (a K_t subgraph), or why nothing was found.
  std::string source;
};

// K_t model from a minimal minor with at least 2^(t-3)|V| edges when the
// input is that dense, otherwise from a K_t subgraph if one exists.
CliqueMinorResult dense_clique_minor(const Graph& g, int t);

// Smallest clique order that makes the clique rule sound: floor(5l/2) + 3d^2 + 1.
int clique_rule_order(int l, int d);

// With Z = R: among branch sets avoiding Z, a minimum-order separation
// (A, B) with Z in A, the branch set in B \ A and A maximal. Returns the
// smallest vertex of B \ A, or nothing when every branch set meets Z.
std::optional<int> clique_irrelevant_vertex(const AnnotatedGraph& host, int d, const MinorModel& model);

enum class RuleSet { Oracle, CliqueRule, Both };
// Oracle engine for the per-vertex irrelevance test; Auto uses brute force
// when the host fits the folio oracle caps and the DP otherwise.
enum class IrrelevanceEngine { Auto, Oracle, Dp };

struct PipelineConfig {
  int treewidth_threshold = 4;
  RuleSet rules = RuleSet::Both;
  IrrelevanceEngine engine = IrrelevanceEngine::Auto;
  FolioConfig folio;
  int threads = 1;
};

enum class ReductionStatus { ThresholdMet, Stuck };

struct Deletion {
  int vertex = -1;            // id in the input graph
  std::string justification;  // "clique-rule" or "oracle"
};

// Exact (n <= 20), a lower bound already above the threshold, or a min-fill upper bound.
enum class WidthKind { Exact, LowerBound, UpperBound };
std::string width_kind_name(WidthKind k);

struct TreewidthEvidence {
  int width = -1;
  WidthKind kind = WidthKind::Exact;
};

struct ReductionTrace {
  std::vector<Deletion> deletions;
  AnnotatedGraph final_graph;
  std::vector<int> final_to_input;  // final vertex id -> input vertex id
  TreewidthEvidence treewidth;
  ReductionStatus status = ReductionStatus::Stuck;
};

struct ReductionResult {
  AnnotatedGraph reduced;
  ReductionTrace trace;
};

// One certified deletion per round until the treewidth threshold is met or
// neither rule finds a vertex.
ReductionResult reduce(const AnnotatedGraph& host, int k, int d, const PipelineConfig& cfg = {});

// Deletes the trace's vertices from `input`; equals the trace's final graph when the trace is sound.
AnnotatedGraph replay(const AnnotatedGraph& input, const ReductionTrace& trace);

// reduce, then the DP folio of what is left.
Folio solve_folio(const AnnotatedGraph& host, int k, int d, const PipelineConfig& cfg = {},
                  ReductionTrace* trace = nullptr);

std::string trace_json(const ReductionTrace& trace);

}  // namespace gm
