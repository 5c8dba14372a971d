#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gm/graph.hpp"

namespace gm {

// Branch set per pattern vertex.
using MinorModel = std::vector<std::vector<int>>;

struct MinorConfig {
  int pattern_cap = 12;  // largest pattern searched before SearchCapExceeded
  int host_cap = 64;     // bitmask engine limit
};

bool verify_minor_model(const Graph& host, const Graph& pattern, const MinorModel& model);
bool verify_rooted_model(const RootedGraph& host, const RootedGraph& pattern, const MinorModel& model);
bool verify_red_model(const AnnotatedGraph& host, const Graph& pattern, const MinorModel& model);

std::optional<MinorModel> find_minor(const Graph& host, const Graph& pattern, const MinorConfig& cfg = {});
std::optional<MinorModel> find_rooted_minor(const RootedGraph& host, const RootedGraph& pattern,
                                            const MinorConfig& cfg = {});
std::optional<MinorModel> find_red_minor(const AnnotatedGraph& host, const Graph& pattern,
                                         const MinorConfig& cfg = {});

// Largest k <= cap such that the k x k grid is an R-minor.
int bidim(const AnnotatedGraph& host, int cap, const MinorConfig& cfg = {});

// Row-major k x m grid used as a minor pattern.
Graph grid_pattern(int rows, int cols);

}  // namespace gm
