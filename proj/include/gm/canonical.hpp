#pragma once

#include <string>
#include <vector>

#include "gm/graph.hpp"

namespace gm {

// Byte string identifying a rooted graph up to root-preserving isomorphism.
using CanonicalCode = std::string;

struct CanonicalForm {
  CanonicalCode code;
  std::vector<int> label;  // vertex -> canonical index
};

// Largest graph accepted by canonical labelling.
inline constexpr int kCanonicalCap = 40;

// Root positions act as initial colours, so roots are fixed pointwise.
CanonicalForm canonical_form(const Graph& g, const std::vector<int>& roots = {},
                             const std::vector<int>& colors = {});
CanonicalCode canonical_code(const RootedGraph& rg);
CanonicalCode canonical_code(const Graph& g);
RootedGraph decode_code(const CanonicalCode& code);
bool isomorphic(const Graph& a, const Graph& b);

// Orbits of the automorphism group fixing `roots`, as a representative per vertex.
std::vector<int> automorphism_orbits(const Graph& g, const std::vector<int>& roots = {});

std::string code_to_hex(const CanonicalCode& code);
CanonicalCode code_from_hex(const std::string& hex);

}  // namespace gm
