#pragma once

#include <string>
#include <vector>

#include "rp/graph.hpp"

namespace rp {

// Result of iterated color refinement. Color ids are dense, 0-based, and
// canonical: they are assigned by sorting the distinct signatures each
// round, so relabeling the graph relabels colors equivariantly
// (colors_of(permute(g, p))[p(u)] == colors_of(g)[u]).
struct Coloring {
  std::vector<int> colors;            // stable color per vertex
  std::vector<int> counts_per_round;  // distinct colors after each round, [0] = initial
  int rounds = 0;                     // refinement rounds actually executed

  int num_colors() const;
};

// Color refinement: initial colors from the distinct vertex feature rows;
// each round rehashes (own color, sorted multiset of neighbor colors) and
// stops when the number of distinct colors no longer grows (or after
// max_rounds). Neighbors are vertices with edge-indicator 1; edge features
// beyond the indicator do not participate.
Coloring wl_refine(const Graph& g, int max_rounds);
Coloring wl_refine(const Graph& g);  // max_rounds = n

// Canonical refinement transcript: byte string identical for two graphs iff
// refinement cannot tell them apart (same per-round sorted signature
// multisets). Safe to compare across platforms; no hashing involved.
std::string wl_fingerprint(const Graph& g);

}  // namespace rp
