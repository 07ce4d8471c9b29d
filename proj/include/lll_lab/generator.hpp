#pragma once

#include <cstdint>

#include "lll_lab/csp.hpp"
#include "lll_lab/graph.hpp"

namespace lll_lab {

// Random satisfiable instance: n uniform q-ary variables and m distinct
// atomic constraints of width k with random scopes and forbidden
// assignments.  Unsatisfiable draws are rejected and redrawn; the result is
// a pure function of the arguments.
AtomicCsp gen_uniform_atomic(int n, int q, int k, int m, std::uint64_t seed);

// Random graph on n vertices with every degree at most max_degree, grown by
// scanning a seeded shuffle of all vertex pairs until target_edges edges are
// placed or no pair remains legal.
Graph gen_capped_graph(int n, int max_degree, int target_edges,
                       std::uint64_t seed);

}  // namespace lll_lab
