#pragma once

#include <vector>

#include "lll_lab/graph.hpp"

namespace lll_lab {

// A 2-tree of a graph: vertices pairwise at distance >= 2 that form a
// connected set once every pair at distance exactly 2 is joined by an edge.
bool is_two_tree(const Graph& g, const std::vector<int>& vertices);

// All 2-trees of exactly `size` vertices containing v, as sorted vertex
// lists in lexicographic order.
std::vector<std::vector<int>> enumerate_two_trees(const Graph& g, int v,
                                                  int size);

// (e d^2)^(size-1) / 2.  At size 1 the formula gives 1/2 while the true count
// is 1; callers enforce the bound only for size >= 2.
double two_tree_count_bound(int d, int size);

// Greedy 2-tree inside a connected subset h, grown from v by repeatedly
// adding the smallest-id eligible vertex (non-adjacent to the tree, at
// distance exactly 2 from it).  The result has at least |h|/(d+1) vertices
// where d is the maximum degree of g.
std::vector<int> extract_two_tree(const Graph& g, const std::vector<int>& h,
                                  int v);

struct WitnessReport {
  bool pass = true;
  std::vector<int> offending_component;
};

// Checks that every connected component of the subgraph induced on `bad`
// intersects `sym_diff`; on failure reports the first offending component.
WitnessReport component_witness(const Graph& g_c, const std::vector<int>& bad,
                                const std::vector<int>& sym_diff);

// p^(2a/(2+zeta)) * (1 - e p)^(-2(D+1)a): the probability budget for a
// pairwise-disjoint constraint set of size a landing inside the bad set.
double disjoint_prob_bound(int a_size, double p, int D, double zeta);

}  // namespace lll_lab
