#pragma once

#include <vector>

namespace lll_lab {

// Small undirected graph with sorted adjacency lists.  Used for constraint
// dependency graphs and for the combinatorial sweeps.
class Graph {
 public:
  explicit Graph(int n) : adj_(n) {}

  int size() const { return static_cast<int>(adj_.size()); }
  void add_edge(int u, int v);
  bool has_edge(int u, int v) const;
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  int max_degree() const;

  // BFS distances from src; -1 for unreachable vertices.
  std::vector<int> bfs_distances(int src) const;

  std::vector<std::vector<int>> connected_components() const;

  // Connected components of the induced subgraph on `vertices` (which must be
  // sorted, duplicate-free ids of this graph); components are reported as
  // sorted vertex lists of the original graph.
  std::vector<std::vector<int>> components_of(const std::vector<int>& vertices) const;

  bool is_connected_subset(const std::vector<int>& vertices) const;

 private:
  std::vector<std::vector<int>> adj_;
};

}  // namespace lll_lab
