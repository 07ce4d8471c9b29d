#include "lll_lab/graph.hpp"

#include <algorithm>
#include <deque>

namespace lll_lab {

void Graph::add_edge(int u, int v) {
  if (u == v) return;
  auto insert_sorted = [](std::vector<int>& list, int x) {
    auto it = std::lower_bound(list.begin(), list.end(), x);
    if (it == list.end() || *it != x) list.insert(it, x);
  };
  insert_sorted(adj_[u], v);
  insert_sorted(adj_[v], u);
}

bool Graph::has_edge(int u, int v) const {
  return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

int Graph::max_degree() const {
  int d = 0;
  for (const auto& list : adj_) d = std::max(d, static_cast<int>(list.size()));
  return d;
}

std::vector<int> Graph::bfs_distances(int src) const {
  std::vector<int> dist(size(), -1);
  std::deque<int> queue;
  dist[src] = 0;
  queue.push_back(src);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : adj_[v]) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

std::vector<std::vector<int>> Graph::connected_components() const {
  std::vector<int> all(size());
  for (int v = 0; v < size(); ++v) all[v] = v;
  return components_of(all);
}

std::vector<std::vector<int>> Graph::components_of(
    const std::vector<int>& vertices) const {
  std::vector<std::vector<int>> out;
  std::vector<char> seen(size(), 0);
  auto inside = [&](int v) {
    return std::binary_search(vertices.begin(), vertices.end(), v);
  };
  for (int start : vertices) {
    if (seen[start]) continue;
    std::vector<int> comp;
    std::deque<int> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      comp.push_back(v);
      for (int w : adj_[v]) {
        if (!seen[w] && inside(w)) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

bool Graph::is_connected_subset(const std::vector<int>& vertices) const {
  if (vertices.empty()) return true;
  return components_of(vertices).size() == 1;
}

}  // namespace lll_lab
