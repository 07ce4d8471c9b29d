#include "lll_lab/structure.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lll_lab/errors.hpp"

namespace lll_lab {

namespace {

// All-pairs distances via one BFS per vertex; -1 marks unreachable.
std::vector<std::vector<int>> all_distances(const Graph& g) {
  std::vector<std::vector<int>> d;
  d.reserve(g.size());
  for (int v = 0; v < g.size(); ++v) d.push_back(g.bfs_distances(v));
  return d;
}

}  // namespace

bool is_two_tree(const Graph& g, const std::vector<int>& vertices) {
  for (int v : vertices) {
    if (v < 0 || v >= g.size()) return false;
  }
  std::vector<int> w = vertices;
  std::sort(w.begin(), w.end());
  if (std::adjacent_find(w.begin(), w.end()) != w.end()) return false;
  if (w.empty()) return false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      if (g.has_edge(w[i], w[j])) return false;
    }
  }
  // Connectivity of the distance-2 closure.
  std::vector<std::vector<int>> dist;
  dist.reserve(w.size());
  for (int v : w) dist.push_back(g.bfs_distances(v));
  std::vector<bool> seen(w.size(), false);
  std::vector<std::size_t> stack = {0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (!seen[j] && dist[i][w[j]] == 2) {
        seen[j] = true;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  return reached == w.size();
}

std::vector<std::vector<int>> enumerate_two_trees(const Graph& g, int v,
                                                  int size) {
  if (v < 0 || v >= g.size()) {
    throw ArgumentError("root vertex " + std::to_string(v) + " out of range");
  }
  if (size < 1) throw ArgumentError("2-tree size must be at least one");
  const auto dist = all_distances(g);
  std::set<std::vector<int>> layer = {{v}};
  for (int step = 1; step < size; ++step) {
    std::set<std::vector<int>> next;
    for (const auto& w : layer) {
      for (int u = 0; u < g.size(); ++u) {
        if (std::binary_search(w.begin(), w.end(), u)) continue;
        bool independent = true;
        bool linked = false;
        for (int t : w) {
          const int d = dist[t][u];
          if (d >= 0 && d < 2) {
            independent = false;
            break;
          }
          if (d == 2) linked = true;
        }
        if (!independent || !linked) continue;
        std::vector<int> grown = w;
        grown.insert(std::lower_bound(grown.begin(), grown.end(), u), u);
        next.insert(std::move(grown));
      }
    }
    layer = std::move(next);
  }
  return {layer.begin(), layer.end()};
}

double two_tree_count_bound(int d, int size) {
  if (d < 0) throw ArgumentError("degree bound must be nonnegative");
  if (size < 1) throw ArgumentError("2-tree size must be at least one");
  const double base = std::exp(1.0) * static_cast<double>(d) * d;
  return std::pow(base, size - 1) / 2.0;
}

std::vector<int> extract_two_tree(const Graph& g, const std::vector<int>& h,
                                  int v) {
  std::vector<int> sub = h;
  std::sort(sub.begin(), sub.end());
  sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
  for (int u : sub) {
    if (u < 0 || u >= g.size()) {
      throw ArgumentError("subset vertex " + std::to_string(u) + " out of range");
    }
  }
  if (!std::binary_search(sub.begin(), sub.end(), v)) {
    throw ArgumentError("anchor vertex must belong to the subset");
  }
  if (!g.is_connected_subset(sub)) {
    throw ArgumentError("subset must be connected for 2-tree extraction");
  }
  const auto dist = all_distances(g);
  std::vector<int> tree = {v};
  while (true) {
    int pick = -1;
    for (int u : sub) {
      if (std::binary_search(tree.begin(), tree.end(), u)) continue;
      bool independent = true;
      bool linked = false;
      for (int t : tree) {
        const int d = dist[t][u];
        if (d >= 0 && d < 2) {
          independent = false;
          break;
        }
        if (d == 2) linked = true;
      }
      if (independent && linked) {
        pick = u;
        break;
      }
    }
    if (pick < 0) break;
    tree.insert(std::lower_bound(tree.begin(), tree.end(), pick), pick);
  }
  return tree;
}

WitnessReport component_witness(const Graph& g_c, const std::vector<int>& bad,
                                const std::vector<int>& sym_diff) {
  std::vector<int> b = bad;
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  for (int c : b) {
    if (c < 0 || c >= g_c.size()) {
      throw ArgumentError("bad-set vertex " + std::to_string(c) + " out of range");
    }
  }
  std::vector<int> diff = sym_diff;
  std::sort(diff.begin(), diff.end());
  WitnessReport report;
  for (const auto& comp : g_c.components_of(b)) {
    bool meets = false;
    for (int c : comp) {
      if (std::binary_search(diff.begin(), diff.end(), c)) {
        meets = true;
        break;
      }
    }
    if (!meets) {
      report.pass = false;
      report.offending_component = comp;
      return report;
    }
  }
  return report;
}

double disjoint_prob_bound(int a_size, double p, int D, double zeta) {
  if (a_size < 0) throw ArgumentError("set size must be nonnegative");
  if (!(p > 0) || !(p < 1)) {
    throw ArgumentError("violation probability must lie in (0,1)");
  }
  if (D < 0) throw ArgumentError("dependency degree must be nonnegative");
  if (!(zeta > 0)) throw ArgumentError("zeta must be positive");
  const double ep = std::exp(1.0) * p;
  if (ep >= 1) {
    throw ArgumentError("bound requires e*p < 1 (got e*p = " +
                        std::to_string(ep) + ")");
  }
  const double first = std::pow(p, 2.0 * a_size / (2.0 + zeta));
  const double second = std::pow(1.0 - ep, -2.0 * (D + 1) * a_size);
  return first * second;
}

}  // namespace lll_lab
