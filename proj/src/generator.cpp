#include "lll_lab/generator.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <utility>

#include "lll_lab/engine.hpp"
#include "lll_lab/errors.hpp"
#include "lll_lab/rng.hpp"

namespace lll_lab {

namespace {

constexpr int kRejectionCap = 10000;

// Seeded Fisher–Yates shuffle.
template <class T>
void shuffle_with(std::vector<T>& items, CounterRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = rng.next_u64() % i;
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace

AtomicCsp gen_uniform_atomic(int n, int q, int k, int m, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("need at least one variable");
  if (q < 2) throw ArgumentError("domains need at least two values");
  if (k < 1 || k > n) {
    throw ArgumentError("constraint width must lie in [1, n]");
  }
  if (m < 1) throw ArgumentError("need at least one constraint");

  std::vector<VariableDecl> variables;
  variables.reserve(n);
  for (int v = 0; v < n; ++v) {
    VariableDecl decl;
    for (int i = 0; i < q; ++i) {
      decl.domain.push_back(std::to_string(i));
      decl.weights.push_back(1.0 / q);
    }
    variables.push_back(std::move(decl));
  }

  for (int attempt = 0; attempt < kRejectionCap; ++attempt) {
    CounterRng rng(CounterRng::derive(seed, static_cast<std::uint64_t>(attempt)));
    std::set<std::pair<std::vector<VarId>, std::vector<int>>> seen;
    std::vector<AtomicConstraint> constraints;
    bool clash = false;
    for (int c = 0; c < m && !clash; ++c) {
      bool placed = false;
      for (int redraw = 0; redraw < kRejectionCap && !placed; ++redraw) {
        std::vector<VarId> ids(n);
        std::iota(ids.begin(), ids.end(), 0);
        shuffle_with(ids, rng);
        std::vector<VarId> scope(ids.begin(), ids.begin() + k);
        std::sort(scope.begin(), scope.end());
        std::vector<int> forbidden;
        forbidden.reserve(k);
        for (int i = 0; i < k; ++i) {
          forbidden.push_back(static_cast<int>(rng.next_u64() % q));
        }
        if (seen.emplace(scope, forbidden).second) {
          constraints.push_back(AtomicConstraint{std::move(scope), std::move(forbidden)});
          placed = true;
        }
      }
      clash = !placed;
    }
    if (clash) continue;
    AtomicCsp csp(variables, std::move(constraints));
    if (event_possible(csp, Event{all_constraints(csp), {}, {}})) return csp;
  }
  throw LimitError("no satisfiable instance found within the rejection budget");
}

Graph gen_capped_graph(int n, int max_degree, int target_edges,
                       std::uint64_t seed) {
  if (n < 1) throw ArgumentError("need at least one vertex");
  if (max_degree < 0) throw ArgumentError("degree cap must be nonnegative");
  if (target_edges < 0) throw ArgumentError("edge target must be nonnegative");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  CounterRng rng(seed);
  shuffle_with(pairs, rng);
  Graph g(n);
  int placed = 0;
  for (const auto& [a, b] : pairs) {
    if (placed >= target_edges) break;
    if (g.degree(a) >= max_degree || g.degree(b) >= max_degree) continue;
    g.add_edge(a, b);
    ++placed;
  }
  return g;
}

}  // namespace lll_lab
