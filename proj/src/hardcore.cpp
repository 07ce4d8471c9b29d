#include "lll_lab/hardcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lll_lab/engine.hpp"
#include "lll_lab/errors.hpp"

namespace lll_lab {

namespace {

constexpr double kFixedPointTol = 1e-12;
constexpr int kBisectionCap = 200;

void validate_instance(const TreeInstance& inst) {
  if (inst.delta < 3) throw ArgumentError("branching parameter must be >= 3");
  if (inst.levels < 2) throw ArgumentError("tree must have at least two levels");
  if (!(inst.lambda > 0)) throw ArgumentError("fugacity must be positive");
  if (!(inst.leaf_field > 0) || !(inst.leaf_field < 1)) {
    throw ArgumentError("leaf field must lie in (0,1)");
  }
}

double ratio_of(double prob) { return prob / (1.0 - prob); }

}  // namespace

TreeShape tree_shape(int delta, int levels) {
  if (delta < 3) throw ArgumentError("branching parameter must be >= 3");
  if (levels < 2) throw ArgumentError("tree must have at least two levels");
  TreeShape shape;
  shape.parent.push_back(-1);
  shape.level.push_back(1);
  int first_of_level = 0;
  int count_of_level = 1;
  for (int lv = 2; lv <= levels; ++lv) {
    const int next_first = static_cast<int>(shape.parent.size());
    for (int i = 0; i < count_of_level; ++i) {
      const int p = first_of_level + i;
      const int fanout = (lv == 2) ? delta : delta - 1;
      for (int c = 0; c < fanout; ++c) {
        shape.parent.push_back(p);
        shape.level.push_back(lv);
      }
    }
    first_of_level = next_first;
    count_of_level = static_cast<int>(shape.parent.size()) - next_first;
  }
  shape.num_vertices = static_cast<int>(shape.parent.size());
  shape.children.assign(shape.num_vertices, {});
  shape.is_leaf.assign(shape.num_vertices, false);
  for (int v = 1; v < shape.num_vertices; ++v) {
    shape.children[shape.parent[v]].push_back(v);
  }
  for (int v = 0; v < shape.num_vertices; ++v) {
    shape.is_leaf[v] = shape.children[v].empty();
  }
  return shape;
}

double lambda_c(int delta) {
  if (delta < 3) throw ArgumentError("uniqueness threshold requires delta >= 3");
  return std::pow(delta - 1.0, delta - 1) / std::pow(delta - 2.0, delta);
}

FixedPoint fixed_point(double lambda, int delta) {
  if (!(lambda > 0)) throw ArgumentError("fugacity must be positive");
  if (delta < 3) throw ArgumentError("branching parameter must be >= 3");
  const auto f = [&](double r) {
    return lambda / std::pow(1.0 + r, delta - 1);
  };
  double lo = 0, hi = lambda;  // f(0) - 0 > 0 and f(lambda) - lambda <= 0
  for (int it = 0; it < kBisectionCap && hi - lo > kFixedPointTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) - mid > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  FixedPoint fp;
  fp.r_star = 0.5 * (lo + hi);
  fp.q_star = fp.r_star / (1.0 + fp.r_star);
  return fp;
}

double nonuniqueness_margin(int delta, const FixedPoint& fp) {
  if (delta < 3) throw ArgumentError("branching parameter must be >= 3");
  return (delta - 1.0) * fp.q_star;
}

std::vector<double> tree_marginals(const TreeInstance& inst) {
  validate_instance(inst);
  const TreeShape shape = tree_shape(inst.delta, inst.levels);
  const int n = shape.num_vertices;
  std::vector<double> activity(n);
  for (int v = 0; v < n; ++v) {
    activity[v] = shape.is_leaf[v] ? ratio_of(inst.leaf_field) : inst.lambda;
  }
  // Bottom-up subtree occupation ratios (level order means children follow
  // their parent, so a reverse scan is bottom-up).
  std::vector<double> up(n);
  for (int v = n - 1; v >= 0; --v) {
    double r = activity[v];
    for (int c : shape.children[v]) r /= 1.0 + up[c];
    up[v] = r;
  }
  // Top-down context ratio: the occupation ratio of v's parent computed in
  // the tree with v's subtree removed.
  std::vector<double> ctx(n, 0);
  for (int v = 1; v < n; ++v) {
    const int p = shape.parent[v];
    double r = activity[p];
    for (int c : shape.children[p]) {
      if (c != v) r /= 1.0 + up[c];
    }
    if (p != 0) r /= 1.0 + ctx[p];
    ctx[v] = r;
  }
  std::vector<double> marginal(n);
  for (int v = 0; v < n; ++v) {
    const double r = (v == 0) ? up[v] : up[v] / (1.0 + ctx[v]);
    marginal[v] = r / (1.0 + r);
  }
  return marginal;
}

AtomicCsp build_mu_n_csp(const TreeInstance& inst) {
  validate_instance(inst);
  const TreeShape shape = tree_shape(inst.delta, inst.levels);
  std::vector<VariableDecl> variables;
  variables.reserve(shape.num_vertices);
  const double occ = inst.lambda / (1.0 + inst.lambda);
  for (int v = 0; v < shape.num_vertices; ++v) {
    const double w1 = shape.is_leaf[v] ? inst.leaf_field : occ;
    variables.push_back(VariableDecl{{"0", "1"}, {1.0 - w1, w1}});
  }
  std::vector<AtomicConstraint> constraints;
  constraints.reserve(shape.num_vertices - 1);
  for (int v = 1; v < shape.num_vertices; ++v) {
    constraints.push_back(AtomicConstraint{{shape.parent[v], v}, {1, 1}});
  }
  return AtomicCsp(std::move(variables), std::move(constraints));
}

double edge_influence(const TreeInstance& inst) {
  validate_instance(inst);
  const FixedPoint fp = fixed_point(inst.lambda, inst.delta);
  if (std::abs(inst.leaf_field - fp.q_star) > 1e-9) {
    throw ArgumentError(
        "edge influence closed form needs the leaf field at the fixed point "
        "(expected " +
        std::to_string(fp.q_star) + ", got " + std::to_string(inst.leaf_field) +
        ")");
  }
  return -fp.q_star;
}

InfluenceProductReport influence_product_check(const TreeInstance& inst, int u,
                                               int w, int v) {
  validate_instance(inst);
  const TreeShape shape = tree_shape(inst.delta, inst.levels);
  const int n = shape.num_vertices;
  for (int vertex : {u, w, v}) {
    if (vertex < 0 || vertex >= n) {
      throw ArgumentError("vertex " + std::to_string(vertex) + " out of range");
    }
  }
  if (u == w || w == v || u == v) {
    throw ArgumentError("path product check needs three distinct vertices");
  }
  // Unique tree path u -> v via ancestor chains.
  const auto ancestors = [&](int a) {
    std::vector<int> chain = {a};
    while (shape.parent[chain.back()] >= 0) {
      chain.push_back(shape.parent[chain.back()]);
    }
    return chain;
  };
  const std::vector<int> from_u = ancestors(u);
  const std::vector<int> from_v = ancestors(v);
  int i = static_cast<int>(from_u.size()) - 1;
  int j = static_cast<int>(from_v.size()) - 1;
  while (i > 0 && j > 0 && from_u[i - 1] == from_v[j - 1]) {
    --i;
    --j;
  }
  std::vector<int> path(from_u.begin(), from_u.begin() + i + 1);
  for (int t = j - 1; t >= 0; --t) path.push_back(from_v[t]);
  const auto at = std::find(path.begin(), path.end(), w);
  if (at == path.begin() || at == path.end() || at + 1 == path.end()) {
    throw ArgumentError(
        "middle vertex must lie strictly inside the tree path between the "
        "endpoints");
  }
  const AtomicCsp csp = build_mu_n_csp(inst);
  InfluenceProductReport report;
  report.direct = signed_influence(csp, u, v);
  report.product = signed_influence(csp, u, w) * signed_influence(csp, w, v);
  report.error = std::abs(report.direct - report.product);
  report.pass = report.error <= 1e-10;
  return report;
}

double influence_lower_bound(int delta, int levels, const FixedPoint& fp) {
  if (delta < 3) throw ArgumentError("branching parameter must be >= 3");
  if (levels < 2) throw ArgumentError("tree must have at least two levels");
  const double excess = nonuniqueness_margin(delta, fp) - 1.0;
  if (!(excess > 0)) {
    throw ArgumentError(
        "influence lower bound needs non-uniqueness margin above one (got " +
        std::to_string(excess + 1.0) + ")");
  }
  return delta / (delta - 1.0) * std::pow(1.0 + excess, levels - 1);
}

AtomicCsp split_zero_domains(const AtomicCsp& csp, int copies) {
  if (copies < 2) throw ArgumentError("splitting needs at least two copies");
  for (int c = 0; c < csp.num_constraints(); ++c) {
    for (int f : csp.constraint(c).forbidden) {
      if (f == 0) {
        throw ArgumentError(
            "cannot split value 0: constraint " + std::to_string(c) +
            " forbids it, and splitting would break atomicity");
      }
    }
  }
  std::vector<VariableDecl> variables;
  variables.reserve(csp.num_variables());
  for (int v = 0; v < csp.num_variables(); ++v) {
    const VariableDecl& var = csp.variable(v);
    VariableDecl out;
    for (int i = 0; i < copies; ++i) {
      out.domain.push_back(var.domain[0] + "#" + std::to_string(i));
      out.weights.push_back(var.weights[0] / copies);
    }
    for (std::size_t i = 1; i < var.domain.size(); ++i) {
      out.domain.push_back(var.domain[i]);
      out.weights.push_back(var.weights[i]);
    }
    variables.push_back(std::move(out));
  }
  std::vector<AtomicConstraint> constraints;
  constraints.reserve(csp.num_constraints());
  for (int c = 0; c < csp.num_constraints(); ++c) {
    AtomicConstraint out = csp.constraint(c);
    for (int& f : out.forbidden) f += copies - 1;
    constraints.push_back(std::move(out));
  }
  return AtomicCsp(std::move(variables), std::move(constraints));
}

Theorem3Report theorem3_instance(double p, int D, int max_levels) {
  if (!(p > 0) || !(p < 1)) {
    throw ArgumentError("violation probability must lie in (0,1)");
  }
  if (D < 4 || D % 2 != 0) {
    throw ArgumentError("dependency degree must be an even integer >= 4");
  }
  if (p * D * D < 4.0) {
    throw ArgumentError("construction requires p*D^2 >= 4 (got " +
                        std::to_string(p * D * D) + ")");
  }
  if (max_levels < 2) throw ArgumentError("need at least two levels");
  Theorem3Report report;
  report.p = p;
  report.D = D;
  report.delta = D / 2 + 1;
  const double sqrt_p = std::sqrt(p);
  report.lambda = sqrt_p / (1.0 - sqrt_p);
  report.lambda_crit = lambda_c(report.delta);
  if (!(report.lambda > report.lambda_crit)) {
    throw ArgumentError("solved fugacity " + std::to_string(report.lambda) +
                        " does not exceed the uniqueness threshold " +
                        std::to_string(report.lambda_crit));
  }
  report.fixed = fixed_point(report.lambda, report.delta);
  report.margin = nonuniqueness_margin(report.delta, report.fixed);
  for (int n = 2; n <= max_levels; ++n) {
    const TreeShape shape = tree_shape(report.delta, n);
    if (shape.num_vertices > 22) break;  // keeps exact enumeration at 2^22
    TreeInstance inst{report.delta, n, report.lambda, report.fixed.q_star};
    const AtomicCsp csp = build_mu_n_csp(inst);
    Theorem3Report::Level level;
    level.levels = n;
    level.num_variables = shape.num_vertices;
    level.exact_norm = influence_norms(influence_matrix(csp)).inf;
    level.lower_bound = influence_lower_bound(report.delta, n, report.fixed);
    report.levels.push_back(level);
  }
  return report;
}

}  // namespace lll_lab
