#pragma once

#include <vector>

#include "lll_lab/csp.hpp"

namespace lll_lab {

// Unique positive solution of R = lambda / (1+R)^(delta-1) and its occupation
// form q* = R*/(1+R*).
struct FixedPoint {
  double r_star = 0;
  double q_star = 0;
};

// Truncated (delta)-regular hardcore tree: `levels` levels with the root on
// level one (root has delta children, deeper internal vertices delta-1);
// fugacity lambda on non-leaves and occupation weight leaf_field on leaves.
struct TreeInstance {
  int delta = 3;
  int levels = 2;
  double lambda = 1;
  double leaf_field = 0.5;
};

// Level-order layout of the tree underlying a TreeInstance.
struct TreeShape {
  int num_vertices = 0;
  std::vector<int> parent;               // -1 for the root
  std::vector<int> level;                // 1-based
  std::vector<std::vector<int>> children;
  std::vector<bool> is_leaf;
};

TreeShape tree_shape(int delta, int levels);

// Uniqueness threshold (delta-1)^(delta-1) / (delta-2)^delta.
double lambda_c(int delta);

// Bisection for the fixed point over [0, lambda] to 1e-12.
FixedPoint fixed_point(double lambda, int delta);

// (delta-1) * q*; values above one certify non-uniqueness.
double nonuniqueness_margin(int delta, const FixedPoint& fp);

// Per-vertex occupation probabilities of the tree measure via a two-pass
// (bottom-up ratios, then top-down context) dynamic program.
std::vector<double> tree_marginals(const TreeInstance& inst);

// Boolean CSP encoding: value-1 weight lambda/(1+lambda) on non-leaves and
// leaf_field on leaves; one constraint per edge forbidding (1,1).  Its
// conditioned distribution is the tree measure.
AtomicCsp build_mu_n_csp(const TreeInstance& inst);

// Analytic signed influence across any tree edge: -q*.  Requires leaf_field
// to be the fixed-point occupation (the closed form is invalid otherwise).
double edge_influence(const TreeInstance& inst);

struct InfluenceProductReport {
  double direct = 0;   // signed influence u -> v
  double product = 0;  // signed influence u -> w times w -> v
  double error = 0;
  bool pass = false;
};

// Checks the path-product identity of signed influences for w strictly
// inside the tree path from u to v, by exact enumeration of the encoding.
InfluenceProductReport influence_product_check(const TreeInstance& inst, int u,
                                               int w, int v);

// (delta/(delta-1)) * (1+excess)^(levels-1) with excess = margin - 1 > 0: the
// lower bound on the maximum influence row sum of the tree measure.
double influence_lower_bound(int delta, int levels, const FixedPoint& fp);

// Split value 0 of every variable into `copies` equal-weight labels; value 0
// must not occur in any forbidden assignment (atomicity would break).  The
// merged-value law is unchanged while chi_min drops toward 1 + 1/lambda.
AtomicCsp split_zero_domains(const AtomicCsp& csp, int copies);

// Witness family for the lower-bound construction at a prescribed violation
// probability p and dependency degree D.
struct Theorem3Report {
  double p = 0;
  int D = 0;
  double lambda = 0;
  int delta = 0;
  double lambda_crit = 0;
  FixedPoint fixed;
  double margin = 0;
  struct Level {
    int levels = 0;
    int num_variables = 0;
    double exact_norm = 0;
    double lower_bound = 0;
  };
  std::vector<Level> levels;
};

// Solves lambda from p (sqrt(p) = lambda/(1+lambda)) and delta from D
// (delta = D/2 + 1), verifies lambda > lambda_c(delta), and reports exact
// influence norms against the lower bound for levels 2..max_levels.
// Requires p*D^2 >= 4 and even D >= 4.
Theorem3Report theorem3_instance(double p, int D, int max_levels = 3);

}  // namespace lll_lab
