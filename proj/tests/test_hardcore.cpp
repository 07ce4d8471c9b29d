// Hardcore-tree lower-bound construction: uniqueness threshold, fixed point,
// truncated-tree marginals, the boolean CSP encoding, analytic edge
// influences with the path-product identity, the influence-norm lower bound
// and the witness-family report.  Frozen constants were derived from the
// closed forms (fixed point of R = lambda/(1+R)^2 at lambda = 6 and its
// consequences) with an independent high-precision bisection.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "lll_lab/engine.hpp"
#include "lll_lab/errors.hpp"
#include "lll_lab/hardcore.hpp"

using namespace lll_lab;

namespace {

// Independent bisection oracle for R = lambda / (1+R)^(delta-1).
double oracle_r_star(double lambda, int delta) {
  double lo = 0.0, hi = lambda;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lambda / std::pow(1.0 + mid, delta - 1) - mid > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Exact occupation marginal Pr[v = 1 | all edges satisfied] by enumeration.
double exact_occupation(const AtomicCsp& csp, VarId v) {
  const auto m = conditional_block_marginal(csp, all_constraints(csp), {v});
  REQUIRE(m.size() == 2);
  return m[1];
}

}  // namespace

TEST_SUITE("hardcore") {

TEST_CASE("uniqueness threshold values") {
  CHECK(lambda_c(3) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(lambda_c(4) == doctest::Approx(27.0 / 16.0).epsilon(1e-14));
  CHECK(lambda_c(5) == doctest::Approx(256.0 / 243.0).epsilon(1e-14));
  CHECK_THROWS_AS(lambda_c(2), ArgumentError);
}

TEST_CASE("tree shape layout") {
  const TreeShape two = tree_shape(3, 2);
  CHECK(two.num_vertices == 4);
  CHECK(two.parent == std::vector<int>{-1, 0, 0, 0});
  CHECK(two.level == std::vector<int>{1, 2, 2, 2});
  CHECK(two.children[0] == std::vector<int>{1, 2, 3});
  CHECK_FALSE(two.is_leaf[0]);
  CHECK(two.is_leaf[1]);

  const TreeShape three = tree_shape(3, 3);
  CHECK(three.num_vertices == 10);
  // Root fans out delta ways; deeper internal vertices delta-1 ways.
  CHECK(three.children[0].size() == 3);
  for (int v : {1, 2, 3}) {
    CHECK(three.children[v].size() == 2);
    CHECK(three.level[v] == 2);
    CHECK_FALSE(three.is_leaf[v]);
  }
  for (int v = 4; v < 10; ++v) {
    CHECK(three.level[v] == 3);
    CHECK(three.is_leaf[v]);
    CHECK(three.parent[v] == 1 + (v - 4) / 2);
  }
  CHECK(tree_shape(3, 4).num_vertices == 22);
  CHECK(tree_shape(4, 3).num_vertices == 17);
  CHECK_THROWS_AS(tree_shape(2, 2), ArgumentError);
  CHECK_THROWS_AS(tree_shape(3, 1), ArgumentError);
}

TEST_CASE("fixed point at lambda 4 sits on the uniqueness boundary") {
  const FixedPoint fp = fixed_point(4.0, 3);
  CHECK(fp.r_star == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fp.q_star == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(nonuniqueness_margin(3, fp) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fixed point at lambda 6 lies in the non-uniqueness regime") {
  const FixedPoint fp = fixed_point(6.0, 3);
  CHECK(fp.r_star == doctest::Approx(oracle_r_star(6.0, 3)).epsilon(1e-10));
  CHECK(fp.r_star == doctest::Approx(1.218777).epsilon(1e-5));
  CHECK(fp.q_star == doctest::Approx(0.549301).epsilon(1e-5));
  // Defining equation holds at the returned point.
  CHECK(fp.r_star * std::pow(1.0 + fp.r_star, 2) ==
        doctest::Approx(6.0).epsilon(1e-9));
  const double margin = nonuniqueness_margin(3, fp);
  CHECK(margin == doctest::Approx(1.098602).epsilon(1e-5));
  CHECK(margin > 1.0);
  CHECK_THROWS_AS(fixed_point(0.0, 3), ArgumentError);
  CHECK_THROWS_AS(fixed_point(6.0, 2), ArgumentError);
  CHECK_THROWS_AS(nonuniqueness_margin(2, fp), ArgumentError);
}

TEST_CASE("tree marginals all equal one third at lambda 4") {
  const TreeInstance inst{3, 2, 4.0, 0.5};
  const auto marg = tree_marginals(inst);
  REQUIRE(marg.size() == 4);
  for (double m : marg) CHECK(m == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("tree marginals match exact enumeration") {
  // Fixed-point leaf field at lambda 6 and a generic off-fixed-point field:
  // the two-pass dynamic program must agree with brute-force conditioning.
  const FixedPoint fp = fixed_point(6.0, 3);
  for (double field : {fp.q_star, 0.37}) {
    const TreeInstance inst{3, 3, 6.0, field};
    const auto marg = tree_marginals(inst);
    const AtomicCsp csp = build_mu_n_csp(inst);
    REQUIRE(static_cast<int>(marg.size()) == csp.num_variables());
    for (int v = 0; v < csp.num_variables(); ++v) {
      CHECK(marg[v] == doctest::Approx(exact_occupation(csp, v)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(tree_marginals(TreeInstance{2, 2, 4.0, 0.5}), ArgumentError);
  CHECK_THROWS_AS(tree_marginals(TreeInstance{3, 1, 4.0, 0.5}), ArgumentError);
  CHECK_THROWS_AS(tree_marginals(TreeInstance{3, 2, -1.0, 0.5}), ArgumentError);
  CHECK_THROWS_AS(tree_marginals(TreeInstance{3, 2, 4.0, 1.0}), ArgumentError);
}

TEST_CASE("boolean encoding of the two-level tree") {
  const TreeInstance inst{3, 2, 4.0, 0.5};
  const AtomicCsp csp = build_mu_n_csp(inst);
  REQUIRE(csp.num_variables() == 4);
  REQUIRE(csp.num_constraints() == 3);
  // Root carries weight lambda/(1+lambda) on value 1, leaves the leaf field.
  CHECK(csp.weight(0, 1) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(csp.weight(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  for (int c = 0; c < 3; ++c) {
    CHECK(csp.constraint(c).scope == std::vector<VarId>{0, c + 1});
    CHECK(csp.constraint(c).forbidden == std::vector<int>{1, 1});
  }
  const InstanceParams params = instance_params(csp);
  CHECK(params.p == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(params.k == 2);
  CHECK(params.D == 2);
  CHECK(params.chi_min == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(params.chi_max == doctest::Approx(5.0).epsilon(1e-12));
  // Conditioned occupation marginals reproduce the tree measure.
  for (int v = 0; v < 4; ++v) {
    CHECK(exact_occupation(csp, v) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("dependency degree of the three-level encoding") {
  const TreeInstance inst{3, 3, 6.0, 0.5};
  const AtomicCsp csp = build_mu_n_csp(inst);
  REQUIRE(csp.num_variables() == 10);
  REQUIRE(csp.num_constraints() == 9);
  // A root-child edge meets two sibling edges at the root and the child's two
  // downward edges: degree four.
  CHECK(instance_params(csp).D == 4);
}

TEST_CASE("analytic edge influence is minus the occupation") {
  const FixedPoint fp6 = fixed_point(6.0, 3);
  CHECK(edge_influence(TreeInstance{3, 2, 6.0, fp6.q_star}) ==
        doctest::Approx(-fp6.q_star).epsilon(1e-12));
  CHECK(edge_influence(TreeInstance{3, 2, 4.0, 0.5}) ==
        doctest::Approx(-0.5).epsilon(1e-9));
  // The closed form needs the leaf field at the fixed point.
  CHECK_THROWS_AS(edge_influence(TreeInstance{3, 2, 6.0, 0.5}), ArgumentError);
}

TEST_CASE("signed influences across tree edges match the closed form") {
  const TreeInstance inst4{3, 2, 4.0, 0.5};
  const AtomicCsp csp4 = build_mu_n_csp(inst4);
  CHECK(signed_influence(csp4, 0, 1) == doctest::Approx(-0.5).epsilon(1e-10));
  // With leaves at the fixed point the reverse direction collapses to the
  // same value: conditioning a leaf to zero restores the fixed-point ratio.
  CHECK(signed_influence(csp4, 1, 0) == doctest::Approx(-0.5).epsilon(1e-10));

  const FixedPoint fp6 = fixed_point(6.0, 3);
  const AtomicCsp csp6 = build_mu_n_csp(TreeInstance{3, 2, 6.0, fp6.q_star});
  CHECK(signed_influence(csp6, 0, 1) ==
        doctest::Approx(-fp6.q_star).epsilon(1e-9));
  CHECK(signed_influence(csp6, 1, 0) ==
        doctest::Approx(-fp6.q_star).epsilon(1e-9));

  // Distance-two influence is the product of the edge factors.
  const AtomicCsp deep4 = build_mu_n_csp(TreeInstance{3, 3, 4.0, 0.5});
  CHECK(signed_influence(deep4, 0, 4) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(signed_influence(deep4, 4, 5) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("path product identity of signed influences") {
  const TreeInstance inst{3, 3, 4.0, 0.5};
  // Vertex 4 is a leaf under vertex 1; 5 its sibling; 0 the root.
  for (auto [u, w, v] : std::vector<std::array<int, 3>>{
           {4, 1, 0}, {0, 1, 4}, {4, 1, 5}, {0, 1, 5}}) {
    const auto rep = influence_product_check(inst, u, w, v);
    CHECK(rep.pass);
    CHECK(rep.error <= 1e-10);
    CHECK(rep.direct == doctest::Approx(rep.product).epsilon(1e-9));
  }
  // The identity is structural, not tied to the fixed point.
  CHECK(influence_product_check(TreeInstance{3, 3, 4.0, 0.4}, 4, 1, 0).pass);

  CHECK_THROWS_AS(influence_product_check(inst, 4, 2, 0), ArgumentError);
  CHECK_THROWS_AS(influence_product_check(inst, 4, 4, 0), ArgumentError);
  CHECK_THROWS_AS(influence_product_check(inst, 4, 1, 99), ArgumentError);
  // Middle vertex must be strictly interior: endpoints do not qualify.
  CHECK_THROWS_AS(influence_product_check(inst, 4, 0, 1), ArgumentError);
}

TEST_CASE("influence lower bound values and growth") {
  const FixedPoint fp6 = fixed_point(6.0, 3);
  CHECK(influence_lower_bound(3, 2, fp6) ==
        doctest::Approx(1.647904).epsilon(1e-4));
  CHECK(influence_lower_bound(3, 3, fp6) ==
        doctest::Approx(1.810391).epsilon(1e-4));
  const double growth = nonuniqueness_margin(3, fp6);
  CHECK(influence_lower_bound(3, 5, fp6) ==
        doctest::Approx(1.5 * std::pow(growth, 4)).epsilon(1e-12));
  // At lambda 4 the margin is exactly one: no exponential growth to certify.
  const FixedPoint fp4 = fixed_point(4.0, 3);
  CHECK_THROWS_AS(influence_lower_bound(3, 2, fp4), ArgumentError);
  CHECK_THROWS_AS(influence_lower_bound(2, 2, fp6), ArgumentError);
  CHECK_THROWS_AS(influence_lower_bound(3, 1, fp6), ArgumentError);
}

TEST_CASE("exact influence norms meet the lower bound") {
  const FixedPoint fp = fixed_point(6.0, 3);
  // Two levels: the root row sums three edge influences of size q*, and the
  // lower bound (3/2)(2q*) is exactly the same number.
  const AtomicCsp two = build_mu_n_csp(TreeInstance{3, 2, 6.0, fp.q_star});
  const double norm2 = influence_norms(influence_matrix(two)).inf;
  CHECK(norm2 == doctest::Approx(3.0 * fp.q_star).epsilon(1e-9));
  CHECK(norm2 + 1e-9 >= influence_lower_bound(3, 2, fp));
  CHECK(norm2 == doctest::Approx(influence_lower_bound(3, 2, fp)).epsilon(1e-9));

  // Three levels: the root row adds six distance-two terms of size q*^2 and
  // clears the bound strictly.
  const AtomicCsp three = build_mu_n_csp(TreeInstance{3, 3, 6.0, fp.q_star});
  const double norm3 = influence_norms(influence_matrix(three)).inf;
  const double expect3 = 3.0 * fp.q_star + 6.0 * fp.q_star * fp.q_star;
  CHECK(norm3 == doctest::Approx(expect3).epsilon(1e-9));
  CHECK(norm3 == doctest::Approx(3.458294).epsilon(1e-5));
  CHECK(norm3 > influence_lower_bound(3, 3, fp));
  CHECK(norm3 > norm2);
}

TEST_CASE("splitting the zero value preserves the conditioned law") {
  const TreeInstance inst{3, 2, 4.0, 0.5};
  const AtomicCsp csp = build_mu_n_csp(inst);
  const AtomicCsp split = split_zero_domains(csp, 2);
  REQUIRE(split.num_variables() == 4);
  CHECK(split.domain_size(0) == 3);
  CHECK(split.variable(0).domain == std::vector<std::string>{"0#0", "0#1", "1"});
  CHECK(split.weight(0, 0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(split.weight(0, 2) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(split.weight(1, 0) == doctest::Approx(0.25).epsilon(1e-12));
  for (int c = 0; c < split.num_constraints(); ++c) {
    CHECK(split.constraint(c).forbidden == std::vector<int>{2, 2});
  }
  // Occupation marginal of the merged value is untouched.
  for (int v = 0; v < 4; ++v) {
    const auto m = conditional_block_marginal(split, all_constraints(split), {v});
    REQUIRE(m.size() == 3);
    CHECK(m[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  // Violation probabilities are unchanged while chi_max grows.
  const InstanceParams params = instance_params(split);
  CHECK(params.p == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(params.chi_max == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(params.chi_min == doctest::Approx(1.25).epsilon(1e-12));

  const AtomicCsp wider = split_zero_domains(single_edge(), 3);
  CHECK(wider.domain_size(0) == 4);
  const auto m0 = conditional_block_marginal(wider, all_constraints(wider), {0});
  CHECK(m0[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(split_zero_domains(csp, 1), ArgumentError);
  const AtomicCsp zero_forbidden = AtomicCsp::from_json_text(R"({
    "variables": [{"domain": ["0", "1"]}, {"domain": ["0", "1"]}],
    "constraints": [{"scope": [0, 1], "forbidden": [0, 0]}]
  })");
  CHECK_THROWS_AS(split_zero_domains(zero_forbidden, 2), ArgumentError);
}

TEST_CASE("witness family report at p = 36/49, D = 4") {
  const auto rep = theorem3_instance(36.0 / 49.0, 4);
  CHECK(rep.p == doctest::Approx(36.0 / 49.0).epsilon(1e-12));
  CHECK(rep.D == 4);
  CHECK(rep.delta == 3);
  // sqrt(p) = 6/7 solves to fugacity 6, above the threshold 4.
  CHECK(rep.lambda == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(rep.lambda_crit == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(rep.margin == doctest::Approx(1.098602).epsilon(1e-5));
  CHECK(rep.p * rep.D * rep.D == doctest::Approx(576.0 / 49.0).epsilon(1e-9));
  REQUIRE(rep.levels.size() == 2);
  CHECK(rep.levels[0].levels == 2);
  CHECK(rep.levels[0].num_variables == 4);
  CHECK(rep.levels[1].levels == 3);
  CHECK(rep.levels[1].num_variables == 10);
  for (const auto& level : rep.levels) {
    CHECK(level.exact_norm + 1e-9 >= level.lower_bound);
  }
  CHECK(rep.levels[0].exact_norm ==
        doctest::Approx(rep.levels[0].lower_bound).epsilon(1e-9));
  CHECK(rep.levels[1].exact_norm > rep.levels[1].lower_bound);
  CHECK(rep.levels[1].exact_norm > rep.levels[0].exact_norm);
}

TEST_CASE("witness family report with branching four") {
  // p = 0.64, D = 6: sqrt(p) = 0.8 gives fugacity 4 over threshold 27/16.
  const auto rep = theorem3_instance(0.64, 6);
  CHECK(rep.delta == 4);
  CHECK(rep.lambda == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(rep.lambda_crit == doctest::Approx(27.0 / 16.0).epsilon(1e-12));
  CHECK(rep.margin > 1.0);
  REQUIRE(rep.levels.size() == 2);
  CHECK(rep.levels[0].num_variables == 5);
  CHECK(rep.levels[1].num_variables == 17);
  for (const auto& level : rep.levels) {
    CHECK(level.exact_norm + 1e-9 >= level.lower_bound);
  }
}

TEST_CASE("witness family argument guards") {
  CHECK_THROWS_AS(theorem3_instance(0.1, 4), ArgumentError);   // p D^2 < 4
  CHECK_THROWS_AS(theorem3_instance(0.5, 5), ArgumentError);   // odd D
  CHECK_THROWS_AS(theorem3_instance(0.5, 2), ArgumentError);   // D < 4
  CHECK_THROWS_AS(theorem3_instance(1.5, 4), ArgumentError);   // p outside (0,1)
  // p = 1/4, D = 4 passes p D^2 >= 4 but solves to fugacity 1 <= 4.
  CHECK_THROWS_AS(theorem3_instance(0.25, 4), ArgumentError);
  CHECK_THROWS_AS(theorem3_instance(36.0 / 49.0, 4, 1), ArgumentError);
}

}  // TEST_SUITE
