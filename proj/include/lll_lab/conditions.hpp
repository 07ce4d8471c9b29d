#pragma once

#include <map>
#include <string>
#include <vector>

#include "lll_lab/csp.hpp"

namespace lll_lab {

// Outcome of one threshold check: `satisfied` holds iff lhs <= rhs; inputs
// are echoed so reports are self-contained.
struct ConditionReport {
  std::string name;
  double lhs = 0;
  double rhs = 1;
  bool satisfied = false;
  std::map<std::string, double> inputs;
  std::string note;
};

std::string report_to_json(const ConditionReport& report);

// Exponent excess zeta(chi) = 2 ln(2 - 1/chi) / (ln chi - ln(2 - 1/chi)).
// Strictly decreasing on (1, inf), about 2.8188 at chi = 2, tending to 0.
double zeta(double chi_min);

// 60 q^3 p (D+1)^(2 + zeta(q)) <= 1: correlation decay threshold for uniform
// q-ary domains.
ConditionReport check_theorem_uniform(int q, double p, int D);

// (2e)^(1 + zeta/2) chi_max^3 p (D+1)^(2 + zeta) <= 1 with zeta = zeta(chi_min):
// the general-domain threshold.
ConditionReport check_theorem_general(double chi_max, double chi_min, double p,
                                      int D);

// (2e)^(1 + zeta/2) delta p (D+1)^(2 + zeta) <= 1 with zeta = zeta(chi_min):
// the hypothesis of the expected-discrepancy bound.  Requires D >= 1.
ConditionReport check_coupling_condition(double delta, double chi_min, double p,
                                         int D);

// Per-constraint check of Pr[not c] <= x(c) prod_{c' ~ c} (1 - x(c')); lhs is
// the worst ratio.  Also records the guaranteed satisfaction lower bound
// prod_c (1 - x(c)) and, when the instance is enumerable, the exact
// satisfaction probability for comparison.
ConditionReport check_asymmetric_lll(const AtomicCsp& csp,
                                     const std::vector<double>& x);

// The symmetric choice x(c) = e * p for every constraint.
std::vector<double> symmetric_x(const AtomicCsp& csp);

// Conditional-probability budget: event_prob * prod over constraints whose
// scope meets event_scope of 1/(1 - x(c)).  Values above one are legal
// (vacuous) and left to the caller to flag.
double hss_rhs(const AtomicCsp& csp, const std::vector<VarId>& event_scope,
               double event_prob, const std::vector<double>& x);

}  // namespace lll_lab
