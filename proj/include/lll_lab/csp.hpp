#pragma once

#include <string>
#include <vector>

#include "lll_lab/assignment.hpp"
#include "lll_lab/errors.hpp"
#include "lll_lab/graph.hpp"

namespace lll_lab {

// One variable: labelled finite domain plus a positive weight per value.
// Weights must sum to 1 within kWeightSumTol.
struct VariableDecl {
  std::vector<std::string> domain;
  std::vector<double> weights;
};

// Atomic constraint: forbids exactly one assignment of its scope.  Scope ids
// are strictly increasing; `forbidden[i]` is the banned value index of
// `scope[i]`.
struct AtomicConstraint {
  std::vector<VarId> scope;
  std::vector<int> forbidden;
};

// Simplification of constraint `origin` under some partial assignment: the
// assigned scope variables all matched the forbidden assignment and were
// removed, `remaining` lists the survivors (never empty — a constraint whose
// remaining set would empty out means the assignment violates it).  The pair
// (origin, remaining) identifies the simplified constraint; ordering is
// lexicographic on that pair.
struct SimplifiedConstraint {
  int origin = -1;
  std::vector<VarId> remaining;

  bool operator==(const SimplifiedConstraint& o) const {
    return origin == o.origin && remaining == o.remaining;
  }
  bool operator!=(const SimplifiedConstraint& o) const { return !(*this == o); }
  bool operator<(const SimplifiedConstraint& o) const {
    if (origin != o.origin) return origin < o.origin;
    return remaining < o.remaining;
  }
};

// Width, dependency degree, extremal violation probability and distortion of
// a constraint collection (p, k, D, chi_min, chi_max).
struct InstanceParams {
  double p = 0;
  int k = 0;
  int D = 0;
  double chi_min = 0;
  double chi_max = 0;
};

inline constexpr double kWeightSumTol = 1e-12;

// Atomic constraint satisfaction problem over a product measure.  Immutable
// after construction; the constructor validates domains, weights and scopes
// and reports offending indices.
class AtomicCsp {
 public:
  AtomicCsp(std::vector<VariableDecl> variables,
            std::vector<AtomicConstraint> constraints);

  static AtomicCsp from_json_text(const std::string& text);
  static AtomicCsp from_json_file(const std::string& path);
  std::string to_json_text() const;

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const VariableDecl& variable(VarId v) const { return variables_[v]; }
  const AtomicConstraint& constraint(int c) const { return constraints_[c]; }
  int domain_size(VarId v) const {
    return static_cast<int>(variables_[v].domain.size());
  }
  double weight(VarId v, int value) const { return variables_[v].weights[value]; }

  bool scope_contains(int c, VarId v) const;
  // Forbidden value index of v inside constraint c; v must be in the scope.
  int forbidden_value(int c, VarId v) const;

  std::vector<VarId> all_variables() const;

 private:
  std::vector<VariableDecl> variables_;
  std::vector<AtomicConstraint> constraints_;
};

// The trivial simplification of every constraint (full scope remaining).
std::vector<SimplifiedConstraint> all_constraints(const AtomicCsp& csp);

// Simplify a constraint collection under a partial assignment: drop every
// constraint with an assigned variable set to a non-forbidden value, shrink
// the rest.  A constraint whose remaining set would become empty is violated
// by x; that raises ConstraintViolation carrying the origin id.
std::vector<SimplifiedConstraint> simplify(
    const AtomicCsp& csp, const std::vector<SimplifiedConstraint>& constraints,
    const PartialAssignment& x);

// Violation probability of a simplified constraint: product of the weights of
// the forbidden values over its remaining set.
double violation_probability(const AtomicCsp& csp,
                             const SimplifiedConstraint& c);

// Dependency graph: one vertex per scope, edge iff scopes share a variable.
Graph dependency_graph(const std::vector<std::vector<VarId>>& scopes);

std::vector<std::vector<VarId>> scopes_of(
    const std::vector<SimplifiedConstraint>& constraints);

// (p, k, D, chi_min, chi_max) of the instance's own constraint set.  Errors
// on an empty constraint list (D would be ill-defined).
InstanceParams instance_params(const AtomicCsp& csp);

// Same extremal parameters for an arbitrary collection of simplified
// constraints (violation probabilities and widths use the remaining sets; the
// distortions always range over every variable of the instance).
InstanceParams collection_params(const AtomicCsp& csp,
                                 const std::vector<SimplifiedConstraint>& cs);

// Sorted-set helpers for constraint collections.
std::vector<SimplifiedConstraint> constraint_set_union(
    const std::vector<SimplifiedConstraint>& a,
    const std::vector<SimplifiedConstraint>& b);
std::vector<SimplifiedConstraint> constraint_set_difference(
    const std::vector<SimplifiedConstraint>& a,
    const std::vector<SimplifiedConstraint>& b);
std::vector<SimplifiedConstraint> constraint_set_symmetric_difference(
    const std::vector<SimplifiedConstraint>& a,
    const std::vector<SimplifiedConstraint>& b);

}  // namespace lll_lab
