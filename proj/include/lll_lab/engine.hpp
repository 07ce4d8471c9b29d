#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lll_lab/csp.hpp"
#include "lll_lab/rational.hpp"

namespace lll_lab {

// Hard ceiling on the number of states any single enumeration may visit.
inline constexpr long long kEnumGuard = 1LL << 28;

// Mixed-radix index over a sorted variable list; code 0 is the all-zeros
// assignment and codes enumerate assignments lexicographically (first
// variable most significant).
struct VarSpace {
  std::vector<VarId> vars;
  std::vector<int> radix;
  std::vector<long long> stride;
  long long total = 1;

  static VarSpace over(const AtomicCsp& csp, std::vector<VarId> vars,
                       long long guard = kEnumGuard);
  void decode(long long code, std::vector<int>& digits) const;
  long long encode(const std::vector<int>& digits) const;
  std::optional<int> position_of(VarId v) const;
};

// Conjunction event: the listed constraints hold, the `violated` ones are
// fully matched by their forbidden assignments, and the pinned variables take
// the pinned values.
struct Event {
  std::vector<SimplifiedConstraint> satisfied;
  std::vector<SimplifiedConstraint> violated;
  PartialAssignment pin;
};

// Probability of the event under the product measure.  The default entry
// point enumerates the variables the event actually mentions when that space
// fits the guardrail and otherwise falls back to inclusion–exclusion over the
// satisfied set; the two specific entry points force one path (they must
// agree to 1e-12, which the tests pin down).
double event_probability(const AtomicCsp& csp, const Event& event);
double event_probability_enum(const AtomicCsp& csp, const Event& event);
double event_probability_incl_excl(const AtomicCsp& csp, const Event& event);
Rat event_probability_exact(const AtomicCsp& csp, const Event& event);

// Exact support check: does any assignment realize the event?  Enumeration
// over the mentioned variables with an early exit at the first witness; all
// weights are positive, so this is a combinatorial question with no rounding
// concerns.
bool event_possible(const AtomicCsp& csp, const Event& event);

// Pr[event | given]; raises UnsatisfiableError when the conditioning event
// has probability zero.
double conditional_probability(const AtomicCsp& csp, const Event& event,
                               const Event& given);

// Law over full assignments of `vars`; support lists only positive-mass
// assignments in lexicographic order.
struct DistributionTable {
  std::vector<VarId> vars;
  std::vector<std::vector<int>> support;
  std::vector<double> mass;
  std::vector<Rat> mass_exact;
  bool has_exact = false;
};

// Product measure over `universe` conditioned on the constraints; errors when
// the conditioning event has probability zero or the space exceeds the guard.
DistributionTable conditional_table(const AtomicCsp& csp,
                                    const std::vector<VarId>& universe,
                                    const std::vector<SimplifiedConstraint>& constraints,
                                    bool exact = false);

// The distribution the instance induces: product measure conditioned on all
// constraints holding.  Errors with UnsatisfiableError on unsatisfiable
// instances.
DistributionTable lll_distribution(const AtomicCsp& csp, bool exact = false);

// Marginal on `block` of the conditional law P(. | constraints); entries are
// indexed by the VarSpace code of the block assignment.
std::vector<double> conditional_block_marginal(
    const AtomicCsp& csp, const std::vector<SimplifiedConstraint>& constraints,
    const std::vector<VarId>& block);
std::vector<Rat> conditional_block_marginal_exact(
    const AtomicCsp& csp, const std::vector<SimplifiedConstraint>& constraints,
    const std::vector<VarId>& block);

// Law of v under the instance distribution conditioned on pinning u to
// `value`; a zero-probability pin is an error, and v == u yields the point
// mass at `value`.
std::vector<double> pinned_marginal(const AtomicCsp& csp, VarId u, int value,
                                    VarId v);

// Total variation distance between two laws over the same value universe.
double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

// Pairwise influence: entry (u,v) is the worst-case total variation moved on
// v by switching the pin on u between two feasible values; diagonal is zero
// by convention.
struct InfluenceMatrix {
  int n = 0;
  std::vector<double> entries;  // row-major, entries[u * n + v]

  double at(VarId u, VarId v) const { return entries[u * n + v]; }
};

struct InfluenceNorms {
  double one = 0;  // max column sum: all-to-one aggregation
  double inf = 0;  // max row sum: one-to-all aggregation
};

InfluenceMatrix influence_matrix(const AtomicCsp& csp);
InfluenceNorms influence_norms(const InfluenceMatrix& m);

// Signed one-to-one influence Pr[v=1 | u=1] - Pr[v=1 | u=0] for Boolean u,v;
// its absolute value equals the influence-matrix entry.
double signed_influence(const AtomicCsp& csp, VarId u, VarId v);

// Expected-discrepancy transfer: a uniform coupling bound A on the expected
// Hamming discrepancy turns into chi_max^2 * A on the one-to-all norm.
double coupling_norm_bound(double expected_hamming_bound, double chi_max);

// Serialization helpers: matrices as CSV with a variable-id header row,
// distributions as JSON arrays of (assignment, mass) pairs.
std::string matrix_to_csv(const InfluenceMatrix& m);
std::string distribution_to_json(const AtomicCsp& csp,
                                 const DistributionTable& table);

}  // namespace lll_lab
