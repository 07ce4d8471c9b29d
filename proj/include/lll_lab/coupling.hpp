#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lll_lab/csp.hpp"
#include "lll_lab/engine.hpp"
#include "lll_lab/rng.hpp"

namespace lll_lab {

// Input tuple of the recursive coupling: unassigned variables U plus two
// satisfiable constraint collections S and T over U.
struct CoupleState {
  std::vector<VarId> unassigned;
  std::vector<SimplifiedConstraint> s;
  std::vector<SimplifiedConstraint> t;
};

// One execution-log entry: the state reached after step i together with the
// constraint chosen at step i and the assignments accumulated so far (the
// initial entry has no chosen constraint and empty assignments).
struct LogEntry {
  std::vector<VarId> unassigned;
  std::vector<SimplifiedConstraint> s;
  std::vector<SimplifiedConstraint> t;
  std::optional<SimplifiedConstraint> chosen;
  PartialAssignment x;
  PartialAssignment y;
};

struct ExecutionLog {
  std::vector<LogEntry> entries;
};

std::string log_to_json_lines(const ExecutionLog& log);

// Result of one coupling run: full assignments of the input variables on both
// margins, the bad set (origins of the constraints consumed by sampling
// steps) and the realized Hamming discrepancy.
struct CoupleOutcome {
  PartialAssignment x;
  PartialAssignment y;
  std::vector<int> bad;
  int hamming = 0;
  ExecutionLog log;
};

// One distinct execution log with its exact probability.  The discrepancy of
// a log class is realized entirely outside the final perfectly-coupled block,
// so it is a deterministic function of the log.
struct OutcomeClass {
  Rat probability;
  ExecutionLog log;
  std::vector<int> bad;
  int hamming = 0;
};

struct MonteCarloReport {
  long long trials = 0;
  double mean_hamming = 0;
  double half_width = 0;  // three sample standard errors
  bool disc_bound_ok = true;
  long long max_hamming = 0;
  long long max_bad = 0;
  // Empirical margin counts indexed by [position in unassigned][value].
  std::vector<std::vector<long long>> x_counts;
  std::vector<std::vector<long long>> y_counts;
};

// k(D+1)/(2 delta) * |S symm-diff T|: the expected-discrepancy budget granted
// by the coupling analysis.  Requires k >= 1, D >= 1, delta >= 1.
double bound_rhs(int k, int D, double delta, int sym_diff_size);

// Width/violation/dependency parameters of S union T; distortions range over
// every variable of the instance.
InstanceParams coupling_input_params(const AtomicCsp& csp,
                                     const CoupleState& state);

// Driver for the recursive coupling of P_U(.|S) against P_U(.|T).  States
// reached by the recursion are interned and their branch data (chosen
// constraint, branch probability, sampling tables) is computed once, so
// repeated runs on the same input are cheap.
class CouplingEngine {
 public:
  explicit CouplingEngine(const AtomicCsp& csp) : csp_(csp) {}

  // State well-formedness plus satisfiability of both sides; throws before
  // any randomness is consumed.
  void validate_state(const CoupleState& state);

  // One run with fresh randomness from `seed`.
  CoupleOutcome couple(const CoupleState& state, std::uint64_t seed,
                       bool build_log = true);

  // Same transition structure driven by pre-drawn samples; only the final
  // perfectly-coupled draw consumes the seed.  x_samp/y_samp must be full
  // assignments of the unassigned variables satisfying S resp. T.
  CoupleOutcome couple_explicit(const CoupleState& state,
                                const PartialAssignment& x_samp,
                                const PartialAssignment& y_samp,
                                std::uint64_t seed, bool build_log = true);

  // Exact joint law of (log, bad set, discrepancy) by sweeping all sample
  // pairs; class probabilities sum to one and match log_probability.
  std::vector<OutcomeClass> enumerate_outcomes(const CoupleState& state);

  // Probability that a run of couple() produces exactly this log; the log is
  // structurally validated first and an improper log is an error naming the
  // violated fact.
  double log_probability(const CoupleState& state, const ExecutionLog& log);
  Rat log_probability_exact(const CoupleState& state, const ExecutionLog& log);

  // Exact expected Hamming discrepancy via memoized branch recursion.
  Rat expected_hamming_exact(const CoupleState& state);

  // Monte Carlo estimate over `trials` runs with per-trial seeds derived from
  // (seed, trial index); also tallies margin counts and checks the
  // discrepancy bound on every run.
  MonteCarloReport expected_hamming_mc(const CoupleState& state,
                                       long long trials, std::uint64_t seed);

  // Exact law of the bad set, keyed by sorted origin lists.
  std::map<std::vector<int>, Rat> bad_set_distribution(const CoupleState& state);

  // Exact Pr[all the given origins end up in the bad set].
  Rat bad_containment_probability(const CoupleState& state,
                                  const std::vector<int>& origins);

  int max_depth_seen() const { return max_depth_seen_; }

 private:
  struct Node {
    CoupleState state;
    bool validated = false;
    bool terminal = false;
    bool branch_ready = false;
    bool grow_s = false;  // chosen from T\S (the add branch extends S)
    SimplifiedConstraint cstar;
    double p_sat = 0;
    bool sample_possible = false;  // an assignment consistent with the
                                   // conditioned side violates cstar
    int add_child = -1;
    VarSpace z_space;                 // over the chosen remaining set
    std::vector<int> forced_digits;   // forbidden assignment of cstar
    long long forced_code = 0;
    std::vector<long long> free_codes;  // positive-mass codes of the free side
    std::vector<double> free_mass;
    std::vector<double> free_cdf;
    std::unordered_map<long long, int> sample_children;
    bool exact_ready = false;
    Rat p_sat_exact;
    std::vector<Rat> free_mass_exact;  // aligned with free_codes
    bool term_ready = false;
    DistributionTable term_table;
    std::vector<double> term_cdf;
  };

  int intern(CoupleState state);
  CoupleOutcome run_walk(int root, CounterRng& rng, bool build_log);
  std::string state_key(const CoupleState& state) const;
  void ensure_branch(int id);
  void ensure_exact(int id);
  void ensure_terminal(int id);
  int sample_child(int id, long long free_code);
  int depth_cap(const CoupleState& state) const;

  const AtomicCsp& csp_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> index_;
  std::unordered_map<int, Rat> hamming_memo_;
  int max_depth_seen_ = 0;
};

}  // namespace lll_lab
