#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lll_lab/conditions.hpp"
#include "lll_lab/coupling.hpp"
#include "lll_lab/csp.hpp"
#include "lll_lab/engine.hpp"
#include "lll_lab/errors.hpp"
#include "lll_lab/generator.hpp"
#include "lll_lab/hardcore.hpp"
#include "lll_lab/rng.hpp"
#include "lll_lab/structure.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace lll_lab;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;

int thread_cap() {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  cap = std::min(cap, 8);
  if (const char* env = std::getenv("LLL_LAB_THREADS")) {
    try {
      cap = std::max(1, std::min(cap, std::stoi(env)));
    } catch (...) {
      throw ArgumentError("LLL_LAB_THREADS must be an integer");
    }
  }
  return cap;
}

// Deterministic sharded loop: worker w handles indices w, w+T, w+2T, ...;
// results are collected by index so output order never depends on timing.
template <class Fn>
std::vector<std::string> sharded(int count, Fn&& fn) {
  const int workers = std::min(thread_cap(), std::max(count, 1));
  std::vector<std::string> results(count);
  std::vector<std::thread> pool;
  std::mutex fail_mutex;
  std::exception_ptr first_error;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) {
        try {
          results[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> hold(fail_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open output file " + path);
  out << text;
}

std::vector<SimplifiedConstraint> canonical_side(
    std::vector<SimplifiedConstraint> side) {
  std::sort(side.begin(), side.end());
  side.erase(std::unique(side.begin(), side.end()), side.end());
  return side;
}

Json params_json(const AtomicCsp& csp) {
  const InstanceParams p = instance_params(csp);
  Json j;
  j["schema_version"] = 1;
  j["num_variables"] = csp.num_variables();
  j["num_constraints"] = csp.num_constraints();
  j["p"] = p.p;
  j["k"] = p.k;
  j["D"] = p.D;
  j["chi_min"] = p.chi_min;
  j["chi_max"] = p.chi_max;
  Json checks = Json::array();
  const bool uniform = p.chi_min == p.chi_max &&
                       p.chi_min == static_cast<int>(p.chi_min);
  if (uniform && p.p > 0 && p.p < 1) {
    checks.push_back(Json::parse(report_to_json(
        check_theorem_uniform(static_cast<int>(p.chi_min), p.p, p.D))));
  }
  if (p.chi_min > 1 && p.p > 0 && p.p < 1) {
    checks.push_back(Json::parse(
        report_to_json(check_theorem_general(p.chi_max, p.chi_min, p.p, p.D))));
    if (p.D >= 1) {
      checks.push_back(Json::parse(report_to_json(check_coupling_condition(
          p.chi_max * p.chi_max, p.chi_min, p.p, p.D))));
    }
  }
  try {
    checks.push_back(Json::parse(
        report_to_json(check_asymmetric_lll(csp, symmetric_x(csp)))));
  } catch (const ArgumentError&) {
    // e*p outside (0,1): the symmetric choice is unavailable.
  }
  j["conditions"] = checks;
  return j;
}

// S/T pair induced by pinning u to i resp. j; the coupling's unassigned set
// is everything except u.
CoupleState pinned_pair_state(const AtomicCsp& csp, VarId u, int i, int j) {
  if (u < 0 || u >= csp.num_variables()) {
    throw ArgumentError("pinned variable out of range");
  }
  for (int value : {i, j}) {
    if (value < 0 || value >= csp.domain_size(u)) {
      throw ArgumentError("pinned value out of range");
    }
  }
  const auto all = all_constraints(csp);
  CoupleState state;
  for (VarId v = 0; v < csp.num_variables(); ++v) {
    if (v != u) state.unassigned.push_back(v);
  }
  state.s = simplify(csp, all, PartialAssignment::of({{u, i}}));
  state.t = simplify(csp, all, PartialAssignment::of({{u, j}}));
  return state;
}

int cmd_params(const std::string& instance, const std::string& out) {
  const AtomicCsp csp = AtomicCsp::from_json_file(instance);
  emit(out, params_json(csp).dump(2));
  return kExitOk;
}

int cmd_influence(const std::string& instance, const std::string& out,
                  const std::string& matrix_out) {
  const AtomicCsp csp = AtomicCsp::from_json_file(instance);
  const InfluenceMatrix m = influence_matrix(csp);
  const InfluenceNorms norms = influence_norms(m);
  if (!matrix_out.empty()) emit(matrix_out, matrix_to_csv(m));
  Json j;
  j["schema_version"] = 1;
  j["norm_one"] = norms.one;
  j["norm_inf"] = norms.inf;
  if (csp.num_constraints() > 0) {
    const InstanceParams p = instance_params(csp);
    j["row_bound_k_d1_sq"] = static_cast<double>(p.k) * (p.D + 1.0) * (p.D + 1.0);
  }
  if (matrix_out.empty()) j["matrix_csv"] = matrix_to_csv(m);
  emit(out, j.dump(2));
  return kExitOk;
}

int cmd_couple(const std::string& instance, int u, int i, int j,
               const std::string& mode, long long trials, std::uint64_t seed,
               const std::string& out) {
  const AtomicCsp csp = AtomicCsp::from_json_file(instance);
  const CoupleState state = pinned_pair_state(csp, u, i, j);
  CouplingEngine engine(csp);
  engine.validate_state(state);

  Json rep;
  rep["schema_version"] = 1;
  rep["u"] = u;
  rep["i"] = i;
  rep["j"] = j;
  const auto sym = constraint_set_symmetric_difference(
      canonical_side(state.s), canonical_side(state.t));
  rep["sym_diff_size"] = sym.size();

  bool have_params = false;
  InstanceParams cp{};
  try {
    cp = coupling_input_params(csp, state);
    have_params = true;
  } catch (const ValidationError&) {
    // S union T empty: the coupling is trivial and parameterless.
  }
  if (have_params) {
    rep["input"] = {{"p", cp.p}, {"k", cp.k}, {"D", cp.D},
                    {"chi_min", cp.chi_min}, {"chi_max", cp.chi_max}};
  }

  if (mode == "exact" || mode == "both") {
    const Rat exact = engine.expected_hamming_exact(state);
    rep["exact_expected_hamming"] = rat_to_double(exact);
    rep["exact_expected_hamming_rational"] = rat_to_string(exact);
  }
  if (mode == "montecarlo" || mode == "both") {
    const MonteCarloReport mc = engine.expected_hamming_mc(state, trials, seed);
    rep["mc"] = {{"trials", mc.trials},
                 {"mean_hamming", mc.mean_hamming},
                 {"half_width", mc.half_width},
                 {"disc_bound_ok", mc.disc_bound_ok},
                 {"max_hamming", mc.max_hamming},
                 {"max_bad", mc.max_bad},
                 {"seed", seed}};
  }

  if (have_params && cp.D >= 1 && cp.p > 0 && cp.p < 1 && cp.chi_min > 1) {
    const double delta = cp.chi_max * cp.chi_max;
    const ConditionReport cond =
        check_coupling_condition(delta, cp.chi_min, cp.p, cp.D);
    rep["coupling_condition"] = Json::parse(report_to_json(cond));
    if (cond.satisfied) {
      rep["expected_hamming_bound"] =
          bound_rhs(cp.k, cp.D, delta, static_cast<int>(sym.size()));
    }
  }
  emit(out, rep.dump(2));
  return kExitOk;
}

int cmd_gen(const std::string& family, int n, int q, int k, int m, int delta,
            double lambda, int levels, std::uint64_t seed,
            const std::string& out) {
  if (family == "uniform-atomic") {
    const AtomicCsp csp = gen_uniform_atomic(n, q, k, m, seed);
    emit(out, csp.to_json_text());
    return kExitOk;
  }
  if (family == "hardcore-tree") {
    const FixedPoint fp = fixed_point(lambda, delta);
    TreeInstance inst{delta, levels, lambda, fp.q_star};
    emit(out, build_mu_n_csp(inst).to_json_text());
    return kExitOk;
  }
  throw ArgumentError("unknown family '" + family +
                      "' (expected uniform-atomic or hardcore-tree)");
}

int cmd_hardcore(int delta, double lambda, int levels, double p, int dep,
                 const std::string& out) {
  Json j;
  j["schema_version"] = 1;
  if (p > 0 && dep > 0) {
    const Theorem3Report rep = theorem3_instance(p, dep, levels);
    j["mode"] = "witness-family";
    j["p"] = rep.p;
    j["D"] = rep.D;
    j["lambda"] = rep.lambda;
    j["delta"] = rep.delta;
    j["lambda_c"] = rep.lambda_crit;
    j["r_star"] = rep.fixed.r_star;
    j["q_star"] = rep.fixed.q_star;
    j["margin"] = rep.margin;
    j["levels"] = Json::array();
    for (const auto& lv : rep.levels) {
      j["levels"].push_back({{"levels", lv.levels},
                             {"num_variables", lv.num_variables},
                             {"exact_norm", lv.exact_norm},
                             {"lower_bound", lv.lower_bound}});
    }
    emit(out, j.dump(2));
    return kExitOk;
  }
  const FixedPoint fp = fixed_point(lambda, delta);
  j["mode"] = "fixed-point";
  j["delta"] = delta;
  j["lambda"] = lambda;
  j["lambda_c"] = lambda_c(delta);
  j["r_star"] = fp.r_star;
  j["q_star"] = fp.q_star;
  const double margin = nonuniqueness_margin(delta, fp);
  j["margin"] = margin;
  j["edge_influence"] = -fp.q_star;
  if (margin > 1) {
    j["influence_lower_bound"] = influence_lower_bound(delta, levels, fp);
  }
  const TreeShape shape = tree_shape(delta, levels);
  j["levels"] = levels;
  j["num_variables"] = shape.num_vertices;
  if (shape.num_vertices <= 22) {
    TreeInstance inst{delta, levels, lambda, fp.q_star};
    const AtomicCsp csp = build_mu_n_csp(inst);
    j["exact_norm_inf"] = influence_norms(influence_matrix(csp)).inf;
  }
  emit(out, j.dump(2));
  return kExitOk;
}

struct VerifyTally {
  int checks = 0;
  int failures = 0;
  std::string lines;
  void note(bool ok, const std::string& label, const std::string& detail = "") {
    ++checks;
    if (!ok) ++failures;
    lines += ok ? "[PASS] " : "[FAIL] ";
    lines += label;
    if (!ok && !detail.empty()) lines += ": " + detail;
    lines += '\n';
  }
};

// Invariant battery for one instance: log identities, discrepancy facts,
// witness lemma, threshold conclusions, LLL/HSS inequalities.
void verify_instance(const AtomicCsp& csp, const std::string& tag,
                     long long trials, long long max_states,
                     std::uint64_t seed, VerifyTally& tally) {
  const auto all = all_constraints(csp);
  const Graph dep = dependency_graph(scopes_of(all));
  const InstanceParams params = instance_params(csp);

  // First variable with two feasible values.
  VarId u = -1;
  int vi = -1, vj = -1;
  for (VarId cand = 0; cand < csp.num_variables() && u < 0; ++cand) {
    std::vector<int> feasible;
    for (int value = 0; value < csp.domain_size(cand); ++value) {
      if (event_probability(csp, Event{all, {}, PartialAssignment::of(
                                                    {{cand, value}})}) > 0) {
        feasible.push_back(value);
      }
      if (feasible.size() == 2) break;
    }
    if (feasible.size() == 2) {
      u = cand;
      vi = feasible[0];
      vj = feasible[1];
    }
  }
  if (u < 0) {
    tally.note(true, tag + " no pinnable variable; instance skipped");
    return;
  }

  const CoupleState state = pinned_pair_state(csp, u, vi, vj);
  CouplingEngine engine(csp);
  const auto canon_s = canonical_side(state.s);
  const auto canon_t = canonical_side(state.t);
  const auto sym = constraint_set_symmetric_difference(canon_s, canon_t);
  std::vector<int> sym_origins;
  for (const auto& c : sym) sym_origins.push_back(c.origin);

  const DistributionTable tab_s =
      conditional_table(csp, state.unassigned, state.s, false);
  const DistributionTable tab_t =
      conditional_table(csp, state.unassigned, state.t, false);
  const long long pairs = static_cast<long long>(tab_s.support.size()) *
                          static_cast<long long>(tab_t.support.size());

  if (pairs <= max_states) {
    const auto classes = engine.enumerate_outcomes(state);
    Rat total(0);
    bool log_identity = true;
    bool disc = true;
    bool witness = true;
    Rat expected(0);
    for (const auto& oc : classes) {
      total += oc.probability;
      if (engine.log_probability_exact(state, oc.log) != oc.probability) {
        log_identity = false;
      }
      if (oc.hamming >
          params.k * static_cast<int>(oc.bad.size())) {
        disc = false;
      }
      if (!component_witness(dep, oc.bad, sym_origins).pass) witness = false;
      expected += oc.probability * Rat(oc.hamming);
    }
    tally.note(total == Rat(1), tag + " outcome weights sum to one");
    tally.note(log_identity, tag + " class weights equal log probabilities");
    tally.note(disc, tag + " discrepancy bounded by k x bad size");
    tally.note(witness, tag + " bad components meet the symmetric difference");
    const Rat direct = engine.expected_hamming_exact(state);
    tally.note(direct == expected,
               tag + " recursion matches class-weighted discrepancy");
    if (!sym.empty() && params.D >= 1 && params.p > 0 && params.p < 1 &&
        params.chi_min > 1) {
      const double delta = params.chi_max * params.chi_max;
      const ConditionReport cond =
          check_coupling_condition(delta, params.chi_min, params.p, params.D);
      if (cond.satisfied) {
        const double rhs =
            bound_rhs(params.k, params.D, delta, static_cast<int>(sym.size()));
        tally.note(rat_to_double(direct) <= rhs + 1e-12,
                   tag + " expected discrepancy within theorem budget");
      }
    }
  }

  if (trials > 0) {
    const MonteCarloReport mc = engine.expected_hamming_mc(state, trials, seed);
    tally.note(mc.disc_bound_ok, tag + " sampled discrepancy bound");
    // 4.5 sigma with the worst-case variance keeps the seeded sweep stable
    // while still catching any systematic sampler bias.
    const double tol = 4.5 * std::sqrt(0.25 / static_cast<double>(trials));
    bool margins = true;
    const auto check_side = [&](const DistributionTable& tab,
                                const std::vector<std::vector<long long>>& counts) {
      for (std::size_t idx = 0; idx < state.unassigned.size(); ++idx) {
        const VarId v = state.unassigned[idx];
        const int pv = static_cast<int>(std::lower_bound(tab.vars.begin(),
                                                         tab.vars.end(), v) -
                                        tab.vars.begin());
        std::vector<double> ex(csp.domain_size(v), 0);
        for (std::size_t s = 0; s < tab.support.size(); ++s) {
          ex[tab.support[s][pv]] += tab.mass[s];
        }
        for (int value = 0; value < csp.domain_size(v); ++value) {
          const double got = static_cast<double>(counts[idx][value]) /
                             static_cast<double>(trials);
          if (std::abs(got - ex[value]) > tol) margins = false;
        }
      }
    };
    check_side(tab_s, mc.x_counts);
    check_side(tab_t, mc.y_counts);
    tally.note(margins, tag + " sampled marginals track the conditional laws");
  }

  if (params.p > 0 && params.p < 1 && params.chi_min > 1) {
    const ConditionReport general = check_theorem_general(
        params.chi_max, params.chi_min, params.p, params.D);
    if (general.satisfied) {
      const double norm = influence_norms(influence_matrix(csp)).inf;
      const double cap = params.k * (params.D + 1.0) * (params.D + 1.0);
      tally.note(norm <= cap + 1e-9, tag + " influence norm within k(D+1)^2");
    }
  }

  const double ep = std::exp(1.0) * params.p;
  if (ep * (params.D + 1) <= 1 && ep < 1) {
    const double exact = event_probability(csp, Event{all, {}, {}});
    const double lower = std::pow(1.0 - ep, csp.num_constraints());
    tally.note(exact >= lower - 1e-12,
               tag + " satisfaction probability above the symmetric LLL floor");
    const std::vector<double> x(csp.num_constraints(), ep);
    const DistributionTable law = lll_distribution(csp);
    bool hss = true;
    for (VarId v = 0; v < csp.num_variables() && hss; ++v) {
      const int pv = static_cast<int>(std::lower_bound(law.vars.begin(),
                                                       law.vars.end(), v) -
                                      law.vars.begin());
      for (int value = 0; value < csp.domain_size(v); ++value) {
        double cond_prob = 0;
        for (std::size_t s = 0; s < law.support.size(); ++s) {
          if (law.support[s][pv] == value) cond_prob += law.mass[s];
        }
        const double rhs = hss_rhs(csp, {v}, csp.weight(v, value), x);
        if (cond_prob > rhs + 1e-12) hss = false;
      }
    }
    tally.note(hss, tag + " single-variable conditional probabilities within budget");
  }
}

void verify_negative_control(VerifyTally& tally) {
  // A valid log that is then corrupted must be rejected by the replayer.
  const AtomicCsp csp = gen_uniform_atomic(4, 2, 2, 2, 7);
  const auto all = all_constraints(csp);
  VarId u = -1;
  for (VarId cand = 0; cand < csp.num_variables() && u < 0; ++cand) {
    const bool both =
        event_possible(csp, Event{all, {}, PartialAssignment::of({{cand, 0}})}) &&
        event_possible(csp, Event{all, {}, PartialAssignment::of({{cand, 1}})});
    if (both) u = cand;
  }
  if (u < 0) {
    tally.note(false, "corrupted execution log rejected",
               "no pinnable variable in the control instance");
    return;
  }
  CouplingEngine engine(csp);
  const CoupleState state = pinned_pair_state(csp, u, 0, 1);
  const CoupleOutcome run = engine.couple(state, 11, true);
  bool rejected = false;
  if (run.log.entries.size() >= 2) {
    ExecutionLog corrupted = run.log;
    corrupted.entries.pop_back();
    try {
      engine.log_probability(state, corrupted);
    } catch (const ValidationError&) {
      rejected = true;
    }
  } else {
    ExecutionLog corrupted = run.log;
    LogEntry bogus = corrupted.entries.front();
    bogus.chosen = SimplifiedConstraint{0, {state.unassigned.front()}};
    corrupted.entries.push_back(bogus);
    try {
      engine.log_probability(state, corrupted);
    } catch (const ValidationError&) {
      rejected = true;
    }
  }
  tally.note(rejected, "corrupted execution log rejected");
}

void verify_structure_sweep(VerifyTally& tally) {
  bool count_ok = true, extract_ok = true;
  for (int g_idx = 0; g_idx < 50; ++g_idx) {
    const int n = 5 + g_idx % 8;
    const Graph g = gen_capped_graph(n, 4, n + g_idx % 5, 1000 + g_idx);
    const int d = std::max(g.max_degree(), 1);
    for (int size = 2; size <= 3; ++size) {
      for (int v = 0; v < g.size(); ++v) {
        const auto trees = enumerate_two_trees(g, v, size);
        for (const auto& t : trees) {
          if (!is_two_tree(g, t)) count_ok = false;
        }
        if (static_cast<double>(trees.size()) >
            two_tree_count_bound(d, size)) {
          count_ok = false;
        }
      }
    }
    for (const auto& comp : g.connected_components()) {
      const auto tree = extract_two_tree(g, comp, comp.front());
      if (!is_two_tree(g, tree)) extract_ok = false;
      if (static_cast<double>(tree.size()) * (g.max_degree() + 1) <
          static_cast<double>(comp.size())) {
        extract_ok = false;
      }
    }
  }
  tally.note(count_ok, "2-tree enumeration respects the counting bound");
  tally.note(extract_ok, "greedy 2-tree extraction meets the size floor");
}

void verify_hardcore_sweep(VerifyTally& tally) {
  bool ok = true;
  std::string detail;
  for (double lambda : {5.0, 6.0, 8.0}) {
    const FixedPoint fp = fixed_point(lambda, 3);
    for (int levels : {2, 3}) {
      TreeInstance inst{3, levels, lambda, fp.q_star};
      const AtomicCsp csp = build_mu_n_csp(inst);
      const double norm = influence_norms(influence_matrix(csp)).inf;
      const double lower = influence_lower_bound(3, levels, fp);
      if (norm + 1e-9 < lower) {
        ok = false;
        detail = "lambda=" + std::to_string(lambda) +
                 " levels=" + std::to_string(levels);
      }
    }
  }
  tally.note(ok, "hardcore influence norms dominate the analytic lower bound",
             detail);
}

int cmd_verify(const std::string& instance, int sweep, long long trials,
               long long max_states, std::uint64_t seed) {
  VerifyTally tally;
  if (!instance.empty()) {
    const AtomicCsp csp = AtomicCsp::from_json_file(instance);
    verify_instance(csp, "instance", trials, max_states, seed, tally);
  } else {
    const auto lines = sharded(sweep, [&](int idx) {
      VerifyTally local;
      const int n = 3 + idx % 5;
      const int q = 2 + idx % 2;
      const int k = 2 + (idx / 2) % 2;
      const int m = 1 + idx % 4;
      const AtomicCsp csp = gen_uniform_atomic(n, q, std::min(k, n), m,
                                               CounterRng::derive(seed, idx));
      verify_instance(csp, "sweep[" + std::to_string(idx) + "]", trials,
                      max_states, CounterRng::derive(seed, 1000 + idx), local);
      std::ostringstream pack;
      pack << local.checks << ' ' << local.failures << '\n' << local.lines;
      return pack.str();
    });
    for (const auto& packed : lines) {
      std::istringstream in(packed);
      int checks = 0, failures = 0;
      in >> checks >> failures;
      in.ignore();
      std::string rest((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
      tally.checks += checks;
      tally.failures += failures;
      tally.lines += rest;
    }
    verify_structure_sweep(tally);
    verify_hardcore_sweep(tally);
    verify_negative_control(tally);
  }
  std::cout << tally.lines;
  std::cout << (tally.failures == 0 ? "VERIFY PASS" : "VERIFY FAIL") << " ("
            << tally.checks - tally.failures << "/" << tally.checks
            << " checks)\n";
  return tally.failures == 0 ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale laboratory for atomic-CSP correlation decay"};
  app.require_subcommand(1);

  std::string instance, out, matrix_out, mode = "both", family = "uniform-atomic";
  int u = 0, vi = 0, vj = 1;
  long long trials = 100000, max_states = 1LL << 20;
  std::uint64_t seed = 1;
  int n = 6, q = 2, k = 2, m = 3, delta = 3, levels = 3, sweep = 100, dep = 0;
  double lambda = 6.0, p = 0.0;

  auto* c_params = app.add_subcommand("params", "instance parameters and condition checks");
  c_params->add_option("--instance", instance)->required();
  c_params->add_option("--out", out);

  auto* c_infl = app.add_subcommand("influence", "influence matrix and norms");
  c_infl->add_option("--instance", instance)->required();
  c_infl->add_option("--out", out);
  c_infl->add_option("--matrix-out", matrix_out);

  auto* c_couple = app.add_subcommand("couple", "recursive coupling for a pinned pair");
  c_couple->add_option("--instance", instance)->required();
  c_couple->add_option("--u", u)->required();
  c_couple->add_option("--i", vi)->required();
  c_couple->add_option("--j", vj)->required();
  c_couple->add_option("--mode", mode)->check(CLI::IsMember({"exact", "montecarlo", "both"}));
  c_couple->add_option("--trials", trials);
  c_couple->add_option("--seed", seed);
  c_couple->add_option("--out", out);

  auto* c_gen = app.add_subcommand("gen", "generate an instance file");
  c_gen->add_option("--family", family)->check(CLI::IsMember({"uniform-atomic", "hardcore-tree"}));
  c_gen->add_option("--n", n);
  c_gen->add_option("--q", q);
  c_gen->add_option("--k", k);
  c_gen->add_option("--m", m);
  c_gen->add_option("--delta", delta);
  c_gen->add_option("--lambda", lambda);
  c_gen->add_option("--levels", levels);
  c_gen->add_option("--seed", seed);
  c_gen->add_option("--out", out);

  auto* c_verify = app.add_subcommand("verify", "run the invariant suite");
  c_verify->add_option("--instance", instance);
  c_verify->add_option("--sweep", sweep);
  c_verify->add_option("--trials", trials)->check(CLI::NonNegativeNumber);
  c_verify->add_option("--max-states", max_states);
  c_verify->add_option("--seed", seed);

  auto* c_hard = app.add_subcommand("hardcore", "tree fixed points and lower bounds");
  c_hard->add_option("--delta", delta);
  c_hard->add_option("--lambda", lambda);
  c_hard->add_option("--levels", levels);
  c_hard->add_option("--p", p);
  c_hard->add_option("--dep", dep);
  c_hard->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_params->parsed()) return cmd_params(instance, out);
    if (c_infl->parsed()) return cmd_influence(instance, out, matrix_out);
    if (c_couple->parsed()) {
      if (trials < 1) throw ArgumentError("trial count must be positive");
      return cmd_couple(instance, u, vi, vj, mode, trials, seed, out);
    }
    if (c_gen->parsed())
      return cmd_gen(family, n, q, k, m, delta, lambda, levels, seed, out);
    if (c_verify->parsed())
      return cmd_verify(instance, sweep, trials, max_states, seed);
    if (c_hard->parsed()) return cmd_hardcore(delta, lambda, levels, p, dep, out);
  } catch (const LabError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
