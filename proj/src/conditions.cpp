#include "lll_lab/conditions.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "lll_lab/engine.hpp"
#include "lll_lab/errors.hpp"

namespace lll_lab {

std::string report_to_json(const ConditionReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["name"] = report.name;
  j["lhs"] = report.lhs;
  j["rhs"] = report.rhs;
  j["satisfied"] = report.satisfied;
  j["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.inputs) j["inputs"][key] = value;
  if (!report.note.empty()) j["note"] = report.note;
  return j.dump(2);
}

double zeta(double chi_min) {
  if (!(chi_min > 1)) {
    throw ArgumentError("zeta requires chi_min > 1");
  }
  const double inner = std::log(2.0 - 1.0 / chi_min);
  return 2.0 * inner / (std::log(chi_min) - inner);
}

ConditionReport check_theorem_uniform(int q, double p, int D) {
  if (q < 2) throw ArgumentError("uniform condition requires q >= 2");
  if (!(p > 0) || !(p < 1)) {
    throw ArgumentError("violation probability must lie in (0,1)");
  }
  if (D < 0) throw ArgumentError("dependency degree must be nonnegative");
  const double z = zeta(static_cast<double>(q));
  ConditionReport report;
  report.name = "uniform-domain correlation decay condition";
  report.lhs = 60.0 * std::pow(q, 3) * p * std::pow(D + 1.0, 2.0 + z);
  report.satisfied = report.lhs <= report.rhs;
  report.inputs = {{"q", static_cast<double>(q)},
                   {"p", p},
                   {"D", static_cast<double>(D)},
                   {"zeta", z},
                   {"exponent", 2.0 + z}};
  return report;
}

ConditionReport check_theorem_general(double chi_max, double chi_min, double p,
                                      int D) {
  if (!(chi_min > 1) || !(chi_max >= chi_min)) {
    throw ArgumentError("distortions must satisfy chi_max >= chi_min > 1");
  }
  if (!(p > 0) || !(p < 1)) {
    throw ArgumentError("violation probability must lie in (0,1)");
  }
  if (D < 0) throw ArgumentError("dependency degree must be nonnegative");
  const double z = zeta(chi_min);
  ConditionReport report;
  report.name = "general-domain correlation decay condition";
  report.lhs = std::pow(2.0 * std::exp(1.0), 1.0 + z / 2.0) *
               std::pow(chi_max, 3) * p * std::pow(D + 1.0, 2.0 + z);
  report.satisfied = report.lhs <= report.rhs;
  report.inputs = {{"chi_max", chi_max}, {"chi_min", chi_min}, {"p", p},
                   {"D", static_cast<double>(D)}, {"zeta", z},
                   {"exponent", 2.0 + z}};
  return report;
}

ConditionReport check_coupling_condition(double delta, double chi_min, double p,
                                         int D) {
  if (!(delta >= 1)) throw ArgumentError("delta must be at least one");
  if (!(chi_min > 1)) throw ArgumentError("chi_min must exceed one");
  if (!(p > 0) || !(p < 1)) {
    throw ArgumentError("violation probability must lie in (0,1)");
  }
  if (D < 1) {
    throw ArgumentError(
        "the expected-discrepancy bound requires dependency degree D >= 1");
  }
  const double z = zeta(chi_min);
  ConditionReport report;
  report.name = "coupling expected-discrepancy condition";
  report.lhs = std::pow(2.0 * std::exp(1.0), 1.0 + z / 2.0) * delta * p *
               std::pow(D + 1.0, 2.0 + z);
  report.satisfied = report.lhs <= report.rhs;
  report.inputs = {{"delta", delta}, {"chi_min", chi_min}, {"p", p},
                   {"D", static_cast<double>(D)}, {"zeta", z},
                   {"exponent", 2.0 + z}};
  return report;
}

ConditionReport check_asymmetric_lll(const AtomicCsp& csp,
                                     const std::vector<double>& x) {
  const int m = csp.num_constraints();
  if (static_cast<int>(x.size()) != m) {
    throw ArgumentError("x must assign a value to every constraint");
  }
  for (double xi : x) {
    if (!(xi > 0) || !(xi < 1)) {
      throw ArgumentError("x values must lie strictly inside (0,1)");
    }
  }
  const auto constraints = all_constraints(csp);
  const Graph dep = dependency_graph(scopes_of(constraints));
  ConditionReport report;
  report.name = "asymmetric local lemma condition";
  report.satisfied = true;
  double worst = 0;
  for (int c = 0; c < m; ++c) {
    double budget = x[c];
    for (int nb : dep.neighbors(c)) budget *= 1.0 - x[nb];
    const double ratio = violation_probability(csp, constraints[c]) / budget;
    worst = std::max(worst, ratio);
  }
  report.lhs = worst;
  report.satisfied = worst <= 1.0;
  double lower = 1.0;
  for (int c = 0; c < m; ++c) lower *= 1.0 - x[c];
  report.inputs = {{"num_constraints", static_cast<double>(m)},
                   {"satisfaction_lower_bound", lower}};
  try {
    const double exact = event_probability(csp, Event{constraints, {}, {}});
    report.inputs["exact_satisfaction_probability"] = exact;
    report.inputs["lower_bound_holds"] = exact >= lower ? 1.0 : 0.0;
  } catch (const LimitError&) {
    report.note = "exact satisfaction probability skipped (space too large)";
  }
  return report;
}

std::vector<double> symmetric_x(const AtomicCsp& csp) {
  const InstanceParams params = instance_params(csp);
  const double value = std::exp(1.0) * params.p;
  if (!(value > 0) || !(value < 1)) {
    throw ArgumentError("symmetric x = e*p must lie in (0,1); got " +
                        std::to_string(value));
  }
  return std::vector<double>(csp.num_constraints(), value);
}

double hss_rhs(const AtomicCsp& csp, const std::vector<VarId>& event_scope,
               double event_prob, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != csp.num_constraints()) {
    throw ArgumentError("x must assign a value to every constraint");
  }
  if (!(event_prob >= 0) || !(event_prob <= 1)) {
    throw ArgumentError("event probability must lie in [0,1]");
  }
  std::vector<VarId> scope = event_scope;
  std::sort(scope.begin(), scope.end());
  double rhs = event_prob;
  for (int c = 0; c < csp.num_constraints(); ++c) {
    bool meets = false;
    for (VarId v : csp.constraint(c).scope) {
      if (std::binary_search(scope.begin(), scope.end(), v)) {
        meets = true;
        break;
      }
    }
    if (!meets) continue;
    if (x[c] >= 1) {
      throw ArgumentError("x value for constraint " + std::to_string(c) +
                          " must be below one");
    }
    rhs /= 1.0 - x[c];
  }
  return rhs;
}

}  // namespace lll_lab
