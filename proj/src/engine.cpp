#include "lll_lab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"

namespace lll_lab {

namespace {

using Json = nlohmann::ordered_json;

// ==== mixed-radix space ======================================================

std::string origins_of(const std::vector<SimplifiedConstraint>& cs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) out << ",";
    out << cs[i].origin;
  }
  return out.str();
}

// Constraint compiled against a VarSpace under a pin: `cells` are (position,
// forbidden value) pairs for the in-space variables.  Constraints decided by
// the pin alone are resolved before enumeration.
struct CompiledCells {
  std::vector<std::pair<int, int>> cells;
};

enum class PinVerdict { kUndecided, kSatisfied, kViolated };

// Resolve a constraint against the pin: satisfied once any pinned variable
// differs from its forbidden value, violated if the pin matches it on the
// whole remaining set.
PinVerdict pin_verdict(const AtomicCsp& csp, const SimplifiedConstraint& c,
                       const PartialAssignment& pin, std::vector<VarId>* rest) {
  bool all_pinned = true;
  if (rest) rest->clear();
  for (VarId v : c.remaining) {
    if (pin.has(v)) {
      if (pin.value_of(v) != csp.forbidden_value(c.origin, v)) {
        return PinVerdict::kSatisfied;
      }
    } else {
      all_pinned = false;
      if (rest) rest->push_back(v);
    }
  }
  return all_pinned ? PinVerdict::kViolated : PinVerdict::kUndecided;
}

// Exact weights are the dyadic lifts of the stored doubles, normalized per
// variable so that each domain's weights sum to exactly one; stored weights
// are only required to sum to one within tolerance.
Rat exact_weight_total(const AtomicCsp& csp, VarId v) {
  Rat total(0);
  for (double w : csp.variable(v).weights) total += rat_of_double(w);
  return total;
}

Rat exact_weight(const AtomicCsp& csp, VarId v, int value) {
  return rat_of_double(csp.weight(v, value)) / exact_weight_total(csp, v);
}

template <class T>
T lift_weight(const AtomicCsp& csp, VarId v, int value) {
  return T(csp.weight(v, value));
}

template <>
Rat lift_weight<Rat>(const AtomicCsp& csp, VarId v, int value) {
  return exact_weight(csp, v, value);
}

template <class T>
std::vector<std::vector<T>> weights_in(const AtomicCsp& csp,
                                       const VarSpace& space);

template <>
std::vector<std::vector<double>> weights_in(const AtomicCsp& csp,
                                            const VarSpace& space) {
  std::vector<std::vector<double>> w(space.vars.size());
  for (std::size_t i = 0; i < space.vars.size(); ++i) {
    w[i] = csp.variable(space.vars[i]).weights;
  }
  return w;
}

template <>
std::vector<std::vector<Rat>> weights_in(const AtomicCsp& csp,
                                         const VarSpace& space) {
  std::vector<std::vector<Rat>> w(space.vars.size());
  for (std::size_t i = 0; i < space.vars.size(); ++i) {
    const Rat total = exact_weight_total(csp, space.vars[i]);
    for (double wd : csp.variable(space.vars[i]).weights) {
      w[i].push_back(rat_of_double(wd) / total);
    }
  }
  return w;
}

// Odometer sweep over the space with incrementally maintained weight
// products; visit(code, digits, weight).
template <class T, class Visit>
void enumerate_space(const VarSpace& space,
                     const std::vector<std::vector<T>>& w, Visit&& visit) {
  const int n = static_cast<int>(space.vars.size());
  std::vector<int> digits(n, 0);
  std::vector<T> prefix(n + 1, T(1));
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * w[i][0];
  for (long long code = 0; code < space.total; ++code) {
    visit(code, digits, prefix[n]);
    int p = n - 1;
    while (p >= 0 && digits[p] == space.radix[p] - 1) {
      digits[p] = 0;
      --p;
    }
    if (p < 0) break;
    ++digits[p];
    for (int i = p; i < n; ++i) prefix[i + 1] = prefix[i] * w[i][digits[i]];
  }
}

bool holds(const CompiledCells& c, const std::vector<int>& digits) {
  for (const auto& [pos, forbidden] : c.cells) {
    if (digits[pos] != forbidden) return true;
  }
  return false;
}

bool fully_matched(const CompiledCells& c, const std::vector<int>& digits) {
  for (const auto& [pos, forbidden] : c.cells) {
    if (digits[pos] != forbidden) return false;
  }
  return true;
}

// Deterministic pairwise reduction of per-block partial sums; the block
// boundaries are fixed by kReduceBlock alone, so the rounding pattern does
// not depend on how the work is scheduled.
constexpr long long kReduceBlock = 1 << 16;

double pairwise_total(std::vector<double> blocks) {
  if (blocks.empty()) return 0;
  while (blocks.size() > 1) {
    std::vector<double> next;
    next.reserve((blocks.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < blocks.size(); i += 2) {
      next.push_back(blocks[i] + blocks[i + 1]);
    }
    if (blocks.size() % 2) next.push_back(blocks.back());
    blocks.swap(next);
  }
  return blocks[0];
}

struct EnumPlan {
  VarSpace space;
  std::vector<CompiledCells> satisfied;
  std::vector<CompiledCells> violated;
  bool impossible = false;  // decided false by the pin alone
};

// Build the enumeration plan over exactly the variables the event mentions
// (minus pins); unmentioned variables integrate out to 1.
EnumPlan plan_event(const AtomicCsp& csp, const Event& event) {
  EnumPlan plan;
  std::vector<VarId> relevant;
  std::vector<const SimplifiedConstraint*> keep_sat, keep_vio;
  std::vector<VarId> rest;
  for (const auto& c : event.satisfied) {
    switch (pin_verdict(csp, c, event.pin, &rest)) {
      case PinVerdict::kSatisfied:
        break;
      case PinVerdict::kViolated:
        plan.impossible = true;
        return plan;
      case PinVerdict::kUndecided:
        keep_sat.push_back(&c);
        relevant.insert(relevant.end(), rest.begin(), rest.end());
        break;
    }
  }
  for (const auto& c : event.violated) {
    switch (pin_verdict(csp, c, event.pin, &rest)) {
      case PinVerdict::kSatisfied:
        plan.impossible = true;
        return plan;
      case PinVerdict::kViolated:
        break;
      case PinVerdict::kUndecided:
        keep_vio.push_back(&c);
        relevant.insert(relevant.end(), rest.begin(), rest.end());
        break;
    }
  }
  std::sort(relevant.begin(), relevant.end());
  relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());
  plan.space = VarSpace::over(csp, relevant);
  auto compile = [&](const SimplifiedConstraint& c) {
    CompiledCells out;
    for (VarId v : c.remaining) {
      if (auto pos = plan.space.position_of(v)) {
        out.cells.push_back({*pos, csp.forbidden_value(c.origin, v)});
      }
    }
    return out;
  };
  for (const auto* c : keep_sat) plan.satisfied.push_back(compile(*c));
  for (const auto* c : keep_vio) plan.violated.push_back(compile(*c));
  return plan;
}

template <class T>
T pin_weight(const AtomicCsp& csp, const PartialAssignment& pin) {
  T w(1);
  for (const auto& [v, val] : pin.items()) {
    w = w * T(csp.weight(v, val));
  }
  return w;
}

template <>
Rat pin_weight<Rat>(const AtomicCsp& csp, const PartialAssignment& pin) {
  Rat w(1);
  for (const auto& [v, val] : pin.items()) {
    w *= exact_weight(csp, v, val);
  }
  return w;
}

bool event_holds(const EnumPlan& plan, const std::vector<int>& digits) {
  for (const auto& c : plan.satisfied) {
    if (!holds(c, digits)) return false;
  }
  for (const auto& c : plan.violated) {
    if (!fully_matched(c, digits)) return false;
  }
  return true;
}

double enum_probability_double(const AtomicCsp& csp, const Event& event) {
  EnumPlan plan = plan_event(csp, event);
  if (plan.impossible) return 0;
  const auto w = weights_in<double>(csp, plan.space);
  std::vector<double> blocks;
  double block = 0;
  long long in_block = 0;
  enumerate_space<double>(plan.space, w,
                          [&](long long, const std::vector<int>& digits,
                              const double& weight) {
                            if (event_holds(plan, digits)) block += weight;
                            if (++in_block == kReduceBlock) {
                              blocks.push_back(block);
                              block = 0;
                              in_block = 0;
                            }
                          });
  if (in_block > 0) blocks.push_back(block);
  return pin_weight<double>(csp, event.pin) * pairwise_total(std::move(blocks));
}

Rat enum_probability_exact(const AtomicCsp& csp, const Event& event) {
  EnumPlan plan = plan_event(csp, event);
  if (plan.impossible) return Rat(0);
  const auto w = weights_in<Rat>(csp, plan.space);
  Rat sum(0);
  enumerate_space<Rat>(plan.space, w,
                       [&](long long, const std::vector<int>& digits,
                           const Rat& weight) {
                         if (event_holds(plan, digits)) sum += weight;
                       });
  return pin_weight<Rat>(csp, event.pin) * sum;
}

// Required-value maps for the inclusion–exclusion path: sorted (var, value)
// vectors; nullopt marks a conflict (probability-zero term).
using Requirements = std::vector<std::pair<VarId, int>>;

bool add_requirement(Requirements& req, VarId v, int value) {
  auto it = std::lower_bound(
      req.begin(), req.end(), std::make_pair(v, 0),
      [](const auto& a, const auto& b) { return a.first < b.first; });
  if (it != req.end() && it->first == v) return it->second == value;
  req.insert(it, {v, value});
  return true;
}

constexpr int kInclExclCap = 20;

template <class T>
T incl_excl_probability(const AtomicCsp& csp, const Event& event) {
  Requirements base;
  for (const auto& [v, val] : event.pin.items()) {
    if (!add_requirement(base, v, val)) return T(0);
  }
  for (const auto& c : event.violated) {
    for (VarId v : c.remaining) {
      if (!add_requirement(base, v, csp.forbidden_value(c.origin, v))) {
        return T(0);
      }
    }
  }
  // Constraints already decided by the base requirements can be dropped (or
  // kill the event) up front.
  std::vector<const SimplifiedConstraint*> undecided;
  for (const auto& c : event.satisfied) {
    bool decided_violated = true;
    bool decided = true;
    for (VarId v : c.remaining) {
      auto it = std::lower_bound(
          base.begin(), base.end(), std::make_pair(v, 0),
          [](const auto& a, const auto& b) { return a.first < b.first; });
      if (it == base.end() || it->first != v) {
        decided = false;
        decided_violated = false;
      } else if (it->second != csp.forbidden_value(c.origin, v)) {
        decided_violated = false;
        decided = true;
        break;  // satisfied for sure
      }
    }
    if (decided && decided_violated) return T(0);
    if (!decided) undecided.push_back(&c);
  }
  const int m = static_cast<int>(undecided.size());
  if (m > kInclExclCap) {
    throw LimitError("inclusion-exclusion over " + std::to_string(m) +
                     " constraints exceeds the cap of " +
                     std::to_string(kInclExclCap));
  }
  T total(0);
  for (unsigned long mask = 0; mask < (1ull << m); ++mask) {
    Requirements req = base;
    bool ok = true;
    for (int i = 0; i < m && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      const auto& c = *undecided[i];
      for (VarId v : c.remaining) {
        if (!add_requirement(req, v, csp.forbidden_value(c.origin, v))) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) continue;
    T term(1);
    for (const auto& [v, val] : req) term = term * lift_weight<T>(csp, v, val);
    if (__builtin_popcountll(mask) % 2) {
      total = total - term;
    } else {
      total = total + term;
    }
  }
  return total;
}

long long relevant_space_size(const AtomicCsp& csp, const Event& event) {
  // Upper bound without building the space (no guard throw).
  std::vector<VarId> relevant;
  for (const auto& c : event.satisfied) {
    for (VarId v : c.remaining) {
      if (!event.pin.has(v)) relevant.push_back(v);
    }
  }
  for (const auto& c : event.violated) {
    for (VarId v : c.remaining) {
      if (!event.pin.has(v)) relevant.push_back(v);
    }
  }
  std::sort(relevant.begin(), relevant.end());
  relevant.erase(std::unique(relevant.begin(), relevant.end()),
                 relevant.end());
  long long total = 1;
  for (VarId v : relevant) {
    total *= csp.domain_size(v);
    if (total > kEnumGuard) return total;
  }
  return total;
}

}  // namespace

// ==== VarSpace ===============================================================

VarSpace VarSpace::over(const AtomicCsp& csp, std::vector<VarId> vars,
                        long long guard) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  VarSpace space;
  space.vars = std::move(vars);
  space.radix.reserve(space.vars.size());
  for (VarId v : space.vars) space.radix.push_back(csp.domain_size(v));
  space.stride.assign(space.vars.size(), 1);
  space.total = 1;
  for (int i = static_cast<int>(space.vars.size()) - 1; i >= 0; --i) {
    space.stride[i] = space.total;
    space.total *= space.radix[i];
    if (space.total > guard) {
      throw LimitError("state space over " +
                       std::to_string(space.vars.size()) +
                       " variables exceeds the enumeration guardrail (" +
                       std::to_string(guard) + " states)");
    }
  }
  return space;
}

void VarSpace::decode(long long code, std::vector<int>& digits) const {
  digits.resize(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    digits[i] = static_cast<int>(code / stride[i] % radix[i]);
  }
}

long long VarSpace::encode(const std::vector<int>& digits) const {
  long long code = 0;
  for (std::size_t i = 0; i < vars.size(); ++i) code += digits[i] * stride[i];
  return code;
}

std::optional<int> VarSpace::position_of(VarId v) const {
  const auto it = std::lower_bound(vars.begin(), vars.end(), v);
  if (it == vars.end() || *it != v) return std::nullopt;
  return static_cast<int>(it - vars.begin());
}

// ==== event probabilities ====================================================

double event_probability_enum(const AtomicCsp& csp, const Event& event) {
  return enum_probability_double(csp, event);
}

double event_probability_incl_excl(const AtomicCsp& csp, const Event& event) {
  return incl_excl_probability<double>(csp, event);
}

Rat event_probability_exact(const AtomicCsp& csp, const Event& event) {
  if (relevant_space_size(csp, event) <= kEnumGuard) {
    return enum_probability_exact(csp, event);
  }
  return incl_excl_probability<Rat>(csp, event);
}

double event_probability(const AtomicCsp& csp, const Event& event) {
  if (relevant_space_size(csp, event) <= kEnumGuard) {
    return event_probability_enum(csp, event);
  }
  return event_probability_incl_excl(csp, event);
}

bool event_possible(const AtomicCsp& csp, const Event& event) {
  EnumPlan plan = plan_event(csp, event);
  if (plan.impossible) return false;
  const long long total = plan.space.total;
  std::vector<int> digits(plan.space.vars.size(), 0);
  for (long long code = 0; code < total; ++code) {
    if (event_holds(plan, digits)) return true;
    for (int i = static_cast<int>(digits.size()) - 1; i >= 0; --i) {
      if (++digits[i] < plan.space.radix[i]) break;
      digits[i] = 0;
    }
  }
  return false;
}

double conditional_probability(const AtomicCsp& csp, const Event& event,
                               const Event& given) {
  const double denom = event_probability(csp, given);
  if (denom <= 0) {
    throw UnsatisfiableError(
        "conditioning event has probability zero (constraints {" +
        origins_of(given.satisfied) + "} with " +
        std::to_string(given.pin.size()) + " pinned variables)");
  }
  Event joint;
  joint.satisfied =
      constraint_set_union(event.satisfied, given.satisfied);
  joint.violated = constraint_set_union(event.violated, given.violated);
  joint.pin = given.pin;
  for (const auto& [v, val] : event.pin.items()) {
    if (joint.pin.has(v)) {
      if (joint.pin.value_of(v) != val) return 0;  // conflicting pins
    } else {
      joint.pin.set(v, val);
    }
  }
  return event_probability(csp, joint) / denom;
}

// ==== conditional tables =====================================================

DistributionTable conditional_table(
    const AtomicCsp& csp, const std::vector<VarId>& universe,
    const std::vector<SimplifiedConstraint>& constraints, bool exact) {
  VarSpace space = VarSpace::over(csp, universe);
  for (const auto& c : constraints) {
    for (VarId v : c.remaining) {
      if (!space.position_of(v)) {
        throw ValidationError("constraint " + std::to_string(c.origin) +
                              " mentions variable " + std::to_string(v) +
                              " outside the requested universe");
      }
    }
  }
  std::vector<CompiledCells> compiled;
  compiled.reserve(constraints.size());
  for (const auto& c : constraints) {
    CompiledCells cells;
    for (VarId v : c.remaining) {
      cells.cells.push_back(
          {*space.position_of(v), csp.forbidden_value(c.origin, v)});
    }
    compiled.push_back(std::move(cells));
  }
  auto all_hold = [&](const std::vector<int>& digits) {
    for (const auto& c : compiled) {
      if (!holds(c, digits)) return false;
    }
    return true;
  };

  DistributionTable table;
  table.vars = space.vars;
  const auto w = weights_in<double>(csp, space);
  enumerate_space<double>(space, w,
                          [&](long long, const std::vector<int>& digits,
                              const double& weight) {
                            if (all_hold(digits)) {
                              table.support.push_back(digits);
                              table.mass.push_back(weight);
                            }
                          });
  if (table.support.empty()) {
    throw UnsatisfiableError("constraint set {" + origins_of(constraints) +
                             "} is unsatisfiable over the given variables");
  }
  if (exact) {
    table.has_exact = true;
    table.mass_exact.reserve(table.mass.size());
    Rat z(0);
    for (const auto& digits : table.support) {
      Rat m(1);
      for (std::size_t i = 0; i < digits.size(); ++i) {
        m *= rat_of_double(csp.weight(space.vars[i], digits[i]));
      }
      table.mass_exact.push_back(m);
      z += m;
    }
    for (auto& m : table.mass_exact) m /= z;
  }
  std::vector<double> blocks;
  for (std::size_t i = 0; i < table.mass.size(); i += kReduceBlock) {
    double b = 0;
    for (std::size_t j = i;
         j < std::min(table.mass.size(),
                      i + static_cast<std::size_t>(kReduceBlock));
         ++j) {
      b += table.mass[j];
    }
    blocks.push_back(b);
  }
  const double z = pairwise_total(std::move(blocks));
  for (auto& m : table.mass) m /= z;
  return table;
}

DistributionTable lll_distribution(const AtomicCsp& csp, bool exact) {
  try {
    return conditional_table(csp, csp.all_variables(), all_constraints(csp),
                             exact);
  } catch (const UnsatisfiableError&) {
    throw UnsatisfiableError("instance is unsatisfiable");
  }
}

std::vector<double> conditional_block_marginal(
    const AtomicCsp& csp, const std::vector<SimplifiedConstraint>& constraints,
    const std::vector<VarId>& block) {
  std::vector<VarId> relevant = block;
  for (const auto& c : constraints) {
    relevant.insert(relevant.end(), c.remaining.begin(), c.remaining.end());
  }
  VarSpace space = VarSpace::over(csp, relevant);
  VarSpace block_space = VarSpace::over(csp, block);
  std::vector<int> block_pos(block_space.vars.size());
  for (std::size_t i = 0; i < block_space.vars.size(); ++i) {
    block_pos[i] = *space.position_of(block_space.vars[i]);
  }
  std::vector<CompiledCells> compiled;
  for (const auto& c : constraints) {
    CompiledCells cells;
    for (VarId v : c.remaining) {
      cells.cells.push_back(
          {*space.position_of(v), csp.forbidden_value(c.origin, v)});
    }
    compiled.push_back(std::move(cells));
  }
  std::vector<double> acc(block_space.total, 0.0);
  double z = 0;
  const auto w = weights_in<double>(csp, space);
  enumerate_space<double>(
      space, w,
      [&](long long, const std::vector<int>& digits, const double& weight) {
        for (const auto& c : compiled) {
          if (!holds(c, digits)) return;
        }
        long long code = 0;
        for (std::size_t i = 0; i < block_pos.size(); ++i) {
          code += digits[block_pos[i]] * block_space.stride[i];
        }
        acc[code] += weight;
        z += weight;
      });
  if (z <= 0) {
    throw UnsatisfiableError("constraint set {" + origins_of(constraints) +
                             "} is unsatisfiable");
  }
  for (auto& m : acc) m /= z;
  return acc;
}

std::vector<Rat> conditional_block_marginal_exact(
    const AtomicCsp& csp, const std::vector<SimplifiedConstraint>& constraints,
    const std::vector<VarId>& block) {
  std::vector<VarId> relevant = block;
  for (const auto& c : constraints) {
    relevant.insert(relevant.end(), c.remaining.begin(), c.remaining.end());
  }
  VarSpace space = VarSpace::over(csp, relevant);
  VarSpace block_space = VarSpace::over(csp, block);
  std::vector<int> block_pos(block_space.vars.size());
  for (std::size_t i = 0; i < block_space.vars.size(); ++i) {
    block_pos[i] = *space.position_of(block_space.vars[i]);
  }
  std::vector<CompiledCells> compiled;
  for (const auto& c : constraints) {
    CompiledCells cells;
    for (VarId v : c.remaining) {
      cells.cells.push_back(
          {*space.position_of(v), csp.forbidden_value(c.origin, v)});
    }
    compiled.push_back(std::move(cells));
  }
  std::vector<Rat> acc(block_space.total, Rat(0));
  Rat z(0);
  const auto w = weights_in<Rat>(csp, space);
  enumerate_space<Rat>(
      space, w,
      [&](long long, const std::vector<int>& digits, const Rat& weight) {
        for (const auto& c : compiled) {
          if (!holds(c, digits)) return;
        }
        long long code = 0;
        for (std::size_t i = 0; i < block_pos.size(); ++i) {
          code += digits[block_pos[i]] * block_space.stride[i];
        }
        acc[code] += weight;
        z += weight;
      });
  if (z == 0) {
    throw UnsatisfiableError("constraint set {" + origins_of(constraints) +
                             "} is unsatisfiable");
  }
  for (auto& m : acc) m /= z;
  return acc;
}

// ==== marginals and influence ================================================

std::vector<double> pinned_marginal(const AtomicCsp& csp, VarId u, int value,
                                    VarId v) {
  if (u < 0 || u >= csp.num_variables() || v < 0 || v >= csp.num_variables()) {
    throw ArgumentError("pinned_marginal: variable id out of range");
  }
  if (value < 0 || value >= csp.domain_size(u)) {
    throw ArgumentError("pinned_marginal: pin value outside the domain");
  }
  Event given;
  given.satisfied = all_constraints(csp);
  given.pin.set(u, value);
  const double denom = event_probability(csp, given);
  if (denom <= 0) {
    throw UnsatisfiableError("pin " + std::to_string(u) + " <- " +
                             std::to_string(value) +
                             " has probability zero under the instance");
  }
  std::vector<double> out(csp.domain_size(v), 0.0);
  for (int val = 0; val < csp.domain_size(v); ++val) {
    if (v == u) {
      out[val] = (val == value) ? 1.0 : 0.0;
      continue;
    }
    Event joint = given;
    joint.pin.set(v, val);
    out[val] = event_probability(csp, joint) / denom;
  }
  return out;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw ValidationError("tv_distance: value universes differ (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + " values)");
  }
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return 0.5 * s;
}

InfluenceMatrix influence_matrix(const AtomicCsp& csp) {
  const int n = csp.num_variables();
  InfluenceMatrix out;
  out.n = n;
  out.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
  if (csp.num_constraints() == 0) return out;  // product measure: no influence

  const DistributionTable table = lll_distribution(csp);
  int qmax = 0;
  for (int v = 0; v < n; ++v) qmax = std::max(qmax, csp.domain_size(v));
  // acc[((u*qmax)+i)*n*qmax + v*qmax + val] = Pr[u=i, v=val | everything]
  std::vector<double> acc(static_cast<std::size_t>(n) * qmax * n * qmax, 0.0);
  std::vector<double> pin_mass(static_cast<std::size_t>(n) * qmax, 0.0);
  for (std::size_t e = 0; e < table.support.size(); ++e) {
    const auto& digits = table.support[e];
    const double m = table.mass[e];
    for (int u = 0; u < n; ++u) {
      pin_mass[u * qmax + digits[u]] += m;
      const std::size_t base =
          (static_cast<std::size_t>(u) * qmax + digits[u]) * n * qmax;
      for (int v = 0; v < n; ++v) {
        acc[base + static_cast<std::size_t>(v) * qmax + digits[v]] += m;
      }
    }
  }
  for (int u = 0; u < n; ++u) {
    std::vector<int> feasible;
    for (int i = 0; i < csp.domain_size(u); ++i) {
      if (pin_mass[u * qmax + i] > 0) feasible.push_back(i);
    }
    for (int v = 0; v < n; ++v) {
      if (v == u) continue;
      double worst = 0;
      for (std::size_t a = 0; a < feasible.size(); ++a) {
        for (std::size_t b = a + 1; b < feasible.size(); ++b) {
          const int i = feasible[a], j = feasible[b];
          const double mi = pin_mass[u * qmax + i];
          const double mj = pin_mass[u * qmax + j];
          double tv = 0;
          for (int val = 0; val < csp.domain_size(v); ++val) {
            const std::size_t iv =
                (static_cast<std::size_t>(u) * qmax + i) * n * qmax +
                static_cast<std::size_t>(v) * qmax + val;
            const std::size_t jv =
                (static_cast<std::size_t>(u) * qmax + j) * n * qmax +
                static_cast<std::size_t>(v) * qmax + val;
            tv += std::fabs(acc[iv] / mi - acc[jv] / mj);
          }
          worst = std::max(worst, 0.5 * tv);
        }
      }
      out.entries[static_cast<std::size_t>(u) * n + v] = worst;
    }
  }
  return out;
}

InfluenceNorms influence_norms(const InfluenceMatrix& m) {
  InfluenceNorms norms;
  for (int v = 0; v < m.n; ++v) {
    double col = 0;
    for (int u = 0; u < m.n; ++u) col += m.at(u, v);
    norms.one = std::max(norms.one, col);
  }
  for (int u = 0; u < m.n; ++u) {
    double row = 0;
    for (int v = 0; v < m.n; ++v) row += m.at(u, v);
    norms.inf = std::max(norms.inf, row);
  }
  return norms;
}

double signed_influence(const AtomicCsp& csp, VarId u, VarId v) {
  if (u == v) {
    throw ArgumentError("signed influence requires distinct variables");
  }
  if (csp.domain_size(u) != 2 || csp.domain_size(v) != 2) {
    throw ArgumentError(
        "signed influence is defined for Boolean variables only");
  }
  const auto up = pinned_marginal(csp, u, 1, v);
  const auto down = pinned_marginal(csp, u, 0, v);
  return up[1] - down[1];
}

double coupling_norm_bound(double expected_hamming_bound, double chi_max) {
  if (!(chi_max > 0)) {
    throw ArgumentError("coupling_norm_bound: chi_max must be positive");
  }
  return chi_max * chi_max * expected_hamming_bound;
}

// ==== serialization ==========================================================

std::string matrix_to_csv(const InfluenceMatrix& m) {
  std::ostringstream out;
  out.precision(17);
  out << "var";
  for (int v = 0; v < m.n; ++v) out << "," << v;
  out << "\n";
  for (int u = 0; u < m.n; ++u) {
    out << u;
    for (int v = 0; v < m.n; ++v) out << "," << m.at(u, v);
    out << "\n";
  }
  return out.str();
}

std::string distribution_to_json(const AtomicCsp& csp,
                                 const DistributionTable& table) {
  Json doc;
  doc["schema_version"] = 1;
  doc["variables"] = table.vars;
  doc["entries"] = Json::array();
  for (std::size_t e = 0; e < table.support.size(); ++e) {
    Json entry;
    Json labels = Json::array();
    for (std::size_t i = 0; i < table.vars.size(); ++i) {
      labels.push_back(csp.variable(table.vars[i]).domain[table.support[e][i]]);
    }
    entry["assignment"] = labels;
    entry["mass"] = table.mass[e];
    if (table.has_exact) {
      entry["mass_exact"] = rat_to_string(table.mass_exact[e]);
    }
    doc["entries"].push_back(entry);
  }
  return doc.dump(2);
}

}  // namespace lll_lab
