#include "lll_lab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "json.hpp"

namespace lll_lab {

namespace {

constexpr long long kPairGuard = 1LL << 24;

void push_i32(std::string& out, int v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

CoupleState canon_state(const CoupleState& state) {
  CoupleState c = state;
  std::sort(c.unassigned.begin(), c.unassigned.end());
  c.unassigned.erase(std::unique(c.unassigned.begin(), c.unassigned.end()),
                     c.unassigned.end());
  auto canon_side = [](std::vector<SimplifiedConstraint>& side) {
    std::sort(side.begin(), side.end());
    side.erase(std::unique(side.begin(), side.end()), side.end());
  };
  canon_side(c.s);
  canon_side(c.t);
  return c;
}

PartialAssignment assignment_over(const std::vector<VarId>& u0,
                                  const std::vector<int>& dense) {
  std::vector<std::pair<VarId, int>> items;
  for (VarId v : u0) {
    if (dense[v] >= 0) items.emplace_back(v, dense[v]);
  }
  return PartialAssignment::of(std::move(items));
}

nlohmann::ordered_json constraint_json(const SimplifiedConstraint& c) {
  nlohmann::ordered_json j;
  j["origin"] = c.origin;
  j["remaining"] = c.remaining;
  return j;
}

nlohmann::ordered_json assignment_json(const PartialAssignment& a) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& [v, val] : a.items()) j.push_back({v, val});
  return j;
}

}  // namespace

std::string log_to_json_lines(const ExecutionLog& log) {
  std::string out;
  for (const auto& e : log.entries) {
    nlohmann::ordered_json j;
    j["unassigned"] = e.unassigned;
    j["s"] = nlohmann::ordered_json::array();
    for (const auto& c : e.s) j["s"].push_back(constraint_json(c));
    j["t"] = nlohmann::ordered_json::array();
    for (const auto& c : e.t) j["t"].push_back(constraint_json(c));
    if (e.chosen) {
      j["chosen"] = constraint_json(*e.chosen);
    } else {
      j["chosen"] = nullptr;
    }
    j["x"] = assignment_json(e.x);
    j["y"] = assignment_json(e.y);
    out += j.dump();
    out += '\n';
  }
  return out;
}

double bound_rhs(int k, int D, double delta, int sym_diff_size) {
  if (k < 1) throw ArgumentError("width parameter must be at least one");
  if (D < 1) {
    throw ArgumentError(
        "dependency degree must be at least one for the discrepancy bound");
  }
  if (delta < 1) throw ArgumentError("distortion parameter must be at least one");
  if (sym_diff_size < 0) {
    throw ArgumentError("symmetric-difference size must be nonnegative");
  }
  return static_cast<double>(k) * (D + 1) / (2.0 * delta) * sym_diff_size;
}

InstanceParams coupling_input_params(const AtomicCsp& csp,
                                     const CoupleState& state) {
  CoupleState c = canon_state(state);
  return collection_params(csp, constraint_set_union(c.s, c.t));
}

void CouplingEngine::validate_state(const CoupleState& state) {
  std::vector<VarId> u = state.unassigned;
  for (VarId v : u) {
    if (v < 0 || v >= csp_.num_variables()) {
      throw ValidationError("unassigned variable " + std::to_string(v) +
                            " out of range");
    }
  }
  std::sort(u.begin(), u.end());
  if (std::adjacent_find(u.begin(), u.end()) != u.end()) {
    throw ValidationError("unassigned variable list contains duplicates");
  }
  auto check_side = [&](const std::vector<SimplifiedConstraint>& side,
                        const char* name) {
    for (const auto& c : side) {
      if (c.origin < 0 || c.origin >= csp_.num_constraints()) {
        throw ValidationError(std::string("collection ") + name +
                              " references constraint " +
                              std::to_string(c.origin) + " out of range");
      }
      if (c.remaining.empty()) {
        throw ValidationError(std::string("collection ") + name +
                              " holds constraint " + std::to_string(c.origin) +
                              " with an empty remaining set");
      }
      for (std::size_t i = 0; i < c.remaining.size(); ++i) {
        VarId v = c.remaining[i];
        if (i > 0 && c.remaining[i - 1] >= v) {
          throw ValidationError(std::string("collection ") + name +
                                " holds constraint " + std::to_string(c.origin) +
                                " whose remaining set is not strictly increasing");
        }
        if (!std::binary_search(u.begin(), u.end(), v)) {
          throw ValidationError(std::string("collection ") + name +
                                " holds constraint " + std::to_string(c.origin) +
                                " mentioning assigned or unknown variable " +
                                std::to_string(v));
        }
        if (!csp_.scope_contains(c.origin, v)) {
          throw ValidationError(std::string("collection ") + name +
                                " holds constraint " + std::to_string(c.origin) +
                                " with variable " + std::to_string(v) +
                                " outside the original scope");
        }
      }
    }
  };
  check_side(state.s, "S");
  check_side(state.t, "T");
  CoupleState c = canon_state(state);
  if (!event_possible(csp_, Event{c.s, {}, {}})) {
    throw UnsatisfiableError(
        "constraint collection S is unsatisfiable over the unassigned variables");
  }
  if (!event_possible(csp_, Event{c.t, {}, {}})) {
    throw UnsatisfiableError(
        "constraint collection T is unsatisfiable over the unassigned variables");
  }
}

std::string CouplingEngine::state_key(const CoupleState& state) const {
  std::string key;
  push_i32(key, static_cast<int>(state.unassigned.size()));
  for (VarId v : state.unassigned) push_i32(key, v);
  for (const auto* side : {&state.s, &state.t}) {
    push_i32(key, static_cast<int>(side->size()));
    for (const auto& c : *side) {
      push_i32(key, c.origin);
      push_i32(key, static_cast<int>(c.remaining.size()));
      for (VarId v : c.remaining) push_i32(key, v);
    }
  }
  return key;
}

int CouplingEngine::intern(CoupleState state) {
  CoupleState canon = canon_state(state);
  std::string key = state_key(canon);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(nodes_.size());
  Node node;
  node.state = std::move(canon);
  nodes_.push_back(std::move(node));
  index_.emplace(std::move(key), id);
  return id;
}

int CouplingEngine::depth_cap(const CoupleState& state) const {
  int cap = static_cast<int>(state.unassigned.size()) +
            static_cast<int>(state.s.size()) + static_cast<int>(state.t.size()) + 4;
  for (const auto& c : constraint_set_union(state.s, state.t)) {
    cap += 2 * static_cast<int>(c.remaining.size());
  }
  return cap;
}

void CouplingEngine::ensure_branch(int id) {
  if (nodes_[id].branch_ready) return;
  const CoupleState st = nodes_[id].state;
  if (st.s == st.t) {
    nodes_[id].terminal = true;
    nodes_[id].branch_ready = true;
    return;
  }
  bool grow_s;
  SimplifiedConstraint cstar;
  {
    auto ts = constraint_set_difference(st.t, st.s);
    if (!ts.empty()) {
      grow_s = true;
      cstar = ts.front();
    } else {
      grow_s = false;
      cstar = constraint_set_difference(st.s, st.t).front();
    }
  }
  const std::vector<SimplifiedConstraint>& cond = grow_s ? st.s : st.t;
  const std::vector<SimplifiedConstraint>& free_side = grow_s ? st.t : st.s;

  const Event cond_ev{cond, {}, {}};
  const Event violate_ev{cond, {cstar}, {}};
  const double den = event_probability(csp_, cond_ev);
  if (!(den > 0)) {
    throw UnsatisfiableError(
        "conditioned collection became unsatisfiable at a coupling state");
  }
  const bool sample_possible = event_possible(csp_, violate_ev);
  const bool add_possible =
      event_possible(csp_, Event{constraint_set_union(cond, {cstar}), {}, {}});
  double p_sat = 1.0 - event_probability(csp_, violate_ev) / den;
  p_sat = std::clamp(p_sat, 0.0, 1.0);
  if (!add_possible) p_sat = 0.0;
  if (!sample_possible) p_sat = 1.0;

  VarSpace z = VarSpace::over(csp_, cstar.remaining);
  std::vector<int> forced;
  forced.reserve(z.vars.size());
  for (VarId v : z.vars) forced.push_back(csp_.forbidden_value(cstar.origin, v));
  const long long forced_code = z.encode(forced);

  std::vector<long long> codes;
  std::vector<double> mass;
  std::vector<double> cdf;
  if (sample_possible) {
    const std::vector<double> dense =
        conditional_block_marginal(csp_, free_side, cstar.remaining);
    double total = 0;
    for (long long code = 0; code < static_cast<long long>(dense.size()); ++code) {
      if (dense[code] > 0) {
        codes.push_back(code);
        mass.push_back(dense[code]);
        total += dense[code];
      }
    }
    double acc = 0;
    cdf.reserve(mass.size());
    for (double m : mass) {
      acc += m / total;
      cdf.push_back(acc);
    }
    cdf.back() = 1.0;
  }

  int add_child = -1;
  if (add_possible) {
    CoupleState next = st;
    if (grow_s) {
      next.s = constraint_set_union(st.s, {cstar});
    } else {
      next.t = constraint_set_union(st.t, {cstar});
    }
    add_child = intern(std::move(next));
  }

  Node& nd = nodes_[id];
  nd.grow_s = grow_s;
  nd.cstar = cstar;
  nd.p_sat = p_sat;
  nd.sample_possible = sample_possible;
  nd.add_child = add_child;
  nd.z_space = std::move(z);
  nd.forced_digits = std::move(forced);
  nd.forced_code = forced_code;
  nd.free_codes = std::move(codes);
  nd.free_mass = std::move(mass);
  nd.free_cdf = std::move(cdf);
  nd.branch_ready = true;
}

void CouplingEngine::ensure_exact(int id) {
  if (nodes_[id].exact_ready) return;
  const CoupleState st = nodes_[id].state;
  const SimplifiedConstraint cstar = nodes_[id].cstar;
  const bool grow_s = nodes_[id].grow_s;
  const bool sample_possible = nodes_[id].sample_possible;
  const std::vector<long long> codes = nodes_[id].free_codes;

  const std::vector<SimplifiedConstraint>& cond = grow_s ? st.s : st.t;
  const std::vector<SimplifiedConstraint>& free_side = grow_s ? st.t : st.s;
  const Rat den = event_probability_exact(csp_, Event{cond, {}, {}});
  const Rat num = event_probability_exact(csp_, Event{cond, {cstar}, {}});
  Rat ps = Rat(1) - num / den;
  std::vector<Rat> fm;
  if (sample_possible) {
    const std::vector<Rat> dense =
        conditional_block_marginal_exact(csp_, free_side, cstar.remaining);
    fm.reserve(codes.size());
    for (long long code : codes) fm.push_back(dense[code]);
  }
  Node& nd = nodes_[id];
  nd.p_sat_exact = std::move(ps);
  nd.free_mass_exact = std::move(fm);
  nd.exact_ready = true;
}

void CouplingEngine::ensure_terminal(int id) {
  if (nodes_[id].term_ready) return;
  const CoupleState st = nodes_[id].state;
  DistributionTable tab = conditional_table(csp_, st.unassigned, st.s, false);
  std::vector<double> cdf;
  cdf.reserve(tab.mass.size());
  double acc = 0;
  for (double m : tab.mass) {
    acc += m;
    cdf.push_back(acc);
  }
  if (!cdf.empty()) cdf.back() = 1.0;
  Node& nd = nodes_[id];
  nd.term_table = std::move(tab);
  nd.term_cdf = std::move(cdf);
  nd.term_ready = true;
}

int CouplingEngine::sample_child(int id, long long free_code) {
  {
    const auto& children = nodes_[id].sample_children;
    auto it = children.find(free_code);
    if (it != children.end()) return it->second;
  }
  const CoupleState st = nodes_[id].state;
  const bool grow_s = nodes_[id].grow_s;
  const VarSpace z = nodes_[id].z_space;
  const std::vector<int> forced = nodes_[id].forced_digits;

  std::vector<int> digits;
  z.decode(free_code, digits);
  std::vector<std::pair<VarId, int>> forced_items, free_items;
  for (std::size_t i = 0; i < z.vars.size(); ++i) {
    forced_items.emplace_back(z.vars[i], forced[i]);
    free_items.emplace_back(z.vars[i], digits[i]);
  }
  PartialAssignment forced_pa = PartialAssignment::of(std::move(forced_items));
  PartialAssignment free_pa = PartialAssignment::of(std::move(free_items));
  const PartialAssignment& x_pa = grow_s ? forced_pa : free_pa;
  const PartialAssignment& y_pa = grow_s ? free_pa : forced_pa;

  CoupleState next;
  next.unassigned.reserve(st.unassigned.size() - z.vars.size());
  std::set_difference(st.unassigned.begin(), st.unassigned.end(),
                      z.vars.begin(), z.vars.end(),
                      std::back_inserter(next.unassigned));
  next.s = simplify(csp_, st.s, x_pa);
  next.t = simplify(csp_, st.t, y_pa);
  int child = intern(std::move(next));
  nodes_[id].sample_children.emplace(free_code, child);
  return child;
}

namespace {

LogEntry entry_of(const CoupleState& state,
                  std::optional<SimplifiedConstraint> chosen,
                  const std::vector<VarId>& u0, const std::vector<int>& xv,
                  const std::vector<int>& yv) {
  LogEntry e;
  e.unassigned = state.unassigned;
  e.s = state.s;
  e.t = state.t;
  e.chosen = std::move(chosen);
  e.x = assignment_over(u0, xv);
  e.y = assignment_over(u0, yv);
  return e;
}

}  // namespace

CoupleOutcome CouplingEngine::couple(const CoupleState& state, std::uint64_t seed,
                                     bool build_log) {
  validate_state(state);
  const int root = intern(state);
  CounterRng rng(seed);
  return run_walk(root, rng, build_log);
}

CoupleOutcome CouplingEngine::run_walk(int root, CounterRng& rng, bool build_log) {
  const std::vector<VarId> u0 = nodes_[root].state.unassigned;
  std::vector<int> xv(csp_.num_variables(), -1), yv(csp_.num_variables(), -1);
  std::vector<int> bad;
  ExecutionLog log;
  if (build_log) log.entries.push_back(entry_of(nodes_[root].state, std::nullopt, u0, xv, yv));
  const int cap = depth_cap(nodes_[root].state);
  int node = root;
  int depth = 0;
  while (true) {
    ensure_branch(node);
    if (nodes_[node].terminal) {
      ensure_terminal(node);
      const Node& nd = nodes_[node];
      const int idx = nd.term_cdf.empty() ? 0 : rng.sample_cdf(nd.term_cdf);
      const std::vector<VarId>& uvars = nd.state.unassigned;
      if (!uvars.empty()) {
        const std::vector<int>& digits = nd.term_table.support[idx];
        for (std::size_t i = 0; i < uvars.size(); ++i) {
          xv[uvars[i]] = digits[i];
          yv[uvars[i]] = digits[i];
        }
      }
      break;
    }
    const double p_sat = nodes_[node].p_sat;
    const bool sample_possible = nodes_[node].sample_possible;
    const double r = rng.uniform53();
    if (!sample_possible || r < p_sat) {
      const SimplifiedConstraint chosen = nodes_[node].cstar;
      node = nodes_[node].add_child;
      if (node < 0) throw LabError("coupling took an impossible add branch");
      if (build_log) {
        log.entries.push_back(entry_of(nodes_[node].state, chosen, u0, xv, yv));
      }
    } else {
      const SimplifiedConstraint chosen = nodes_[node].cstar;
      const bool grow_s = nodes_[node].grow_s;
      const std::vector<VarId> zvars = nodes_[node].z_space.vars;
      const std::vector<int> forced = nodes_[node].forced_digits;
      const int fi = rng.sample_cdf(nodes_[node].free_cdf);
      const long long fcode = nodes_[node].free_codes[fi];
      std::vector<int> digits;
      nodes_[node].z_space.decode(fcode, digits);
      for (std::size_t i = 0; i < zvars.size(); ++i) {
        if (grow_s) {
          xv[zvars[i]] = forced[i];
          yv[zvars[i]] = digits[i];
        } else {
          xv[zvars[i]] = digits[i];
          yv[zvars[i]] = forced[i];
        }
      }
      bad.push_back(chosen.origin);
      node = sample_child(node, fcode);
      if (build_log) {
        log.entries.push_back(entry_of(nodes_[node].state, chosen, u0, xv, yv));
      }
    }
    if (++depth > cap) throw LabError("coupling recursion exceeded its depth cap");
  }
  max_depth_seen_ = std::max(max_depth_seen_, depth);

  CoupleOutcome out;
  out.x = assignment_over(u0, xv);
  out.y = assignment_over(u0, yv);
  std::sort(bad.begin(), bad.end());
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  out.bad = std::move(bad);
  int ham = 0;
  for (VarId v : u0) ham += xv[v] != yv[v];
  out.hamming = ham;
  out.log = std::move(log);
  return out;
}

CoupleOutcome CouplingEngine::couple_explicit(const CoupleState& state,
                                              const PartialAssignment& x_samp,
                                              const PartialAssignment& y_samp,
                                              std::uint64_t seed, bool build_log) {
  validate_state(state);
  const int root = intern(state);
  const std::vector<VarId> u0 = nodes_[root].state.unassigned;

  auto dense_sample = [&](const PartialAssignment& a, const char* name,
                          const std::vector<SimplifiedConstraint>& side) {
    if (a.variables() != u0) {
      throw ValidationError(std::string(name) +
                            " sample must assign exactly the unassigned variables");
    }
    std::vector<int> dense(csp_.num_variables(), -1);
    for (const auto& [v, val] : a.items()) {
      if (val < 0 || val >= csp_.domain_size(v)) {
        throw ValidationError(std::string(name) + " sample value for variable " +
                              std::to_string(v) + " is outside the domain");
      }
      dense[v] = val;
    }
    for (const auto& c : side) {
      bool satisfied = false;
      for (VarId v : c.remaining) {
        if (dense[v] != csp_.forbidden_value(c.origin, v)) {
          satisfied = true;
          break;
        }
      }
      if (!satisfied) {
        throw ValidationError(std::string(name) + " sample violates constraint " +
                              std::to_string(c.origin));
      }
    }
    return dense;
  };
  const std::vector<int> xs = dense_sample(x_samp, "x", nodes_[root].state.s);
  const std::vector<int> ys = dense_sample(y_samp, "y", nodes_[root].state.t);

  CounterRng rng(seed);
  std::vector<int> xv(csp_.num_variables(), -1), yv(csp_.num_variables(), -1);
  std::vector<int> bad;
  ExecutionLog log;
  if (build_log) log.entries.push_back(entry_of(nodes_[root].state, std::nullopt, u0, xv, yv));
  const int cap = depth_cap(nodes_[root].state);
  int node = root;
  int depth = 0;
  while (true) {
    ensure_branch(node);
    if (nodes_[node].terminal) {
      ensure_terminal(node);
      const Node& nd = nodes_[node];
      const int idx = nd.term_cdf.empty() ? 0 : rng.sample_cdf(nd.term_cdf);
      const std::vector<VarId>& uvars = nd.state.unassigned;
      if (!uvars.empty()) {
        const std::vector<int>& digits = nd.term_table.support[idx];
        for (std::size_t i = 0; i < uvars.size(); ++i) {
          xv[uvars[i]] = digits[i];
          yv[uvars[i]] = digits[i];
        }
      }
      break;
    }
    const SimplifiedConstraint chosen = nodes_[node].cstar;
    const bool grow_s = nodes_[node].grow_s;
    const std::vector<VarId> zvars = nodes_[node].z_space.vars;
    const std::vector<int> forced = nodes_[node].forced_digits;
    const std::vector<int>& cond_sample = grow_s ? xs : ys;
    bool violated = true;
    for (std::size_t i = 0; i < zvars.size(); ++i) {
      if (cond_sample[zvars[i]] != forced[i]) {
        violated = false;
        break;
      }
    }
    if (!violated) {
      node = nodes_[node].add_child;
      if (node < 0) {
        throw LabError("explicit coupling took an impossible add branch");
      }
      if (build_log) {
        log.entries.push_back(entry_of(nodes_[node].state, chosen, u0, xv, yv));
      }
    } else {
      const std::vector<int>& free_sample = grow_s ? ys : xs;
      std::vector<int> digits(zvars.size());
      for (std::size_t i = 0; i < zvars.size(); ++i) digits[i] = free_sample[zvars[i]];
      const long long fcode = nodes_[node].z_space.encode(digits);
      const auto& codes = nodes_[node].free_codes;
      if (!std::binary_search(codes.begin(), codes.end(), fcode)) {
        throw LabError("explicit sample reached a zero-probability transition");
      }
      for (std::size_t i = 0; i < zvars.size(); ++i) {
        xv[zvars[i]] = xs[zvars[i]];
        yv[zvars[i]] = ys[zvars[i]];
      }
      bad.push_back(chosen.origin);
      node = sample_child(node, fcode);
      if (build_log) {
        log.entries.push_back(entry_of(nodes_[node].state, chosen, u0, xv, yv));
      }
    }
    if (++depth > cap) throw LabError("coupling recursion exceeded its depth cap");
  }
  max_depth_seen_ = std::max(max_depth_seen_, depth);

  CoupleOutcome out;
  out.x = assignment_over(u0, xv);
  out.y = assignment_over(u0, yv);
  std::sort(bad.begin(), bad.end());
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  out.bad = std::move(bad);
  int ham = 0;
  for (VarId v : u0) ham += xv[v] != yv[v];
  out.hamming = ham;
  out.log = std::move(log);
  return out;
}

std::vector<OutcomeClass> CouplingEngine::enumerate_outcomes(const CoupleState& state) {
  validate_state(state);
  const int root = intern(state);
  const CoupleState st = nodes_[root].state;
  const std::vector<VarId> u0 = st.unassigned;

  const DistributionTable tab_s = conditional_table(csp_, u0, st.s, true);
  const DistributionTable tab_t = conditional_table(csp_, u0, st.t, true);
  const long long pairs = static_cast<long long>(tab_s.support.size()) *
                          static_cast<long long>(tab_t.support.size());
  if (pairs > kPairGuard) {
    throw LimitError("sample-pair sweep needs " + std::to_string(pairs) +
                     " pairs, above the limit of " + std::to_string(kPairGuard));
  }

  const int cap = depth_cap(st);
  std::map<std::vector<long long>, Rat> classes;
  std::vector<int> xs(csp_.num_variables(), -1), ys(csp_.num_variables(), -1);
  std::vector<long long> sig;
  std::vector<int> digits;
  for (std::size_t xi = 0; xi < tab_s.support.size(); ++xi) {
    for (std::size_t i = 0; i < u0.size(); ++i) xs[u0[i]] = tab_s.support[xi][i];
    for (std::size_t yi = 0; yi < tab_t.support.size(); ++yi) {
      for (std::size_t i = 0; i < u0.size(); ++i) ys[u0[i]] = tab_t.support[yi][i];
      sig.clear();
      int node = root;
      int depth = 0;
      while (true) {
        ensure_branch(node);
        if (nodes_[node].terminal) break;
        const bool grow_s = nodes_[node].grow_s;
        const std::vector<VarId>& zvars = nodes_[node].z_space.vars;
        const std::vector<int>& forced = nodes_[node].forced_digits;
        const std::vector<int>& cond_sample = grow_s ? xs : ys;
        bool violated = true;
        for (std::size_t i = 0; i < zvars.size(); ++i) {
          if (cond_sample[zvars[i]] != forced[i]) {
            violated = false;
            break;
          }
        }
        if (!violated) {
          sig.push_back(-1);
          node = nodes_[node].add_child;
          if (node < 0) throw LabError("sample sweep took an impossible add branch");
        } else {
          const std::vector<int>& free_sample = grow_s ? ys : xs;
          digits.resize(zvars.size());
          for (std::size_t i = 0; i < zvars.size(); ++i) {
            digits[i] = free_sample[zvars[i]];
          }
          const long long fcode = nodes_[node].z_space.encode(digits);
          sig.push_back(fcode);
          node = sample_child(node, fcode);
        }
        if (++depth > cap) {
          throw LabError("coupling recursion exceeded its depth cap");
        }
      }
      classes[sig] += tab_s.mass_exact[xi] * tab_t.mass_exact[yi];
    }
  }

  std::vector<OutcomeClass> out;
  out.reserve(classes.size());
  for (const auto& [signature, prob] : classes) {
    OutcomeClass oc;
    oc.probability = prob;
    std::vector<int> xv(csp_.num_variables(), -1), yv(csp_.num_variables(), -1);
    std::vector<int> bad;
    int ham = 0;
    int node = root;
    oc.log.entries.push_back(entry_of(nodes_[node].state, std::nullopt, u0, xv, yv));
    for (long long step : signature) {
      const SimplifiedConstraint chosen = nodes_[node].cstar;
      if (step < 0) {
        node = nodes_[node].add_child;
      } else {
        const bool grow_s = nodes_[node].grow_s;
        const std::vector<VarId> zvars = nodes_[node].z_space.vars;
        const std::vector<int> forced = nodes_[node].forced_digits;
        nodes_[node].z_space.decode(step, digits);
        for (std::size_t i = 0; i < zvars.size(); ++i) {
          if (grow_s) {
            xv[zvars[i]] = forced[i];
            yv[zvars[i]] = digits[i];
          } else {
            xv[zvars[i]] = digits[i];
            yv[zvars[i]] = forced[i];
          }
          ham += forced[i] != digits[i];
        }
        bad.push_back(chosen.origin);
        node = sample_child(node, step);
      }
      oc.log.entries.push_back(entry_of(nodes_[node].state, chosen, u0, xv, yv));
    }
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    oc.bad = std::move(bad);
    oc.hamming = ham;
    out.push_back(std::move(oc));
  }
  return out;
}

namespace {

struct ReplayFacts {
  CoupleState initial;
  CoupleState final_state;
  PartialAssignment x;
  PartialAssignment y;
};

}  // namespace

// Structural validation of an execution log by replaying its transitions; any
// deviation from the shapes the procedure can produce is an error naming the
// offending entry.
static ReplayFacts validate_log(const AtomicCsp& csp, const CoupleState& canon,
                                const ExecutionLog& log) {
  if (log.entries.empty()) throw ValidationError("improper log: no entries");
  const LogEntry& e0 = log.entries.front();
  CoupleState head = canon_state(CoupleState{e0.unassigned, e0.s, e0.t});
  if (head.unassigned != canon.unassigned || head.s != canon.s ||
      head.t != canon.t || e0.chosen.has_value() || !e0.x.empty() ||
      !e0.y.empty()) {
    throw ValidationError(
        "improper log: initial entry must restate the input state with no "
        "chosen constraint and empty assignments");
  }
  CoupleState cur = canon;
  PartialAssignment x, y;
  for (std::size_t i = 1; i < log.entries.size(); ++i) {
    const std::string tag = "improper log: entry " + std::to_string(i);
    if (cur.s == cur.t) {
      throw ValidationError(
          "improper log: log continues past a state with equal constraint "
          "collections");
    }
    bool grow_s;
    SimplifiedConstraint cstar;
    {
      auto ts = constraint_set_difference(cur.t, cur.s);
      if (!ts.empty()) {
        grow_s = true;
        cstar = ts.front();
      } else {
        grow_s = false;
        cstar = constraint_set_difference(cur.s, cur.t).front();
      }
    }
    const LogEntry& e = log.entries[i];
    if (!e.chosen || *e.chosen != cstar) {
      throw ValidationError(tag +
                            " must choose the least constraint of the pending "
                            "difference");
    }
    CoupleState estate = canon_state(CoupleState{e.unassigned, e.s, e.t});
    if (estate.unassigned == cur.unassigned) {
      CoupleState expect = cur;
      if (grow_s) {
        expect.s = constraint_set_union(cur.s, {cstar});
      } else {
        expect.t = constraint_set_union(cur.t, {cstar});
      }
      if (estate.s != expect.s || estate.t != expect.t) {
        throw ValidationError(tag +
                              " does not record the chosen constraint being "
                              "added");
      }
      if (e.x != x || e.y != y) {
        throw ValidationError(tag + " must not change assignments on an add step");
      }
      cur = std::move(expect);
    } else {
      const std::vector<VarId>& zvars = cstar.remaining;
      std::vector<VarId> new_u;
      std::set_difference(cur.unassigned.begin(), cur.unassigned.end(),
                          zvars.begin(), zvars.end(), std::back_inserter(new_u));
      if (estate.unassigned != new_u) {
        throw ValidationError(tag + " has an unassigned set matching neither step shape");
      }
      std::vector<std::pair<VarId, int>> forced_items;
      for (VarId v : zvars) {
        forced_items.emplace_back(v, csp.forbidden_value(cstar.origin, v));
      }
      PartialAssignment forced_pa = PartialAssignment::of(std::move(forced_items));
      const PartialAssignment& fixed_prev = grow_s ? x : y;
      const PartialAssignment& fixed_entry = grow_s ? e.x : e.y;
      const PartialAssignment& free_prev = grow_s ? y : x;
      const PartialAssignment& free_entry = grow_s ? e.y : e.x;
      if (fixed_entry != concat(fixed_prev, forced_pa)) {
        throw ValidationError(tag +
                              " must extend the conditioned side by the "
                              "forbidden assignment of the chosen constraint");
      }
      PartialAssignment piece = free_entry.restricted_to(zvars);
      if (piece.size() != zvars.size()) {
        throw ValidationError(tag +
                              " must assign the full remaining set on the "
                              "sampled side");
      }
      for (const auto& [v, val] : piece.items()) {
        if (val < 0 || val >= csp.domain_size(v)) {
          throw ValidationError(tag + " assigns variable " + std::to_string(v) +
                                " outside its domain");
        }
      }
      if (free_entry != concat(free_prev, piece)) {
        throw ValidationError(tag +
                              " changes previously assigned variables on the "
                              "sampled side");
      }
      CoupleState next;
      next.unassigned = new_u;
      try {
        if (grow_s) {
          next.s = simplify(csp, cur.s, forced_pa);
          next.t = simplify(csp, cur.t, piece);
        } else {
          next.t = simplify(csp, cur.t, forced_pa);
          next.s = simplify(csp, cur.s, piece);
        }
      } catch (const ConstraintViolation&) {
        throw ValidationError(tag +
                              " assigns a block that violates a recorded "
                              "constraint");
      }
      if (estate.s != next.s || estate.t != next.t) {
        throw ValidationError(tag +
                              " constraint collections do not match the "
                              "simplification of the previous state");
      }
      x = concat(x, grow_s ? forced_pa : piece);
      y = concat(y, grow_s ? piece : forced_pa);
      cur = std::move(next);
    }
  }
  if (cur.s != cur.t) {
    throw ValidationError(
        "improper log: final entry must have equal constraint collections");
  }
  return ReplayFacts{canon, cur, std::move(x), std::move(y)};
}

double CouplingEngine::log_probability(const CoupleState& state,
                                       const ExecutionLog& log) {
  validate_state(state);
  const CoupleState canon = canon_state(state);
  const ReplayFacts facts = validate_log(csp_, canon, log);
  const double px =
      event_probability(csp_, Event{facts.final_state.s, {}, facts.x}) /
      event_probability(csp_, Event{canon.s, {}, {}});
  const double py =
      event_probability(csp_, Event{facts.final_state.t, {}, facts.y}) /
      event_probability(csp_, Event{canon.t, {}, {}});
  return px * py;
}

Rat CouplingEngine::log_probability_exact(const CoupleState& state,
                                          const ExecutionLog& log) {
  validate_state(state);
  const CoupleState canon = canon_state(state);
  const ReplayFacts facts = validate_log(csp_, canon, log);
  const Rat px =
      event_probability_exact(csp_, Event{facts.final_state.s, {}, facts.x}) /
      event_probability_exact(csp_, Event{canon.s, {}, {}});
  const Rat py =
      event_probability_exact(csp_, Event{facts.final_state.t, {}, facts.y}) /
      event_probability_exact(csp_, Event{canon.t, {}, {}});
  return px * py;
}

Rat CouplingEngine::expected_hamming_exact(const CoupleState& state) {
  validate_state(state);
  const int root = intern(state);
  // Iterative-free recursion over the interned DAG; depth is bounded by the
  // walk depth cap.
  struct Rec {
    CouplingEngine& eng;
    Rat run(int id) {
      auto it = eng.hamming_memo_.find(id);
      if (it != eng.hamming_memo_.end()) return it->second;
      eng.ensure_branch(id);
      if (eng.nodes_[id].terminal) {
        eng.hamming_memo_.emplace(id, Rat(0));
        return Rat(0);
      }
      eng.ensure_exact(id);
      const Rat ps = eng.nodes_[id].p_sat_exact;
      const int add = eng.nodes_[id].add_child;
      const bool sp = eng.nodes_[id].sample_possible;
      const std::vector<long long> codes = eng.nodes_[id].free_codes;
      const std::vector<Rat> fm = eng.nodes_[id].free_mass_exact;
      const std::vector<int> forced = eng.nodes_[id].forced_digits;
      const VarSpace z = eng.nodes_[id].z_space;
      Rat total(0);
      if (add >= 0 && ps > 0) total += ps * run(add);
      if (sp) {
        const Rat q = Rat(1) - ps;
        std::vector<int> digits;
        for (std::size_t i = 0; i < codes.size(); ++i) {
          if (fm[i] == 0) continue;
          z.decode(codes[i], digits);
          int dw = 0;
          for (std::size_t j = 0; j < digits.size(); ++j) dw += digits[j] != forced[j];
          const int child = eng.sample_child(id, codes[i]);
          total += q * fm[i] * (Rat(dw) + run(child));
        }
      }
      eng.hamming_memo_.emplace(id, total);
      return total;
    }
  };
  return Rec{*this}.run(root);
}

MonteCarloReport CouplingEngine::expected_hamming_mc(const CoupleState& state,
                                                     long long trials,
                                                     std::uint64_t seed) {
  if (trials < 1) throw ArgumentError("trial count must be positive");
  validate_state(state);
  const int root = intern(state);
  const CoupleState st = nodes_[root].state;
  const std::vector<VarId> u0 = st.unassigned;

  int k = 0;
  for (const auto& c : constraint_set_union(st.s, st.t)) {
    k = std::max(k, static_cast<int>(c.remaining.size()));
  }

  MonteCarloReport rep;
  rep.trials = trials;
  rep.x_counts.resize(u0.size());
  rep.y_counts.resize(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i) {
    rep.x_counts[i].assign(csp_.domain_size(u0[i]), 0);
    rep.y_counts[i].assign(csp_.domain_size(u0[i]), 0);
  }
  std::vector<int> pos(csp_.num_variables(), -1);
  for (std::size_t i = 0; i < u0.size(); ++i) pos[u0[i]] = static_cast<int>(i);

  long long sum_h = 0, sum_h2 = 0;
  for (long long t = 0; t < trials; ++t) {
    CounterRng rng(CounterRng::derive(seed, static_cast<std::uint64_t>(t)));
    const CoupleOutcome o = run_walk(root, rng, false);
    const long long h = o.hamming;
    sum_h += h;
    sum_h2 += h * h;
    rep.max_hamming = std::max(rep.max_hamming, h);
    rep.max_bad = std::max(rep.max_bad, static_cast<long long>(o.bad.size()));
    if (h > static_cast<long long>(k) * static_cast<long long>(o.bad.size())) {
      rep.disc_bound_ok = false;
    }
    for (const auto& [v, val] : o.x.items()) ++rep.x_counts[pos[v]][val];
    for (const auto& [v, val] : o.y.items()) ++rep.y_counts[pos[v]][val];
  }
  rep.mean_hamming = static_cast<double>(sum_h) / static_cast<double>(trials);
  if (trials >= 2) {
    const double n = static_cast<double>(trials);
    double var = (static_cast<double>(sum_h2) - n * rep.mean_hamming * rep.mean_hamming) /
                 (n - 1.0);
    var = std::max(var, 0.0);
    rep.half_width = 3.0 * std::sqrt(var / n);
  }
  return rep;
}

std::map<std::vector<int>, Rat> CouplingEngine::bad_set_distribution(
    const CoupleState& state) {
  validate_state(state);
  const int root = intern(state);
  std::map<int, std::map<std::vector<int>, Rat>> memo;
  struct Rec {
    CouplingEngine& eng;
    std::map<int, std::map<std::vector<int>, Rat>>& memo;
    const std::map<std::vector<int>, Rat>& run(int id) {
      auto it = memo.find(id);
      if (it != memo.end()) return it->second;
      eng.ensure_branch(id);
      std::map<std::vector<int>, Rat> out;
      if (eng.nodes_[id].terminal) {
        out.emplace(std::vector<int>{}, Rat(1));
        return memo.emplace(id, std::move(out)).first->second;
      }
      eng.ensure_exact(id);
      const Rat ps = eng.nodes_[id].p_sat_exact;
      const int add = eng.nodes_[id].add_child;
      const bool sp = eng.nodes_[id].sample_possible;
      const int origin = eng.nodes_[id].cstar.origin;
      const std::vector<long long> codes = eng.nodes_[id].free_codes;
      const std::vector<Rat> fm = eng.nodes_[id].free_mass_exact;
      if (add >= 0 && ps > 0) {
        for (const auto& [key, mass] : run(add)) out[key] += ps * mass;
      }
      if (sp) {
        const Rat q = Rat(1) - ps;
        for (std::size_t i = 0; i < codes.size(); ++i) {
          if (fm[i] == 0) continue;
          const int child = eng.sample_child(id, codes[i]);
          const Rat w = q * fm[i];
          for (const auto& [key, mass] : run(child)) {
            std::vector<int> with = key;
            auto at = std::lower_bound(with.begin(), with.end(), origin);
            if (at == with.end() || *at != origin) with.insert(at, origin);
            out[with] += w * mass;
          }
        }
      }
      return memo.emplace(id, std::move(out)).first->second;
    }
  };
  return Rec{*this, memo}.run(root);
}

Rat CouplingEngine::bad_containment_probability(const CoupleState& state,
                                                const std::vector<int>& origins) {
  std::vector<int> want = origins;
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end()), want.end());
  for (int o : want) {
    if (o < 0 || o >= csp_.num_constraints()) {
      throw ArgumentError("bad-set origin " + std::to_string(o) + " out of range");
    }
  }
  Rat total(0);
  for (const auto& [key, mass] : bad_set_distribution(state)) {
    if (std::includes(key.begin(), key.end(), want.begin(), want.end())) {
      total += mass;
    }
  }
  return total;
}

}  // namespace lll_lab
