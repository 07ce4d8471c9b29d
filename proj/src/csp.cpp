#include "lll_lab/csp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace lll_lab {

namespace {

using Json = nlohmann::ordered_json;

std::string var_tag(std::size_t i) { return "variable " + std::to_string(i); }
std::string con_tag(std::size_t i) { return "constraint " + std::to_string(i); }

}  // namespace

AtomicCsp::AtomicCsp(std::vector<VariableDecl> variables,
                     std::vector<AtomicConstraint> constraints)
    : variables_(std::move(variables)), constraints_(std::move(constraints)) {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& var = variables_[i];
    if (var.domain.size() < 2) {
      throw ValidationError(var_tag(i) + ": domain must have at least 2 values");
    }
    if (var.weights.size() != var.domain.size()) {
      throw ValidationError(var_tag(i) + ": weight count " +
                            std::to_string(var.weights.size()) +
                            " does not match domain size " +
                            std::to_string(var.domain.size()));
    }
    double sum = 0;
    for (std::size_t j = 0; j < var.weights.size(); ++j) {
      if (!(var.weights[j] > 0)) {
        throw ValidationError(var_tag(i) + ": weight of value " +
                              std::to_string(j) + " must be positive");
      }
      sum += var.weights[j];
    }
    if (std::fabs(sum - 1.0) > kWeightSumTol) {
      std::ostringstream msg;
      msg << var_tag(i) << ": weights sum to " << sum << ", expected 1";
      throw ValidationError(msg.str());
    }
  }
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const auto& con = constraints_[i];
    if (con.scope.empty()) {
      throw ValidationError(con_tag(i) + ": empty scope");
    }
    if (con.forbidden.size() != con.scope.size()) {
      throw ValidationError(con_tag(i) + ": forbidden assignment length " +
                            std::to_string(con.forbidden.size()) +
                            " does not match scope size " +
                            std::to_string(con.scope.size()));
    }
    for (std::size_t j = 0; j < con.scope.size(); ++j) {
      const VarId v = con.scope[j];
      if (v < 0 || v >= num_variables()) {
        throw ValidationError(con_tag(i) + ": scope references undeclared "
                              "variable " + std::to_string(v));
      }
      if (j > 0 && con.scope[j] <= con.scope[j - 1]) {
        throw ValidationError(con_tag(i) +
                              ": scope must be strictly increasing "
                              "(duplicate or unsorted variable ids)");
      }
      const int val = con.forbidden[j];
      if (val < 0 || val >= domain_size(v)) {
        throw ValidationError(con_tag(i) + ": forbidden value index " +
                              std::to_string(val) + " outside the domain of " +
                              var_tag(v));
      }
    }
  }
}

AtomicCsp AtomicCsp::from_json_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("instance JSON parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("variables") ||
      !doc.contains("constraints")) {
    throw ValidationError(
        "instance JSON must be an object with 'variables' and 'constraints'");
  }
  std::vector<VariableDecl> vars;
  for (std::size_t i = 0; i < doc["variables"].size(); ++i) {
    const auto& jv = doc["variables"][i];
    VariableDecl var;
    if (!jv.contains("domain") || !jv["domain"].is_array()) {
      throw ValidationError(var_tag(i) + ": missing 'domain' array");
    }
    for (const auto& label : jv["domain"]) {
      var.domain.push_back(label.get<std::string>());
    }
    if (jv.contains("weights")) {
      for (const auto& w : jv["weights"]) var.weights.push_back(w.get<double>());
    } else {
      var.weights.assign(var.domain.size(),
                         1.0 / static_cast<double>(var.domain.size()));
    }
    vars.push_back(std::move(var));
  }
  std::vector<AtomicConstraint> cons;
  for (std::size_t i = 0; i < doc["constraints"].size(); ++i) {
    const auto& jc = doc["constraints"][i];
    AtomicConstraint con;
    if (!jc.contains("scope") || !jc.contains("forbidden")) {
      throw ValidationError(con_tag(i) + ": missing 'scope' or 'forbidden'");
    }
    for (const auto& v : jc["scope"]) con.scope.push_back(v.get<int>());
    for (const auto& f : jc["forbidden"]) con.forbidden.push_back(f.get<int>());
    cons.push_back(std::move(con));
  }
  return AtomicCsp(std::move(vars), std::move(cons));
}

AtomicCsp AtomicCsp::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open instance file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string AtomicCsp::to_json_text() const {
  Json doc;
  doc["variables"] = Json::array();
  for (const auto& var : variables_) {
    Json jv;
    jv["domain"] = var.domain;
    jv["weights"] = var.weights;
    doc["variables"].push_back(jv);
  }
  doc["constraints"] = Json::array();
  for (const auto& con : constraints_) {
    Json jc;
    jc["scope"] = con.scope;
    jc["forbidden"] = con.forbidden;
    doc["constraints"].push_back(jc);
  }
  return doc.dump(2);
}

bool AtomicCsp::scope_contains(int c, VarId v) const {
  const auto& scope = constraints_[c].scope;
  return std::binary_search(scope.begin(), scope.end(), v);
}

int AtomicCsp::forbidden_value(int c, VarId v) const {
  const auto& scope = constraints_[c].scope;
  const auto it = std::lower_bound(scope.begin(), scope.end(), v);
  if (it == scope.end() || *it != v) {
    throw ValidationError("variable " + std::to_string(v) +
                          " not in the scope of constraint " +
                          std::to_string(c));
  }
  return constraints_[c].forbidden[it - scope.begin()];
}

std::vector<VarId> AtomicCsp::all_variables() const {
  std::vector<VarId> out(num_variables());
  for (int v = 0; v < num_variables(); ++v) out[v] = v;
  return out;
}

std::vector<SimplifiedConstraint> all_constraints(const AtomicCsp& csp) {
  std::vector<SimplifiedConstraint> out;
  out.reserve(csp.num_constraints());
  for (int c = 0; c < csp.num_constraints(); ++c) {
    out.push_back({c, csp.constraint(c).scope});
  }
  return out;
}

std::vector<SimplifiedConstraint> simplify(
    const AtomicCsp& csp, const std::vector<SimplifiedConstraint>& constraints,
    const PartialAssignment& x) {
  std::vector<SimplifiedConstraint> out;
  for (const auto& con : constraints) {
    SimplifiedConstraint next{con.origin, {}};
    bool satisfied = false;
    for (VarId v : con.remaining) {
      if (x.has(v)) {
        if (x.value_of(v) != csp.forbidden_value(con.origin, v)) {
          satisfied = true;
          break;
        }
      } else {
        next.remaining.push_back(v);
      }
    }
    if (satisfied) continue;
    if (next.remaining.empty()) {
      throw ConstraintViolation(
          con.origin, "assignment violates constraint " +
                          std::to_string(con.origin) +
                          " (forbidden assignment fully matched)");
    }
    out.push_back(std::move(next));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double violation_probability(const AtomicCsp& csp,
                             const SimplifiedConstraint& c) {
  double p = 1;
  for (VarId v : c.remaining) {
    p *= csp.weight(v, csp.forbidden_value(c.origin, v));
  }
  return p;
}

Graph dependency_graph(const std::vector<std::vector<VarId>>& scopes) {
  Graph g(static_cast<int>(scopes.size()));
  for (std::size_t i = 0; i < scopes.size(); ++i) {
    for (std::size_t j = i + 1; j < scopes.size(); ++j) {
      bool intersects = false;
      for (VarId v : scopes[i]) {
        if (std::binary_search(scopes[j].begin(), scopes[j].end(), v)) {
          intersects = true;
          break;
        }
      }
      if (intersects) g.add_edge(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return g;
}

std::vector<std::vector<VarId>> scopes_of(
    const std::vector<SimplifiedConstraint>& constraints) {
  std::vector<std::vector<VarId>> out;
  out.reserve(constraints.size());
  for (const auto& c : constraints) out.push_back(c.remaining);
  return out;
}

namespace {

void fill_distortions(const AtomicCsp& csp, InstanceParams& params) {
  double wmax = 0, wmin = 1;
  for (int v = 0; v < csp.num_variables(); ++v) {
    for (int val = 0; val < csp.domain_size(v); ++val) {
      wmax = std::max(wmax, csp.weight(v, val));
      wmin = std::min(wmin, csp.weight(v, val));
    }
  }
  params.chi_min = 1.0 / wmax;
  params.chi_max = 1.0 / wmin;
}

}  // namespace

InstanceParams instance_params(const AtomicCsp& csp) {
  if (csp.num_constraints() == 0) {
    throw ValidationError("instance has no constraints");
  }
  return collection_params(csp, all_constraints(csp));
}

InstanceParams collection_params(const AtomicCsp& csp,
                                 const std::vector<SimplifiedConstraint>& cs) {
  if (cs.empty()) {
    throw ValidationError("no constraints");
  }
  InstanceParams params;
  for (const auto& c : cs) {
    params.p = std::max(params.p, violation_probability(csp, c));
    params.k = std::max(params.k, static_cast<int>(c.remaining.size()));
  }
  params.D = dependency_graph(scopes_of(cs)).max_degree();
  fill_distortions(csp, params);
  return params;
}

std::vector<SimplifiedConstraint> constraint_set_union(
    const std::vector<SimplifiedConstraint>& a,
    const std::vector<SimplifiedConstraint>& b) {
  std::vector<SimplifiedConstraint> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

std::vector<SimplifiedConstraint> constraint_set_difference(
    const std::vector<SimplifiedConstraint>& a,
    const std::vector<SimplifiedConstraint>& b) {
  std::vector<SimplifiedConstraint> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

std::vector<SimplifiedConstraint> constraint_set_symmetric_difference(
    const std::vector<SimplifiedConstraint>& a,
    const std::vector<SimplifiedConstraint>& b) {
  std::vector<SimplifiedConstraint> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(out));
  return out;
}

}  // namespace lll_lab
