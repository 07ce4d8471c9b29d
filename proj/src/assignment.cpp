#include "lll_lab/assignment.hpp"

#include <algorithm>
#include <string>

namespace lll_lab {

PartialAssignment PartialAssignment::of(
    std::vector<std::pair<VarId, int>> items) {
  std::sort(items.begin(), items.end());
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i].first == items[i - 1].first) {
      throw ValidationError("duplicate variable " +
                            std::to_string(items[i].first) +
                            " in partial assignment");
    }
  }
  PartialAssignment a;
  a.items_ = std::move(items);
  return a;
}

void PartialAssignment::set(VarId v, int value) {
  auto it = std::lower_bound(
      items_.begin(), items_.end(), std::make_pair(v, 0),
      [](const auto& a, const auto& b) { return a.first < b.first; });
  if (it != items_.end() && it->first == v) {
    throw ValidationError("variable " + std::to_string(v) +
                          " already assigned");
  }
  items_.insert(it, {v, value});
}

bool PartialAssignment::has(VarId v) const {
  auto it = std::lower_bound(
      items_.begin(), items_.end(), std::make_pair(v, 0),
      [](const auto& a, const auto& b) { return a.first < b.first; });
  return it != items_.end() && it->first == v;
}

int PartialAssignment::value_of(VarId v) const {
  auto it = std::lower_bound(
      items_.begin(), items_.end(), std::make_pair(v, 0),
      [](const auto& a, const auto& b) { return a.first < b.first; });
  if (it == items_.end() || it->first != v) {
    throw ValidationError("variable " + std::to_string(v) + " not assigned");
  }
  return it->second;
}

std::vector<VarId> PartialAssignment::variables() const {
  std::vector<VarId> out;
  out.reserve(items_.size());
  for (const auto& [v, val] : items_) out.push_back(v);
  return out;
}

PartialAssignment PartialAssignment::restricted_to(
    const std::vector<VarId>& vars) const {
  PartialAssignment out;
  for (const auto& item : items_) {
    if (std::find(vars.begin(), vars.end(), item.first) != vars.end()) {
      out.items_.push_back(item);
    }
  }
  return out;
}

PartialAssignment concat(const PartialAssignment& a,
                         const PartialAssignment& b) {
  PartialAssignment out = a;
  for (const auto& [v, val] : b.items()) {
    if (out.has(v)) {
      throw ValidationError("concat overlap on variable " + std::to_string(v));
    }
    out.set(v, val);
  }
  return out;
}

}  // namespace lll_lab
