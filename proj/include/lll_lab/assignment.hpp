#pragma once

#include <utility>
#include <vector>

#include "lll_lab/errors.hpp"

namespace lll_lab {

using VarId = int;

// Partial assignment of value indices to variables, kept sorted by variable
// id.  Variable domains live in AtomicCsp; this type only records (var, value
// index) pairs.
class PartialAssignment {
 public:
  PartialAssignment() = default;

  // From (var, value) pairs; duplicate variables are rejected.
  static PartialAssignment of(std::vector<std::pair<VarId, int>> items);

  void set(VarId v, int value);  // v must not be assigned yet
  bool has(VarId v) const;
  int value_of(VarId v) const;  // throws if unassigned

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  const std::vector<std::pair<VarId, int>>& items() const { return items_; }
  std::vector<VarId> variables() const;

  // Restriction to the given variables (silently drops the others).
  PartialAssignment restricted_to(const std::vector<VarId>& vars) const;

  bool operator==(const PartialAssignment& other) const {
    return items_ == other.items_;
  }
  bool operator!=(const PartialAssignment& other) const {
    return !(*this == other);
  }

 private:
  std::vector<std::pair<VarId, int>> items_;  // sorted by variable id
};

// Concatenation of assignments with disjoint variable sets; overlap is an
// error even when the two sides agree on the value.
PartialAssignment concat(const PartialAssignment& a, const PartialAssignment& b);

}  // namespace lll_lab
