#pragma once

#include <stdexcept>
#include <string>

namespace lll_lab {

// Base type for everything thrown by the lab on purpose.
struct LabError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input: bad instance JSON, inconsistent state tuples, improper logs.
struct ValidationError : LabError {
  using LabError::LabError;
};

// A partial assignment fully matched some constraint's forbidden assignment.
struct ConstraintViolation : LabError {
  ConstraintViolation(int origin, const std::string& what)
      : LabError(what), origin(origin) {}
  int origin;
};

// Conditioning event (or the whole instance) has probability zero.
struct UnsatisfiableError : LabError {
  using LabError::LabError;
};

// Enumeration would exceed the configured state-space guardrail.
struct LimitError : LabError {
  using LabError::LabError;
};

// Parameter outside the domain of the requested formula or procedure.
struct ArgumentError : LabError {
  using LabError::LabError;
};

}  // namespace lll_lab
