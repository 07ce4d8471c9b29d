#pragma once

#include <gmpxx.h>

#include <string>

namespace lll_lab {

// Exact rational scalar for the oracle-grade code paths.  Doubles are dyadic
// rationals, so lifting instance weights into Rat is lossless and every
// product/sum/quotient downstream is exact.
using Rat = mpq_class;

inline Rat rat_of_double(double x) {
  Rat r(x);  // mpq_set_d is exact for finite doubles
  r.canonicalize();
  return r;
}

inline double rat_to_double(const Rat& r) { return r.get_d(); }

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

}  // namespace lll_lab
