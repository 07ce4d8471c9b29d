#pragma once

#include <cstdint>
#include <vector>

namespace lll_lab {

// Counter-based deterministic generator (splitmix64 finalizer over an
// incrementing counter).  The n-th output is a pure function of (seed, n), so
// streams can be derived, split and replayed with no shared state; every
// stochastic routine in the lab takes an explicit seed and builds one of
// these.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Stable stream derivation, e.g. per-trial seeds from (seed, trial index).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return mix(seed ^ mix(index ^ 0x5851f42d4c957f2dull));
  }

  std::uint64_t next_u64() { return mix(seed_ ^ mix(counter_++)); }

  // Uniform real in [0,1) with 53 mantissa bits.
  double uniform53() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Smallest index i with u < cdf[i]; cdf must be nondecreasing with final
  // entry (numerically) 1.
  int sample_cdf(const std::vector<double>& cdf) {
    const double u = uniform53();
    int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (u < cdf[mid]) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace lll_lab
