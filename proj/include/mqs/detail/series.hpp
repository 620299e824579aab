#pragma once

#include <cmath>

#include "mqs/error.hpp"

namespace mqs::detail {

inline constexpr double kSeriesRelativeTolerance = 1e-14;
inline constexpr int kSeriesMaxTerms = 1'000'000;

// Sums term(first), term(first+step), ... and stops once three consecutive terms are
// below kSeriesRelativeTolerance times the running sum.
template <class Term>
double sum_series(Term&& term, int first, int step = 1) {
  double sum = 0.0;
  int small = 0;
  for (int n = first, count = 0; small < 3; n += step, ++count) {
    if (count > kSeriesMaxTerms) throw ValidationError("closed-form series did not converge");
    const double t = term(n);
    sum += t;
    small = std::abs(t) <= kSeriesRelativeTolerance * std::abs(sum) ? small + 1 : 0;
  }
  return sum;
}

}  // namespace mqs::detail
