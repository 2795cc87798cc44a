#pragma once

// Scalar per-coordinate Rastrigin evaluator in extended precision, kept
// apart from the library's vectorised loop.

#include <cmath>
#include <span>

namespace emas::oracle {

inline long double rastrigin_term(long double x) {
  const long double two_pi = 6.283185307179586476925286766559L;
  return 10.0L + x * x - 10.0L * cosl(two_pi * x);
}

inline double rastrigin_by_terms(std::span<const double> xs) {
  long double sum = 0.0L;
  for (double x : xs) sum += rastrigin_term(x);
  return static_cast<double>(sum);
}

}  // namespace emas::oracle
