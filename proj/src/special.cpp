#include "hetspec/special.hpp"

#include <cmath>
#include <numbers>

namespace hetspec {

namespace {

// Power series I0(x) = sum_k (x^2/4)^k / (k!)^2; all terms positive, so no
// cancellation. Used below the asymptotic crossover.
double i0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// Asymptotic expansion of exp(-x) I0(x) sqrt(2 pi x):
//   sum_k ((2k-1)!!)^2 / (k! 8^k x^k).
// Truncated at the smallest term; for x >= 15 the tail is below 1e-13.
double i0_scaled_asymptotic(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    const double factor =
        (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (factor >= 1.0) break;  // series started diverging
    term *= factor;
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double bessel_i0_scaled(double x) {
  x = std::abs(x);
  if (x < 15.0) return std::exp(-x) * i0_series(x);
  return i0_scaled_asymptotic(x);
}

double bessel_i0(double x) {
  x = std::abs(x);
  if (x < 15.0) return i0_series(x);
  return i0_scaled_asymptotic(x) * std::exp(x);
}

}  // namespace hetspec
