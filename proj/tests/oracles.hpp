// Test-side oracles, independent of the library paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracles {

template <class M>
bool bitwise_equal(const M& a, const M& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (decltype(a.size()) i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

// Composite Simpson rule; deliberately not the library quadrature.
template <class F>
double simpson(F&& f, double a, double b, int n = 4096) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double complex_sample_variance(const std::vector<std::complex<double>>& z) {
  std::complex<double> s{0.0, 0.0};
  for (const auto& v : z) s += v;
  s /= static_cast<double>(z.size());
  double acc = 0.0;
  for (const auto& v : z) acc += std::norm(v - s);
  return acc / static_cast<double>(z.size() - 1);
}

// One-sample Kolmogorov-Smirnov statistic against Exp(scale).
inline double ks_exponential(std::vector<double> x, double scale) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = 1.0 - std::exp(-x[i] / scale);
    d = std::max(d, std::abs(f - (i + 1) / n));
    d = std::max(d, std::abs(f - i / n));
  }
  return d;
}

}  // namespace oracles
