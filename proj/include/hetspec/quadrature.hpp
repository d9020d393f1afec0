#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hetspec {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], computed
// by Newton iteration on the Legendre recurrence.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(int n);

// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
template <class F>
double integrate_panels(F&& f, double a, double b, int panels, int order = 15) {
  const auto& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      acc += rule.weights[q] * f(mid + 0.5 * h * rule.nodes[q]);
    total += 0.5 * h * acc;
  }
  return total;
}

// Panel-doubling composite Gauss-Legendre until two successive refinements
// agree to the requested tolerance. Throws std::runtime_error when the
// doubling cap is reached without convergence.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 0.0, int init_panels = 8,
                 int max_doublings = 10) {
  int panels = init_panels;
  double prev = integrate_panels(f, a, b, panels);
  for (int i = 0; i < max_doublings; ++i) {
    panels *= 2;
    const double cur = integrate_panels(f, a, b, panels);
    if (std::abs(cur - prev) <= std::max(abs_tol, rel_tol * std::abs(cur)))
      return cur;
    prev = cur;
  }
  throw std::runtime_error("integrate: panel doubling did not converge");
}

// Uniform rectangle rule over one full period, doubling the node count until
// two refinements agree. Converges geometrically for smooth periodic
// integrands, so the cap is generous.
template <class F>
double integrate_periodic(F&& f, double period, double rel_tol = 1e-12,
                          int init_n = 32, int max_n = 1 << 17) {
  int n = init_n;
  auto eval = [&](int m) {
    const double h = period / m;
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += f(i * h);
    return acc * h;
  };
  double prev = eval(n);
  while (n < max_n) {
    n *= 2;
    const double cur = eval(n);
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  throw std::runtime_error("integrate_periodic: node doubling did not converge");
}

}  // namespace hetspec
