#include "hetspec/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hetspec/model.hpp"
#include "hetspec/quadrature.hpp"
#include "hetspec/special.hpp"

namespace hetspec {

namespace {

constexpr double kPi = std::numbers::pi;

double p_coherent_radial(double r_z, double epsilon, double n_bar,
                         double rel_tol) {
  const double a = mode_amplitude(epsilon, n_bar);
  if (a == 0.0) return std::exp(-r_z * r_z) / kPi;
  // Integrand is analytic and 2pi-periodic in the relative phase, so the
  // rectangle rule converges geometrically.
  const double raw = integrate_periodic(
      [&](double psi) {
        const double r = 2.0 * a * std::abs(std::sin(0.5 * psi));
        const double d = r_z - r;
        return std::exp(-d * d) * bessel_i0_scaled(2.0 * r_z * r);
      },
      2.0 * kPi, rel_tol);
  return raw / (2.0 * kPi * kPi);
}

struct RadialFi {
  double value = 0.0;
  double underflow_fraction = 0.0;
};

// F = 2 pi Int_0^R (dp/de)^2 / p * r dr with a central difference in epsilon.
RadialFi radial_fi(const RadialDensity& density, double epsilon, double step,
                   double radius, int panels) {
  const auto& rule = gauss_legendre(15);
  const double h = radius / panels;
  double total = 0.0;
  long nodes = 0, underflows = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double r = mid + 0.5 * h * rule.nodes[q];
      const double pc = density(r, epsilon);
      ++nodes;
      if (!(pc >= std::numeric_limits<double>::min())) {
        ++underflows;  // tail already carries no weight
        continue;
      }
      const double dp =
          (density(r, epsilon + step) - density(r, epsilon - step)) /
          (2.0 * step);
      total += rule.weights[q] * (dp * dp / pc) * r;
    }
  }
  return {kPi * h * total, static_cast<double>(underflows) / nodes};
}

double fi_at_step(const RadialDensity& density, double epsilon, double step,
                  double radius) {
  int panels = std::max(16, static_cast<int>(std::ceil(2.0 * radius)));
  RadialFi prev = radial_fi(density, epsilon, step, radius, panels);
  for (int i = 0; i < 4; ++i) {
    panels *= 2;
    const RadialFi cur = radial_fi(density, epsilon, step, radius, panels);
    if (cur.underflow_fraction > 0.5)
      throw std::runtime_error(
          "fisher_numeric: density underflows over most of the quadrature "
          "support");
    if (std::abs(cur.value - prev.value) <=
        std::max(1e-9 * std::abs(cur.value), 1e-15))
      return cur.value;
    prev = cur;
  }
  throw std::runtime_error("fisher_numeric: radial quadrature did not converge");
}

}  // namespace

double mode_amplitude(double epsilon, double n_bar) {
  return std::sqrt(0.5 * n_bar) * overlap_coefficient(1, epsilon);
}

double p_thermal(std::complex<double> z, double epsilon, double n_bar) {
  const double a = mode_amplitude(epsilon, n_bar);
  const double v = 2.0 * a * a + 1.0;
  return std::exp(-std::norm(z) / v) / (kPi * v);
}

double p_coherent(std::complex<double> z, double epsilon, double n_bar,
                  double rel_tol) {
  return p_coherent_radial(std::abs(z), epsilon, n_bar, rel_tol);
}

double fisher_numeric(const RadialDensity& density, double epsilon,
                      double n_bar, double d_eps) {
  if (!(epsilon >= 0.0))
    throw std::invalid_argument("fisher_numeric: epsilon must be >= 0");
  if (n_bar <= 0.0 || epsilon == 0.0) return 0.0;
  if (d_eps > 0.0 && d_eps >= epsilon)
    throw std::invalid_argument("fisher_numeric: require epsilon > d_eps");
  const double step =
      d_eps > 0.0 ? d_eps
                  : std::min(1e-4 * std::max(epsilon, 1.0), 0.5 * epsilon);
  // The (|z|^2/V - 1)^2 factor in the score amplifies the Gaussian tail, so
  // the domain needs six rather than four amplitude units of headroom before
  // truncation drops below 1e-9 of the information.
  const double radius = 6.0 + 6.0 * mode_amplitude(epsilon + step, n_bar);
  const double coarse = fi_at_step(density, epsilon, step, radius);
  const double fine = fi_at_step(density, epsilon, 0.5 * step, radius);
  if (std::abs(fine - coarse) > std::max(1e-5 * std::abs(fine), 1e-14))
    throw std::runtime_error(
        "fisher_numeric: finite-difference step check failed");
  return fine / n_bar;
}

double fisher_thermal_analytic(double epsilon, double n_bar) {
  const double x = epsilon * epsilon / 16.0;
  const double d = std::exp(x) + n_bar * x;
  return n_bar * x * (x - 1.0) * (x - 1.0) / (4.0 * d * d);
}

double fisher_direct_sensing(double epsilon) {
  if (!(epsilon >= 0.0))
    throw std::invalid_argument("fisher_direct_sensing: epsilon must be >= 0");
  if (epsilon == 0.0) return 0.0;
  const auto phi = [](double u) {
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * kPi);
  };
  // d/de of the mixture has a closed form through phi'(u) = -u phi(u).
  const auto integrand = [&](double v) {
    const double um = v - 0.5 * epsilon;
    const double up = v + 0.5 * epsilon;
    const double p = 0.5 * (phi(um) + phi(up));
    if (!(p >= std::numeric_limits<double>::min())) return 0.0;
    const double dp = 0.25 * (up * phi(up) - um * phi(um));
    return dp * dp / p;
  };
  const double span = 0.5 * epsilon + 10.0;
  return integrate(integrand, -span, span, 1e-10, 1e-16, 16);
}

double per_photon_fi(Scheme scheme, double epsilon, double n_bar) {
  switch (scheme) {
    case Scheme::HeterodyneThermal:
      return fisher_thermal_analytic(epsilon, n_bar);
    case Scheme::HeterodyneCoherent:
      return fisher_numeric(
          [n_bar](double r, double e) {
            return p_coherent_radial(r, e, n_bar, 1e-12);
          },
          epsilon, n_bar);
    case Scheme::DirectSensing:
      return fisher_direct_sensing(epsilon);
  }
  throw std::logic_error("per_photon_fi: unknown scheme");
}

FisherCurve fisher_curve(Scheme scheme, std::vector<double> epsilons,
                         double n_bar) {
  FisherCurve curve;
  curve.scheme = scheme;
  curve.n_bar = n_bar;
  curve.epsilons = std::move(epsilons);
  curve.values.resize(curve.epsilons.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < curve.epsilons.size(); ++i)
    curve.values[i] = per_photon_fi(scheme, curve.epsilons[i], n_bar);
  return curve;
}

}  // namespace hetspec
