#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "hetspec/fisher.hpp"
#include "hetspec/quadrature.hpp"
#include "hetspec/rng.hpp"

using namespace hetspec;
using std::numbers::pi;

namespace {

double radial_norm(const std::function<double(double)>& p, double radius) {
  return 2.0 * pi *
         integrate([&](double r) { return p(r) * r; }, 0.0, radius, 1e-12);
}

// Eq.-style brute force: average exp(-|z - a(e^{i p1} - e^{i p2})|^2)/pi over
// both phases on an m x m trapezoid grid.
double coherent_brute_force(double z_abs, double eps, double n_bar, int m) {
  const double a = mode_amplitude(eps, n_bar);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double p1 = 2.0 * pi * i / m;
    for (int j = 0; j < m; ++j) {
      const double p2 = 2.0 * pi * j / m;
      const std::complex<double> w =
          a * (std::polar(1.0, p1) - std::polar(1.0, p2));
      acc += std::exp(-std::norm(std::complex<double>(z_abs, 0.0) - w));
    }
  }
  return acc / (static_cast<double>(m) * m * pi);
}

}  // namespace

TEST_CASE("thermal density: zero separation is pure shot noise") {
  for (const double r : {0.0, 0.7, 2.0})
    CHECK(p_thermal({r, 0.0}, 0.0, 123.0) ==
          doctest::Approx(std::exp(-r * r) / pi).epsilon(1e-14));
}

TEST_CASE("thermal density normalizes and has variance 2|a|^2+1") {
  for (const double eps : {0.3, 1.0, 3.0}) {
    const double n_bar = 20.0;
    const double a = mode_amplitude(eps, n_bar);
    const double radius = 8.0 + 4.0 * a;
    auto p = [&](double r) { return p_thermal({r, 0.0}, eps, n_bar); };
    CHECK(radial_norm(p, radius) == doctest::Approx(1.0).epsilon(1e-8));
    const double second =
        2.0 * pi *
        integrate([&](double r) { return p(r) * r * r * r; }, 0.0, radius, 1e-12);
    CHECK(second == doctest::Approx(2.0 * a * a + 1.0).epsilon(1e-8));
  }
}

TEST_CASE("coherent density: zero separation is pure shot noise") {
  for (const double r : {0.0, 1.1})
    CHECK(p_coherent({r, 0.0}, 0.0, 50.0) ==
          doctest::Approx(std::exp(-r * r) / pi).epsilon(1e-14));
}

TEST_CASE("coherent density matches the two-phase brute force") {
  // frozen external oracle for (|z|, eps, n) = (1, 1, 10)
  CHECK(p_coherent({1.0, 0.0}, 1.0, 10.0) ==
        doctest::Approx(0.10718646687786417).epsilon(1e-10));
  CHECK(coherent_brute_force(1.0, 1.0, 10.0, 512) ==
        doctest::Approx(p_coherent({1.0, 0.0}, 1.0, 10.0)).epsilon(1e-6));
}

TEST_CASE("coherent density normalizes") {
  for (const double eps : {0.5, 2.0}) {
    const double n_bar = 30.0;
    const double radius = 8.0 + 4.0 * mode_amplitude(eps, n_bar);
    auto p = [&](double r) { return p_coherent({r, 0.0}, eps, n_bar); };
    CHECK(radial_norm(p, radius) == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("densities are isotropic in the outcome phase") {
  RngStream rng(stream_key(5, 0, 0));
  for (int i = 0; i < 20; ++i) {
    const double r = 3.0 * rng.next_uniform();
    const double phase = 2.0 * pi * rng.next_uniform();
    const std::complex<double> z = std::polar(r, phase);
    CHECK(std::abs(p_thermal(z, 1.2, 8.0) - p_thermal({r, 0.0}, 1.2, 8.0)) <
          1e-12);
    CHECK(std::abs(p_coherent(z, 1.2, 8.0) - p_coherent({r, 0.0}, 1.2, 8.0)) <
          1e-12);
  }
}

TEST_CASE("numeric FI on the thermal density matches the closed form") {
  for (const double eps : {0.25, 1.0, 2.0}) {
    for (const double n_bar : {1.0, 10.0, 100.0}) {
      const RadialDensity density = [n_bar](double r, double e) {
        return p_thermal({r, 0.0}, e, n_bar);
      };
      const double numeric = fisher_numeric(density, eps, n_bar);
      const double analytic = fisher_thermal_analytic(eps, n_bar);
      CHECK(numeric == doctest::Approx(analytic).epsilon(1e-6));
    }
  }
}

TEST_CASE("thermal FI closed form: frozen values and zeros") {
  CHECK(fisher_thermal_analytic(0.0, 7.0) == 0.0);
  CHECK(fisher_thermal_analytic(4.0, 7.0) == doctest::Approx(0.0).epsilon(1e-30));
  CHECK(fisher_thermal_analytic(1.0, 10.0) ==
        doctest::Approx(0.048111515283464702).epsilon(1e-13));
}

TEST_CASE("per-photon FI scales monotonically with n_bar for thermal light") {
  for (const double eps : {0.5, 1.5, 3.0}) {
    double prev = 0.0;
    for (double n_bar = 1.0; n_bar <= 1024.0; n_bar *= 2.0) {
      const double total = n_bar * fisher_thermal_analytic(eps, n_bar);
      CHECK(total > prev);
      prev = total;
    }
  }
}

TEST_CASE("FI vanishes with the separation for both heterodyne schemes") {
  CHECK(per_photon_fi(Scheme::HeterodyneThermal, 0.0, 50.0) == 0.0);
  CHECK(per_photon_fi(Scheme::HeterodyneCoherent, 0.0, 50.0) == 0.0);
  CHECK(fisher_thermal_analytic(1e-3, 50.0) < 1e-4);
  const RadialDensity coh = [](double r, double e) {
    return p_coherent({r, 0.0}, e, 50.0);
  };
  CHECK(fisher_numeric(coh, 1e-3, 50.0) < 1e-4);
}

TEST_CASE("coherent light carries at least the thermal information") {
  for (const double eps : {0.25, 0.5, 1.0}) {
    const double coh = per_photon_fi(Scheme::HeterodyneCoherent, eps, 50.0);
    const double th = per_photon_fi(Scheme::HeterodyneThermal, eps, 50.0);
    CHECK(coh >= th * (1.0 - 1e-6));
  }
}

TEST_CASE("heterodyne FI beats direct sensing below the crossover") {
  for (double eps = 0.05; eps <= 0.5 + 1e-9; eps += 0.05)
    CHECK(fisher_thermal_analytic(eps, 50.0) > fisher_direct_sensing(eps));
}

TEST_CASE("direct sensing: resolved and unresolved limits") {
  CHECK(fisher_direct_sensing(0.0) == 0.0);
  CHECK(fisher_direct_sensing(20.0) == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(fisher_direct_sensing(0.05) ==
        doctest::Approx(0.000312110024621).epsilon(1e-6));
  CHECK(fisher_direct_sensing(0.2) ==
        doctest::Approx(0.00490257718868).epsilon(1e-6));
  CHECK(fisher_direct_sensing(1.0) ==
        doctest::Approx(0.0858159882431).epsilon(1e-6));
}

TEST_CASE("curves have no quadrature artifacts at 0.01 resolution") {
  // second difference of a smooth curve at h=0.01 stays tiny
  const double n_bar = 25.0;
  for (const double eps : {0.2, 0.6, 1.0}) {
    const RadialDensity coh = [n_bar](double r, double e) {
      return p_coherent({r, 0.0}, e, n_bar);
    };
    const double a = fisher_numeric(coh, eps - 0.01, n_bar);
    const double b = fisher_numeric(coh, eps, n_bar);
    const double c = fisher_numeric(coh, eps + 0.01, n_bar);
    CHECK(std::abs(a - 2.0 * b + c) < 1e-4);
    const double da = fisher_direct_sensing(eps - 0.01);
    const double db = fisher_direct_sensing(eps);
    const double dc = fisher_direct_sensing(eps + 0.01);
    CHECK(std::abs(da - 2.0 * db + dc) < 1e-4);
  }
}

TEST_CASE("fisher_curve evaluates every grid point nonnegatively") {
  const FisherCurve curve = fisher_curve(
      Scheme::HeterodyneThermal, {0.0, 0.25, 0.5, 1.0, 2.0, 3.9}, 10.0);
  REQUIRE(curve.values.size() == curve.epsilons.size());
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    CHECK(std::isfinite(curve.values[i]));
    CHECK(curve.values[i] >= 0.0);
    CHECK(curve.values[i] ==
          doctest::Approx(fisher_thermal_analytic(curve.epsilons[i], 10.0))
              .epsilon(1e-14));
  }
}

TEST_CASE("fisher_numeric rejects a step outside its domain") {
  const RadialDensity density = [](double r, double e) {
    return p_thermal({r, 0.0}, e, 5.0);
  };
  CHECK_THROWS_AS((void)fisher_numeric(density, 0.5, 5.0, 0.6),
                  std::invalid_argument);
}

TEST_CASE("fisher_numeric flags densities that underflow its support") {
  // mass concentrated far outside [0, R]: the quadrature sees only zeros
  const RadialDensity far_away = [](double r, double e) {
    const double d = r - 500.0 - e;
    return std::exp(-d * d);
  };
  CHECK_THROWS_AS((void)fisher_numeric(far_away, 0.5, 5.0),
                  std::runtime_error);
}
