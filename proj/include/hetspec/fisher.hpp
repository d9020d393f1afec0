#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace hetspec {

enum class Scheme { HeterodyneThermal, HeterodyneCoherent, DirectSensing };

// Per-photon Fisher information sampled over a separation grid.
struct FisherCurve {
  std::vector<double> epsilons;
  std::vector<double> values;
  Scheme scheme = Scheme::HeterodyneThermal;
  double n_bar = 0.0;
};

// Average amplitude in the antisymmetric mode, sqrt(n_bar/2) c1(eps).
double mode_amplitude(double epsilon, double n_bar);

// Heterodyne outcome density in the antisymmetric mode for a thermal source:
// complex Gaussian with total variance 2|alpha|^2 + 1 (signal + shot noise).
double p_thermal(std::complex<double> z, double epsilon, double n_bar);

// Same for a phase-averaged coherent source. The two line phases reduce to a
// uniform global phase (integrated in closed form, giving a Bessel I0 factor)
// and a relative phase psi handled by quadrature:
//   p(z) = (1/2pi) Int dpsi (1/pi) exp(-|z|^2 - r^2) I0(2 |z| r),
//   r(psi) = 2 |alpha| |sin(psi/2)|.
double p_coherent(std::complex<double> z, double epsilon, double n_bar,
                  double rel_tol = 1e-12);

// Isotropic outcome-density family: (|z|, epsilon) -> probability density.
using RadialDensity = std::function<double(double, double)>;

// Per-photon Fisher information of an isotropic outcome family by central
// finite differences in epsilon and radial quadrature. A halved-step check
// guards the difference quotient; throws std::runtime_error when it, the
// quadrature, or density underflow makes the result unreliable.
// d_eps <= 0 selects the default step 1e-4 * max(epsilon, 1).
double fisher_numeric(const RadialDensity& density, double epsilon,
                      double n_bar, double d_eps = 0.0);

// Closed form of the thermal per-photon Fisher information:
//   n (e/4)^2 ((e/4)^2 - 1)^2 / (4 (exp((e/4)^2) + n (e/4)^2)^2).
double fisher_thermal_analytic(double epsilon, double n_bar);

// Direct-sensing benchmark: the power spectrum of the pair, a balanced
// mixture of unit-width Gaussians at +-eps/2 in omega/sigma, treated as the
// outcome density of a single detected photon.
double fisher_direct_sensing(double epsilon);

// Dispatch on scheme; n_bar is ignored for direct sensing.
double per_photon_fi(Scheme scheme, double epsilon, double n_bar);

FisherCurve fisher_curve(Scheme scheme, std::vector<double> epsilons,
                         double n_bar);

}  // namespace hetspec
