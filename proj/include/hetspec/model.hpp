#pragma once

#include <complex>

namespace hetspec {

enum class SourceKind { Thermal, PhaseAveragedCoherent };

// Two Gaussian spectral lines at omega_c +- sigma*epsilon/2 sharing the
// temporal envelope exp(-sigma^2 (t - t_c)^2), emitting n_bar photons per
// shot on average. epsilon is the dimensionless separation in units of the
// mode width sigma.
struct SourceParams {
  double epsilon = 0.0;
  double sigma = 1.0;    // temporal-mode spread, rad/s
  double t_c = 0.0;      // time centroid, s
  double omega_c = 0.0;  // frequency centroid, rad/s
  double n_bar = 0.0;    // mean photon number per shot
  SourceKind kind = SourceKind::Thermal;

  // Throws std::invalid_argument on violated bounds.
  void validate() const;
};

// Per-shot complex amplitudes of the two lines, A0 = 1 convention.
// Thermal: a1, a2 i.i.d. CN(0, 1/2). Phase-averaged coherent:
// a1 = exp(i phi0)/sqrt(2), a2 = exp(-i phi0)/sqrt(2).
struct SourceRealization {
  std::complex<double> a1{0.0, 0.0};
  std::complex<double> a2{0.0, 0.0};
};

// Fundamental Gaussian mode (2 sigma^2 / pi)^(1/4) exp(-sigma^2 (t-t_shift)^2);
// unit L2 norm for any sigma > 0.
double hg0(double t, double sigma, double t_shift = 0.0);

// First excited Hermite-Gauss mode 2 sigma (t - t_shift) hg0; antisymmetric
// about t_shift, unit norm, orthogonal to hg0.
double hg1(double t, double sigma, double t_shift = 0.0);

// Field envelope of one shot:
//   G(t-t_c) e^{i omega_c (t-t_c)} (a1 e^{-i sigma eps (t-t_c)/2}
//                                   + a2 e^{+i sigma eps (t-t_c)/2}).
std::complex<double> envelope(const SourceParams& params,
                              const SourceRealization& realization, double t);

// Amplitude overlap of a single line detuned by sigma*epsilon/2 with mode k:
// exp(-eps^2/32) (eps/4)^k / sqrt(k!). Only k in {0, 1} is supported; the
// residual weight in higher modes is negligible for the separations of
// interest.
double overlap_coefficient(int k, double epsilon);

}  // namespace hetspec
