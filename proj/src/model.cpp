#include "hetspec/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hetspec {

void SourceParams::validate() const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("source: epsilon must be >= 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("source: sigma must be > 0");
  if (!(n_bar >= 0.0)) throw std::invalid_argument("source: n_bar must be >= 0");
  if (!std::isfinite(t_c) || !std::isfinite(omega_c))
    throw std::invalid_argument("source: centroids must be finite");
}

double hg0(double t, double sigma, double t_shift) {
  const double u = t - t_shift;
  return std::pow(2.0 * sigma * sigma / std::numbers::pi, 0.25) *
         std::exp(-sigma * sigma * u * u);
}

double hg1(double t, double sigma, double t_shift) {
  return 2.0 * sigma * (t - t_shift) * hg0(t, sigma, t_shift);
}

std::complex<double> envelope(const SourceParams& params,
                              const SourceRealization& realization, double t) {
  const double u = t - params.t_c;
  const double half = 0.5 * params.sigma * params.epsilon * u;
  const std::complex<double> carrier =
      std::polar(hg0(u, params.sigma), params.omega_c * u);
  return carrier * (realization.a1 * std::polar(1.0, -half) +
                    realization.a2 * std::polar(1.0, half));
}

double overlap_coefficient(int k, double epsilon) {
  if (k != 0 && k != 1)
    throw std::invalid_argument("overlap_coefficient: mode index must be 0 or 1");
  if (!(epsilon >= 0.0))
    throw std::invalid_argument("overlap_coefficient: epsilon must be >= 0");
  const double gauss = std::exp(-epsilon * epsilon / 32.0);
  return k == 0 ? gauss : gauss * (epsilon / 4.0);
}

}  // namespace hetspec
