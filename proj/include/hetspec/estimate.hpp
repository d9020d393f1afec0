#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "hetspec/simulate.hpp"

namespace hetspec {

// Displacement search region, expressed around nominal centers in the
// dimensionless coordinates x = sigma*t_r, y = omega_r/sigma that keep the
// optimizer conditioned on O(1) scales.
struct SearchConfig {
  double t_center = 0.0;         // s
  double omega_center = 0.0;     // rad/s
  double t_halfwidth = 2.0;      // units of 1/sigma
  double omega_halfwidth = 2.0;  // units of sigma
  int coarse_points = 41;        // per axis
  double refine_tol = 1e-4;      // simplex diameter, dimensionless
  int max_iterations = 200;

  void validate() const;
};

// Per-trace projections onto both modes at one displacement.
struct ProjectionSet {
  std::vector<std::complex<double>> z0, z1;              // signal traces
  std::vector<std::complex<double>> z0_noise, z1_noise;  // noise-only traces
  double t_r = 0.0;
  double omega_r = 0.0;
};

// Raw and normalized variances evaluated at one displacement. `degenerate`
// marks v0 - v0_noise <= 0 (no detectable signal), in which case `ratio` is
// meaningless.
struct DisplacedVariance {
  double t_r = 0.0;
  double omega_r = 0.0;
  double v0 = 0.0, v1 = 0.0;
  double v0_noise = 0.0, v1_noise = 0.0;
  double ratio = 0.0;
  bool degenerate = false;
};

struct MinimizeResult {
  DisplacedVariance at_min;
  int iterations = 0;
  bool all_degenerate = false;  // every coarse cell lacked signal
};

struct EstimateReport {
  double epsilon_hat = 0.0;
  double t_r_hat = 0.0;
  double omega_r_hat = 0.0;
  double v_eps = 0.0;  // minimal normalized variance, before clamping
  double snr = 0.0;
  double v0 = 0.0, v1 = 0.0, v0_noise = 0.0, v1_noise = 0.0;
  bool valid = false;
};

// Streaming second-moment summary H = sum Z Z^H, S = sum Z of a trace
// ensemble. The complex sample variance of the projections z_n = sum_i
// conj(Z_ni) w_i follows for any weight vector w as
//   V(w) = (w^H H w - |S^H w|^2 / N) / (N - 1),
// which lets the displacement search run on quadratic forms instead of
// re-projecting every trace. Accumulation is chunked; partial sums combine
// in fixed chunk order, so results are independent of thread count.
class EnsembleMoments {
 public:
  static EnsembleMoments accumulate(const TraceSource& source);

  double variance(const Eigen::VectorXcd& w) const;
  std::int64_t count() const { return count_; }

 private:
  Eigen::MatrixXcd h_;   // lower triangle valid
  Eigen::VectorXcd s_;
  std::int64_t count_ = 0;
};

// Projection weights w_i = u_k(t_i - t_r) exp(i omega_r t_i) dt for both
// modes on the physical sample times of the grid.
void displacement_weights(const GridSpec& grid, double sigma, double t_r,
                          double omega_r, Eigen::VectorXcd& w0,
                          Eigen::VectorXcd& w1);

// Discrete projection z = sum_i Z(t_i)^* u^(k)(t_i - t_r) e^{i omega_r t_i} dt
// for each trace column.
std::vector<std::complex<double>> project(const Eigen::MatrixXcd& traces,
                                          const GridSpec& grid, double sigma,
                                          int k, double t_r, double omega_r);
std::vector<std::complex<double>> project(const TraceBatch& batch, int k,
                                          double t_r, double omega_r);
std::vector<std::complex<double>> project_noise(const TraceBatch& batch, int k,
                                                double t_r, double omega_r);

// Complex sample variance E|z - <z>|^2 with the unbiased 1/(N-1) norm.
double complex_variance(const std::vector<std::complex<double>>& z);

// Separation estimate from the minimal normalized variance: 4 sqrt(max(v, 0)).
// Negative inputs (noise fluctuations swallowing the signal) clamp to zero.
double epsilon_from_ratio(double v_eps);

// Noise-subtracted variance ratio (v1 - v1n)/(v0 - v0n) at one displacement,
// from direct projections of the batch.
DisplacedVariance normalized_variance(const TraceBatch& batch, double t_r,
                                      double omega_r);

// Coarse-grid scan followed by Nelder-Mead refinement of the variance ratio
// over the search region. Deterministic for fixed inputs; throws
// std::runtime_error if refinement exceeds the iteration cap.
MinimizeResult minimize_displacement(const TraceBatch& batch,
                                     const SearchConfig& search = {});

EstimateReport estimate(const TraceBatch& batch, const SearchConfig& search = {});

struct EstimationResult {
  EstimateReport report;
  ProjectionSet projections;
  int iterations = 0;
};

// Streaming variant: the sources are swept twice (moments, then projections
// at the optimum), never materializing the ensemble.
EstimationResult estimate_with_projections(const TraceSource& signal,
                                           const TraceSource& noise,
                                           const SearchConfig& search = {});

}  // namespace hetspec
