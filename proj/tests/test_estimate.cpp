#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "hetspec/estimate.hpp"
#include "hetspec/model.hpp"
#include "hetspec/rng.hpp"
#include "hetspec/simulate.hpp"
#include "oracles.hpp"

using namespace hetspec;

namespace {

const GridSpec kGrid{512, -6.0, 6.0};
const GridSpec kGrid256{256, -6.0, 6.0};

SourceParams make_params(double eps, double n_bar,
                         SourceKind kind = SourceKind::Thermal) {
  SourceParams p;
  p.epsilon = eps;
  p.n_bar = n_bar;
  p.kind = kind;
  return p;
}

// batch whose signal columns are analytic functions of t
TraceBatch analytic_batch(const GridSpec& grid,
                          const std::vector<std::function<std::complex<double>(double)>>& fns) {
  TraceBatch b;
  b.params = make_params(0.0, 1.0);
  b.grid = grid;
  b.signal.resize(grid.n_samples, static_cast<Eigen::Index>(fns.size()));
  b.noise = Eigen::MatrixXcd::Zero(grid.n_samples, 2);
  for (std::size_t j = 0; j < fns.size(); ++j)
    for (int i = 0; i < grid.n_samples; ++i)
      b.signal(i, static_cast<Eigen::Index>(j)) = fns[j](grid.tau(i));
  return b;
}

}  // namespace

TEST_CASE("projection reproduces discrete normalization and orthogonality") {
  const auto batch = analytic_batch(
      kGrid, {[](double t) { return std::complex<double>(hg0(t, 1.0), 0.0); }});
  const auto z0 = project(batch, 0, 0.0, 0.0);
  const auto z1 = project(batch, 1, 0.0, 0.0);
  CHECK(std::abs(z0[0] - 1.0) < 1e-6);
  CHECK(std::abs(z1[0]) < 1e-6);
}

TEST_CASE("projection of a shifted fundamental matches the overlap oracle") {
  const double delta = 0.3;
  const auto batch = analytic_batch(kGrid, {[&](double t) {
    return std::complex<double>(hg0(t, 1.0, delta), 0.0);
  }});
  const auto z1 = project(batch, 1, 0.0, 0.0);
  // frozen quadrature value of <u0(.-0.3), u1>
  CHECK(std::abs(z1[0]) == doctest::Approx(0.28679924454992997).epsilon(1e-6));
}

TEST_CASE("projection covariance under trace modulation") {
  const SourceParams p = make_params(0.6, 30.0);
  TraceBatch batch = synthesize_batch(p, kGrid256, 50, 2, 17);
  const double delta = 0.8;
  TraceBatch modulated = batch;
  for (int i = 0; i < kGrid256.n_samples; ++i) {
    const double t = kGrid256.tau(i) / p.sigma;
    modulated.signal.row(i) *= std::polar(1.0, delta * t);
  }
  for (const double omega_r : {0.0, 0.5, -1.2}) {
    const auto direct = project(modulated, 1, 0.1, omega_r);
    const auto shifted = project(batch, 1, 0.1, omega_r - delta);
    for (std::size_t n = 0; n < direct.size(); ++n)
      CHECK(std::abs(direct[n] - shifted[n]) < 1e-9);
  }
}

TEST_CASE("moment summary agrees with direct projection variances") {
  const SourceParams p = make_params(0.5, 10.0);
  const TraceBatch batch = synthesize_batch(p, kGrid256, 700, 300, 31);
  const MatrixSource source(batch.signal, batch.grid, p.sigma);
  const EnsembleMoments moments = EnsembleMoments::accumulate(source);
  RngStream rng(stream_key(32, 0, 0));
  for (int trial = 0; trial < 5; ++trial) {
    const double t_r = rng.next_uniform() - 0.5;
    const double omega_r = 2.0 * rng.next_uniform() - 1.0;
    for (int k = 0; k < 2; ++k) {
      Eigen::VectorXcd w0, w1;
      displacement_weights(batch.grid, p.sigma, t_r, omega_r, w0, w1);
      const double fast = moments.variance(k == 0 ? w0 : w1);
      const double direct = oracles::complex_sample_variance(
          project(batch, k, t_r, omega_r));
      CHECK(fast == doctest::Approx(direct).epsilon(1e-10));
    }
  }
}

TEST_CASE("noiseless thermal ratio reproduces (eps/4)^2 at the centroid") {
  const double eps = 0.8;
  const SourceParams p = make_params(eps, 40.0);
  const TraceBatch batch =
      synthesize_batch(p, kGrid256, 20000, 100, 41, {.shot_noise = false});
  const DisplacedVariance v = normalized_variance(batch, 0.0, 0.0);
  REQUIRE_FALSE(v.degenerate);
  CHECK(v.v0_noise == 0.0);
  CHECK(v.v1_noise == 0.0);
  CHECK(v.ratio == doctest::Approx(eps * eps / 16.0).epsilon(0.05));
}

TEST_CASE("noiseless ratio at eps = 0 vanishes") {
  const SourceParams p = make_params(0.0, 40.0);
  const TraceBatch batch =
      synthesize_batch(p, kGrid256, 20000, 100, 42, {.shot_noise = false});
  const DisplacedVariance v = normalized_variance(batch, 0.0, 0.0);
  REQUIRE_FALSE(v.degenerate);
  CHECK(std::abs(v.ratio) < 5.0 * std::sqrt(2.0 / 20000.0) / 16.0);
}

TEST_CASE("identical signal and noise ensembles are degenerate") {
  const SourceParams p = make_params(0.0, 0.0);
  TraceBatch batch = synthesize_batch(p, kGrid256, 500, 500, 43);
  batch.signal = batch.noise;  // exactly no signal above the noise reference
  const DisplacedVariance v = normalized_variance(batch, 0.0, 0.0);
  CHECK(v.degenerate);
}

TEST_CASE("estimate flags a zero-signal batch") {
  const SourceParams p = make_params(0.0, 0.0);
  const TraceBatch batch = synthesize_batch(p, kGrid256, 4000, 4000, 44);
  SearchConfig search;
  search.coarse_points = 21;
  search.t_halfwidth = 1.0;
  search.omega_halfwidth = 1.0;
  const EstimateReport report = estimate(batch, search);
  CHECK(report.epsilon_hat == 0.0);
}

TEST_CASE("variance minimum sits at the true centroid for a symmetric batch") {
  const SourceParams p = make_params(0.3, 100.0);
  const TraceBatch batch = synthesize_batch(p, kGrid256, 20000, 20000, 45);
  const DisplacedVariance center = normalized_variance(batch, 0.0, 0.0);
  const DisplacedVariance left = normalized_variance(batch, -1.0, 0.0);
  const DisplacedVariance right = normalized_variance(batch, 1.0, 0.0);
  REQUIRE_FALSE(center.degenerate);
  REQUIRE_FALSE(left.degenerate);
  REQUIRE_FALSE(right.degenerate);
  CHECK(center.ratio < left.ratio);
  CHECK(center.ratio < right.ratio);
}

TEST_CASE("minimizer recovers displaced centroids") {
  SourceParams p = make_params(0.2, 100.0);
  p.t_c = 0.5;
  p.omega_c = 0.3;
  const TraceBatch batch = synthesize_batch(p, kGrid, 20000, 20000, 46);
  const MinimizeResult res = minimize_displacement(batch);
  REQUIRE_FALSE(res.all_degenerate);
  CHECK(res.at_min.t_r == doctest::Approx(0.5).epsilon(0.4));   // |t-0.5|<0.2
  CHECK(std::abs(res.at_min.omega_r - 0.3) < 0.2);
}

TEST_CASE("frequency shifts move the minimizing displacement covariantly") {
  const double delta = 0.5;
  SourceParams p = make_params(0.2, 100.0);
  const TraceBatch base = synthesize_batch(p, kGrid256, 10000, 10000, 47);
  p.omega_c = delta;
  const TraceBatch shifted = synthesize_batch(p, kGrid256, 10000, 10000, 47);
  const MinimizeResult r0 = minimize_displacement(base);
  const MinimizeResult r1 = minimize_displacement(shifted);
  CHECK(std::abs((r1.at_min.omega_r - r0.at_min.omega_r) - delta) < 0.1);
}

TEST_CASE("end-to-end estimate on a thermal batch") {
  const double eps = 0.5, n_bar = 50.0;
  const SourceParams p = make_params(eps, n_bar);
  const TraceBatch batch = synthesize_batch(p, kGrid, 40000, 40000, 48);
  const EstimateReport report = estimate(batch);
  REQUIRE(report.valid);
  // predicted estimator standard deviations at N = M = 4e4
  CHECK(report.epsilon_hat == doctest::Approx(eps).epsilon(0.03));
  CHECK(report.snr == doctest::Approx(n_bar).epsilon(3.0 * 51.0 *
                                                     std::sqrt(5e-5) / n_bar));
  CHECK(report.v_eps == doctest::Approx(eps * eps / 16.0).epsilon(0.1));
  CHECK(report.epsilon_hat == 4.0 * std::sqrt(std::max(report.v_eps, 0.0)));
}

TEST_CASE("estimates are invariant under joint sigma/grid rescaling") {
  // sigma = 0.5 halves every trace value exactly (powers of two), so the
  // dimensionless projections and the report must match to rounding
  const std::uint64_t seed = 49;
  SourceParams p1 = make_params(0.4, 25.0);
  SourceParams p2 = p1;
  p2.sigma = 0.5;
  const TraceBatch b1 = synthesize_batch(p1, kGrid256, 5000, 5000, seed);
  const TraceBatch b2 = synthesize_batch(p2, kGrid256, 5000, 5000, seed);
  const auto z1 = project(b1, 1, 0.2, 0.3);
  const auto z2 = project(b2, 1, 0.2 / 0.5, 0.3 * 0.5);
  for (std::size_t i = 0; i < z1.size(); ++i)
    CHECK(std::abs(z1[i] - z2[i]) < 1e-9);
  const EstimateReport r1 = estimate(b1);
  const EstimateReport r2 = estimate(b2);
  CHECK(r1.epsilon_hat == doctest::Approx(r2.epsilon_hat).epsilon(1e-9));
  CHECK(r1.snr == doctest::Approx(r2.snr).epsilon(1e-9));
}

TEST_CASE("refinement signals non-convergence at an absurd iteration cap") {
  const SourceParams p = make_params(0.4, 50.0);
  const TraceBatch batch = synthesize_batch(p, kGrid256, 2000, 2000, 50);
  SearchConfig search;
  search.max_iterations = 1;
  search.refine_tol = 1e-12;
  CHECK_THROWS_AS((void)minimize_displacement(batch, search),
                  std::runtime_error);
}

TEST_CASE("estimate on a fully degenerate batch is flagged invalid") {
  const SourceParams p = make_params(0.0, 0.0);
  TraceBatch batch = synthesize_batch(p, kGrid256, 400, 400, 53);
  batch.signal = batch.noise;  // denominator is exactly zero everywhere
  const EstimateReport report = estimate(batch);
  CHECK_FALSE(report.valid);
  CHECK(report.epsilon_hat == 0.0);
  CHECK(report.snr <= 0.0);
}

TEST_CASE("separation clamp is nondecreasing and zero below zero") {
  RngStream rng(stream_key(52, 0, 0));
  std::vector<double> ratios{-1.0, -1e-3, 0.0};
  for (int i = 0; i < 50; ++i) ratios.push_back(2.0 * rng.next_uniform() - 0.5);
  std::sort(ratios.begin(), ratios.end());
  double prev = -1.0;
  for (const double v : ratios) {
    const double e = epsilon_from_ratio(v);
    if (v <= 0.0) CHECK(e == 0.0);
    CHECK(e >= prev);
    prev = e;
  }
  CHECK(epsilon_from_ratio(0.25) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("search config validation") {
  SearchConfig s;
  s.t_halfwidth = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = SearchConfig{};
  s.coarse_points = 1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = SearchConfig{};
  s.refine_tol = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("streaming estimate matches the in-memory batch path") {
  const SourceParams p = make_params(0.5, 30.0);
  const std::uint64_t seed = 51;
  const TraceBatch batch = synthesize_batch(p, kGrid256, 3000, 3000, seed);
  const EstimateReport from_batch = estimate(batch);

  const SyntheticSource signal(p, kGrid256, SyntheticSource::Kind::Signal, 3000,
                               seed);
  const SyntheticSource noise(p, kGrid256, SyntheticSource::Kind::NoiseOnly,
                              3000, seed);
  const EstimationResult streamed = estimate_with_projections(signal, noise);
  CHECK(streamed.report.epsilon_hat ==
        doctest::Approx(from_batch.epsilon_hat).epsilon(1e-12));
  CHECK(streamed.report.snr == doctest::Approx(from_batch.snr).epsilon(1e-12));
  CHECK(streamed.projections.z0.size() == 3000);
  CHECK(streamed.projections.z0_noise.size() == 3000);
  // projections at the optimum agree with the direct path
  const auto direct =
      project(batch, 0, streamed.projections.t_r, streamed.projections.omega_r);
  for (std::size_t i = 0; i < direct.size(); ++i)
    CHECK(std::abs(direct[i] - streamed.projections.z0[i]) < 1e-10);
}
