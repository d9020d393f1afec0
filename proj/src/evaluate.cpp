#include "hetspec/evaluate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hetspec/rng.hpp"

namespace hetspec {

namespace {

using Pair = std::array<std::complex<double>, 2>;

std::vector<Pair> canonical_pairs(const std::vector<std::complex<double>>& a,
                                  const std::vector<std::complex<double>>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("bootstrap: projection arrays inconsistent");
  std::vector<Pair> pairs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) pairs[i] = {a[i], b[i]};
  const auto key = [](const Pair& p) {
    return std::array<double, 4>{p[0].real(), p[0].imag(), p[1].real(),
                                 p[1].imag()};
  };
  std::sort(pairs.begin(), pairs.end(),
            [&](const Pair& x, const Pair& y) { return key(x) < key(y); });
  return pairs;
}

struct VarAccum {
  std::complex<double> sum0{0.0, 0.0}, sum1{0.0, 0.0};
  double sq0 = 0.0, sq1 = 0.0;
  std::int64_t n = 0;

  void add(const Pair& p) {
    sum0 += p[0];
    sum1 += p[1];
    sq0 += std::norm(p[0]);
    sq1 += std::norm(p[1]);
    ++n;
  }
  double var0() const {
    return (sq0 - std::norm(sum0) / n) / static_cast<double>(n - 1);
  }
  double var1() const {
    return (sq1 - std::norm(sum1) / n) / static_cast<double>(n - 1);
  }
};

}  // namespace

BootstrapResult bootstrap(const ProjectionSet& projections,
                          std::int64_t ensemble_size, int ensemble_count,
                          std::uint64_t seed) {
  if (ensemble_count < 2)
    throw std::invalid_argument("bootstrap: ensemble_count must be >= 2");
  if (ensemble_size < 2)
    throw std::invalid_argument("bootstrap: ensemble_size must be >= 2");
  const auto signal = canonical_pairs(projections.z0, projections.z1);
  const auto noise = canonical_pairs(projections.z0_noise, projections.z1_noise);
  if (noise.size() < 2)
    throw std::invalid_argument("bootstrap: need >= 2 noise projections");

  BootstrapResult out;
  out.epsilon_hats.resize(ensemble_count);
  std::vector<int> degenerate(ensemble_count, 0);

#pragma omp parallel for schedule(static)
  for (int b = 0; b < ensemble_count; ++b) {
    RngStream rng(stream_key(seed, streams::bootstrap, static_cast<std::uint64_t>(b)));
    VarAccum sig, noi;
    for (std::int64_t i = 0; i < ensemble_size; ++i)
      sig.add(signal[rng.next_below(signal.size())]);
    for (std::size_t i = 0; i < noise.size(); ++i)
      noi.add(noise[rng.next_below(noise.size())]);
    const double den = sig.var0() - noi.var0();
    if (den <= 0.0) {
      out.epsilon_hats[b] = 0.0;
      degenerate[b] = 1;
      continue;
    }
    const double ratio = (sig.var1() - noi.var1()) / den;
    out.epsilon_hats[b] = epsilon_from_ratio(ratio);
  }
  out.degenerate_count = std::accumulate(degenerate.begin(), degenerate.end(), 0);
  return out;
}

PrecisionRecord precision_record(const BootstrapResult& boot, double snr_hat,
                                 std::int64_t n_shots, double epsilon_true) {
  const auto& e = boot.epsilon_hats;
  if (e.size() < 2)
    throw std::invalid_argument("precision_record: need >= 2 bootstrap values");

  PrecisionRecord rec;
  rec.epsilon_true = epsilon_true;
  rec.bootstrap_count = static_cast<int>(e.size());
  rec.degenerate_resamples = boot.degenerate_count;
  rec.snr_hat = snr_hat;

  const double b = static_cast<double>(e.size());
  const double mean = std::accumulate(e.begin(), e.end(), 0.0) / b;
  double m2 = 0.0, m4 = 0.0;
  for (const double v : e) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double var = m2 / (b - 1.0);
  m2 /= b;
  m4 /= b;

  rec.epsilon_hat_mean = mean;
  rec.bias = mean - epsilon_true;
  rec.variance_of_estimator = var;
  if (var <= 0.0 || snr_hat <= 0.0 || n_shots <= 0) {
    rec.precision = std::numeric_limits<double>::infinity();
    rec.valid = false;
    return rec;
  }
  rec.precision = 1.0 / (var * snr_hat * static_cast<double>(n_shots));
  // Delta method on the spread of the variance estimate.
  const double var_of_var = std::max(0.0, (m4 - m2 * m2) / b);
  rec.precision_err = 2.0 * rec.precision * std::sqrt(var_of_var) / m2;
  rec.valid = true;
  return rec;
}

std::vector<SweepPointResult> run_sweep(const std::vector<SweepPoint>& points,
                                        const SweepConfig& config) {
  std::vector<SweepPointResult> results;
  results.reserve(points.size());
  for (const SweepPoint& point : points) {
    SweepPointResult res;
    res.point = point;
    try {
      if (point.n_signal < 100 || point.n_noise < 100)
        throw std::invalid_argument(
            "sweep: n_signal and n_noise must be >= 100");
      SourceParams params;
      params.epsilon = point.epsilon_true;
      params.sigma = config.sigma;
      params.n_bar = point.n_bar;
      params.kind = config.kind;
      params.validate();

      const SyntheticSource signal(params, config.grid,
                                   SyntheticSource::Kind::Signal,
                                   point.n_signal, point.seed);
      const SyntheticSource noise(params, config.grid,
                                  SyntheticSource::Kind::NoiseOnly,
                                  point.n_noise, point.seed);
      EstimationResult est =
          estimate_with_projections(signal, noise, config.search);
      res.report = est.report;

      const BootstrapResult boot =
          bootstrap(est.projections, point.n_signal,
                    config.bootstrap_ensembles, point.seed);
      res.record =
          precision_record(boot, est.report.snr, point.n_signal,
                           point.epsilon_true);

      res.fi_heterodyne = per_photon_fi(config.kind == SourceKind::Thermal
                                            ? Scheme::HeterodyneThermal
                                            : Scheme::HeterodyneCoherent,
                                        point.epsilon_true, point.n_bar);
      res.fi_direct_sensing = fisher_direct_sensing(point.epsilon_true);
      res.ok = true;
    } catch (const std::exception& ex) {
      res.ok = false;
      res.error = ex.what();
    }
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace hetspec
