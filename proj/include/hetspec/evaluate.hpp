#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetspec/estimate.hpp"
#include "hetspec/fisher.hpp"
#include "hetspec/simulate.hpp"

namespace hetspec {

// One experiment design point of a sweep.
struct SweepPoint {
  double epsilon_true = 0.0;
  double n_bar = 0.0;          // nominal SNR of the panel
  std::int64_t n_signal = 0;   // shots
  std::int64_t n_noise = 0;    // noise-only shots
  std::uint64_t seed = 0;
};

struct BootstrapResult {
  std::vector<double> epsilon_hats;
  int degenerate_count = 0;  // resamples that lost the signal (recorded as 0)
};

// Estimator statistics of one sweep point. precision = 1/(Var * S * N) is
// directly comparable to the per-photon Fisher information; precision_err is
// two standard deviations of that figure, propagated from the spread of the
// bootstrap variance estimate.
struct PrecisionRecord {
  double epsilon_true = 0.0;
  double epsilon_hat_mean = 0.0;
  double bias = 0.0;
  double variance_of_estimator = 0.0;
  double precision = 0.0;
  double precision_err = 0.0;
  double snr_hat = 0.0;
  int bootstrap_count = 0;
  int degenerate_resamples = 0;
  bool valid = false;
};

// Resample the projection pairs with replacement and re-run the fixed-
// displacement estimator on each ensemble. The displacement is not
// re-optimized per resample. Projections are brought to a canonical order
// first, so the result is invariant under permutation of the input arrays.
BootstrapResult bootstrap(const ProjectionSet& projections,
                          std::int64_t ensemble_size, int ensemble_count,
                          std::uint64_t seed);

PrecisionRecord precision_record(const BootstrapResult& boot, double snr_hat,
                                 std::int64_t n_shots, double epsilon_true);

struct SweepConfig {
  SourceKind kind = SourceKind::Thermal;
  double sigma = 1.0;
  GridSpec grid;
  SearchConfig search;
  int bootstrap_ensembles = 1000;
};

struct SweepPointResult {
  SweepPoint point;
  PrecisionRecord record;
  EstimateReport report;
  double fi_heterodyne = 0.0;      // per-photon FI at the nominal n_bar
  double fi_direct_sensing = 0.0;
  bool ok = false;
  std::string error;
};

// Full pipeline per point: synthesize (streamed), estimate, bootstrap,
// record, paired with the benchmark curves. Per-point failures are recorded
// and the sweep continues.
std::vector<SweepPointResult> run_sweep(const std::vector<SweepPoint>& points,
                                        const SweepConfig& config);

}  // namespace hetspec
