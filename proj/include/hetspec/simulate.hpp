#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>

#include "hetspec/model.hpp"
#include "hetspec/rng.hpp"

namespace hetspec {

// Uniform acquisition window in units of 1/sigma. Physical sample times are
// tau(i) / sigma; the centroid t_c belongs to the source, not the grid.
struct GridSpec {
  int n_samples = 1024;
  double t_min = -6.0;
  double t_max = 6.0;

  double dtau() const { return (t_max - t_min) / (n_samples - 1); }
  double tau(int i) const { return t_min + i * dtau(); }

  void validate() const;
  // True when the window spans sigma*t_c +- 5, keeping truncated mode mass
  // below 1e-10.
  bool covers(double sigma_t_c) const;
};

// Digitized heterodyne records: each column is one complex trace Z(t_i).
// Regeneration from (params, grid, seed, counts) is bit-identical.
struct TraceBatch {
  SourceParams params;
  GridSpec grid;
  std::uint64_t seed = 0;
  bool shot_noise = true;
  Eigen::MatrixXcd signal;  // n_samples x n_signal
  Eigen::MatrixXcd noise;   // n_samples x n_noise

  std::int64_t n_signal() const { return signal.cols(); }
  std::int64_t n_noise() const { return noise.cols(); }
};

struct SynthesisOptions {
  bool shot_noise = true;
};

// One shot of the two-line source; consumes four normals (thermal) or one
// uniform (phase-averaged coherent) from the stream.
SourceRealization draw_realization(const SourceParams& params, RngStream& rng);

// Column supplier for streaming consumers; implementations must be pure in
// (index) so any chunking of [0, count) yields identical traces.
class TraceSource {
 public:
  virtual ~TraceSource() = default;
  virtual const GridSpec& grid() const = 0;
  virtual double sigma() const = 0;
  virtual std::int64_t count() const = 0;
  // Fill out with columns [first, first + out.cols()).
  virtual void fill(std::int64_t first, Eigen::Ref<Eigen::MatrixXcd> out) const = 0;
};

// Generates traces on demand: scaled source envelope plus per-sample circular
// shot noise of complex variance 1/dt, so the projection onto any unit-norm
// mode carries unit noise variance and the fundamental-mode SNR equals n_bar.
class SyntheticSource final : public TraceSource {
 public:
  enum class Kind { Signal, NoiseOnly };

  SyntheticSource(const SourceParams& params, const GridSpec& grid, Kind kind,
                  std::int64_t count, std::uint64_t seed,
                  SynthesisOptions options = {});

  const GridSpec& grid() const override { return grid_; }
  double sigma() const override { return params_.sigma; }
  std::int64_t count() const override { return count_; }
  void fill(std::int64_t first, Eigen::Ref<Eigen::MatrixXcd> out) const override;

 private:
  SourceParams params_;
  GridSpec grid_;
  Kind kind_;
  std::int64_t count_;
  std::uint64_t seed_;
  SynthesisOptions options_;
  double noise_variance_ = 0.0;        // complex variance per sample
  Eigen::VectorXcd base1_, base2_;     // envelopes of the two unit-amplitude lines
};

// Non-owning view over a trace matrix.
class MatrixSource final : public TraceSource {
 public:
  MatrixSource(const Eigen::MatrixXcd& traces, const GridSpec& grid, double sigma)
      : traces_(traces), grid_(grid), sigma_(sigma) {}

  const GridSpec& grid() const override { return grid_; }
  double sigma() const override { return sigma_; }
  std::int64_t count() const override { return traces_.cols(); }
  void fill(std::int64_t first, Eigen::Ref<Eigen::MatrixXcd> out) const override {
    out = traces_.middleCols(first, out.cols());
  }

 private:
  const Eigen::MatrixXcd& traces_;
  GridSpec grid_;
  double sigma_;
};

TraceBatch synthesize_batch(const SourceParams& params, const GridSpec& grid,
                            std::int64_t n_signal, std::int64_t n_noise,
                            std::uint64_t seed, SynthesisOptions options = {});

// Binary trace container: magic "HETTRC01", uint64 LE header length, header
// JSON, then complex64 samples (float32 re, float32 im, little endian),
// signal traces first. Storage is single precision; loading widens to double.
void save_traces(const std::filesystem::path& path, const TraceBatch& batch);
TraceBatch load_traces(const std::filesystem::path& path);

std::string to_string(SourceKind kind);
SourceKind source_kind_from_string(const std::string& name);

}  // namespace hetspec
