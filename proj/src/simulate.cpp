#include "hetspec/simulate.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace hetspec {

void GridSpec::validate() const {
  if (n_samples < 2) throw std::invalid_argument("grid: n_samples must be >= 2");
  if (!(t_max > t_min)) throw std::invalid_argument("grid: t_max must exceed t_min");
  if (!std::isfinite(t_min) || !std::isfinite(t_max))
    throw std::invalid_argument("grid: window must be finite");
}

bool GridSpec::covers(double sigma_t_c) const {
  return t_min <= sigma_t_c - 5.0 && t_max >= sigma_t_c + 5.0;
}

SourceRealization draw_realization(const SourceParams& params, RngStream& rng) {
  SourceRealization r;
  if (params.kind == SourceKind::Thermal) {
    // Two independent CN(0, 1/2) lines (A0 = 1).
    const auto [x1, y1] = rng.next_normal_pair();
    const auto [x2, y2] = rng.next_normal_pair();
    r.a1 = {0.5 * x1, 0.5 * y1};
    r.a2 = {0.5 * x2, 0.5 * y2};
  } else {
    // Fixed split amplitude, relative phase 2*phi0 uniform over the period.
    const double phi0 = 2.0 * std::numbers::pi * rng.next_uniform();
    const double a = 1.0 / std::sqrt(2.0);
    r.a1 = std::polar(a, phi0);
    r.a2 = std::polar(a, -phi0);
  }
  return r;
}

SyntheticSource::SyntheticSource(const SourceParams& params, const GridSpec& grid,
                                 Kind kind, std::int64_t count,
                                 std::uint64_t seed, SynthesisOptions options)
    : params_(params),
      grid_(grid),
      kind_(kind),
      count_(count),
      seed_(seed),
      options_(options) {
  params_.validate();
  grid_.validate();
  if (!grid_.covers(params_.sigma * params_.t_c))
    throw std::invalid_argument(
        "grid: window must span sigma*t_c +- 5 (mode truncation)");
  if (count_ < 1) throw std::invalid_argument("trace count must be >= 1");

  const double dt = grid_.dtau() / params_.sigma;
  noise_variance_ = 1.0 / dt;

  if (kind_ == Kind::Signal) {
    base1_.resize(grid_.n_samples);
    base2_.resize(grid_.n_samples);
    const SourceRealization line1{{1.0, 0.0}, {0.0, 0.0}};
    const SourceRealization line2{{0.0, 0.0}, {1.0, 0.0}};
    for (int i = 0; i < grid_.n_samples; ++i) {
      const double t = grid_.tau(i) / params_.sigma;
      base1_[i] = envelope(params_, line1, t);
      base2_[i] = envelope(params_, line2, t);
    }
  }
}

void SyntheticSource::fill(std::int64_t first,
                           Eigen::Ref<Eigen::MatrixXcd> out) const {
  const double scale = std::sqrt(params_.n_bar);
  const std::uint64_t domain = kind_ == Kind::Signal ? streams::signal_trace
                                                     : streams::noise_trace;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const std::int64_t index = first + j;
    RngStream rng(stream_key(seed_, domain, static_cast<std::uint64_t>(index)));
    auto col = out.col(j);
    if (kind_ == Kind::Signal) {
      const SourceRealization r = draw_realization(params_, rng);
      col = scale * (r.a1 * base1_ + r.a2 * base2_);
    } else {
      col.setZero();
    }
    if (options_.shot_noise) {
      for (int i = 0; i < grid_.n_samples; ++i)
        col[i] += rng.next_complex_normal(noise_variance_);
    }
  }
}

TraceBatch synthesize_batch(const SourceParams& params, const GridSpec& grid,
                            std::int64_t n_signal, std::int64_t n_noise,
                            std::uint64_t seed, SynthesisOptions options) {
  if (n_signal < 1 || n_noise < 1)
    throw std::invalid_argument("synthesize_batch: counts must be >= 1");
  SyntheticSource signal(params, grid, SyntheticSource::Kind::Signal, n_signal,
                         seed, options);
  SyntheticSource noise(params, grid, SyntheticSource::Kind::NoiseOnly, n_noise,
                        seed, options);

  TraceBatch batch;
  batch.params = params;
  batch.grid = grid;
  batch.seed = seed;
  batch.shot_noise = options.shot_noise;
  batch.signal.resize(grid.n_samples, n_signal);
  batch.noise.resize(grid.n_samples, n_noise);

  constexpr std::int64_t kChunk = 1024;
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < (n_signal + kChunk - 1) / kChunk; ++c) {
    const std::int64_t first = c * kChunk;
    const std::int64_t cols = std::min(kChunk, n_signal - first);
    signal.fill(first, batch.signal.middleCols(first, cols));
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < (n_noise + kChunk - 1) / kChunk; ++c) {
    const std::int64_t first = c * kChunk;
    const std::int64_t cols = std::min(kChunk, n_noise - first);
    noise.fill(first, batch.noise.middleCols(first, cols));
  }
  return batch;
}

std::string to_string(SourceKind kind) {
  return kind == SourceKind::Thermal ? "thermal" : "phase_averaged_coherent";
}

SourceKind source_kind_from_string(const std::string& name) {
  if (name == "thermal") return SourceKind::Thermal;
  if (name == "phase_averaged_coherent") return SourceKind::PhaseAveragedCoherent;
  throw std::invalid_argument("unknown source kind: " + name);
}

namespace {

constexpr char kMagic[8] = {'H', 'E', 'T', 'T', 'R', 'C', '0', '1'};

void write_complex64(std::ofstream& out, const Eigen::MatrixXcd& m) {
  std::vector<float> buffer(2 * static_cast<std::size_t>(m.rows()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      buffer[2 * i] = static_cast<float>(m(i, j).real());
      buffer[2 * i + 1] = static_cast<float>(m(i, j).imag());
    }
    out.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size() * sizeof(float)));
  }
}

void read_complex64(std::ifstream& in, Eigen::MatrixXcd& m) {
  std::vector<float> buffer(2 * static_cast<std::size_t>(m.rows()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    in.read(reinterpret_cast<char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size() * sizeof(float)));
    if (!in) throw std::runtime_error("trace container: truncated payload");
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      m(i, j) = {static_cast<double>(buffer[2 * i]),
                 static_cast<double>(buffer[2 * i + 1])};
  }
}

}  // namespace

void save_traces(const std::filesystem::path& path, const TraceBatch& batch) {
  nlohmann::json header;
  header["version"] = 1;
  header["n_signal"] = batch.n_signal();
  header["n_noise"] = batch.n_noise();
  header["seed"] = batch.seed;
  header["shot_noise"] = batch.shot_noise;
  header["grid"] = {{"n_samples", batch.grid.n_samples},
                    {"t_min", batch.grid.t_min},
                    {"t_max", batch.grid.t_max}};
  header["params"] = {{"epsilon", batch.params.epsilon},
                      {"sigma", batch.params.sigma},
                      {"t_c", batch.params.t_c},
                      {"omega_c", batch.params.omega_c},
                      {"n_bar", batch.params.n_bar},
                      {"kind", to_string(batch.params.kind)}};
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t length = text.size();
  out.write(reinterpret_cast<const char*>(&length), sizeof(length));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_complex64(out, batch.signal);
  write_complex64(out, batch.noise);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

TraceBatch load_traces(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("trace container: bad magic");
  std::uint64_t length = 0;
  in.read(reinterpret_cast<char*>(&length), sizeof(length));
  if (!in || length > (1u << 20))
    throw std::runtime_error("trace container: bad header length");
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  if (!in) throw std::runtime_error("trace container: truncated header");

  const nlohmann::json header = nlohmann::json::parse(text);
  TraceBatch batch;
  batch.seed = header.at("seed").get<std::uint64_t>();
  batch.shot_noise = header.at("shot_noise").get<bool>();
  const auto& g = header.at("grid");
  batch.grid.n_samples = g.at("n_samples").get<int>();
  batch.grid.t_min = g.at("t_min").get<double>();
  batch.grid.t_max = g.at("t_max").get<double>();
  batch.grid.validate();
  const auto& p = header.at("params");
  batch.params.epsilon = p.at("epsilon").get<double>();
  batch.params.sigma = p.at("sigma").get<double>();
  batch.params.t_c = p.at("t_c").get<double>();
  batch.params.omega_c = p.at("omega_c").get<double>();
  batch.params.n_bar = p.at("n_bar").get<double>();
  batch.params.kind = source_kind_from_string(p.at("kind").get<std::string>());
  batch.params.validate();

  const auto n_signal = header.at("n_signal").get<std::int64_t>();
  const auto n_noise = header.at("n_noise").get<std::int64_t>();
  if (n_signal < 1 || n_noise < 1)
    throw std::runtime_error("trace container: bad counts");
  batch.signal.resize(batch.grid.n_samples, n_signal);
  batch.noise.resize(batch.grid.n_samples, n_noise);
  read_complex64(in, batch.signal);
  read_complex64(in, batch.noise);
  return batch;
}

}  // namespace hetspec
