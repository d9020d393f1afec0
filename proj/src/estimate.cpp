#include "hetspec/estimate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hetspec/model.hpp"

namespace hetspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kChunk = 1024;

int worker_count() {
#ifdef _OPENMP
  return std::max(1, omp_get_max_threads());
#else
  return 1;
#endif
}

void setup_eigen() {
  // All parallelism is owned here; nested Eigen threading would make the
  // accumulation order scheduling-dependent.
  static const bool once = [] {
    Eigen::setNbThreads(1);
    return true;
  }();
  (void)once;
}

}  // namespace

void SearchConfig::validate() const {
  if (!(t_halfwidth > 0.0) || !(omega_halfwidth > 0.0))
    throw std::invalid_argument("search: halfwidths must be > 0");
  if (coarse_points < 2)
    throw std::invalid_argument("search: coarse_points must be >= 2");
  if (!(refine_tol > 0.0))
    throw std::invalid_argument("search: refine_tol must be > 0");
  if (max_iterations < 1)
    throw std::invalid_argument("search: max_iterations must be >= 1");
  if (!std::isfinite(t_center) || !std::isfinite(omega_center))
    throw std::invalid_argument("search: centers must be finite");
}

EnsembleMoments EnsembleMoments::accumulate(const TraceSource& source) {
  setup_eigen();
  const int n = source.grid().n_samples;
  const std::int64_t total = source.count();
  const std::int64_t n_chunks = (total + kChunk - 1) / kChunk;
  const int slots = static_cast<int>(
      std::min<std::int64_t>(worker_count(), n_chunks));

  EnsembleMoments m;
  m.h_ = Eigen::MatrixXcd::Zero(n, n);
  m.s_ = Eigen::VectorXcd::Zero(n);
  m.count_ = total;

  std::vector<Eigen::MatrixXcd> buffer(slots, Eigen::MatrixXcd(n, kChunk));
  std::vector<Eigen::MatrixXcd> partial_h(slots);
  std::vector<Eigen::VectorXcd> partial_s(slots);

  for (std::int64_t wave = 0; wave < n_chunks; wave += slots) {
    const int active = static_cast<int>(std::min<std::int64_t>(slots, n_chunks - wave));
#pragma omp parallel for schedule(static, 1)
    for (int i = 0; i < active; ++i) {
      const std::int64_t first = (wave + i) * kChunk;
      const std::int64_t cols = std::min(kChunk, total - first);
      auto block = buffer[i].leftCols(cols);
      source.fill(first, block);
      partial_h[i] = Eigen::MatrixXcd::Zero(n, n);
      partial_h[i].selfadjointView<Eigen::Lower>().rankUpdate(block);
      partial_s[i] = block.rowwise().sum();
    }
    // Fixed combine order keeps the result independent of scheduling.
    for (int i = 0; i < active; ++i) {
      m.h_ += partial_h[i];
      m.s_ += partial_s[i];
    }
  }
  return m;
}

double EnsembleMoments::variance(const Eigen::VectorXcd& w) const {
  if (count_ < 2) throw std::invalid_argument("variance needs >= 2 traces");
  const Eigen::VectorXcd hw = h_.selfadjointView<Eigen::Lower>() * w;
  const double quad = w.dot(hw).real();
  const std::complex<double> sum_z = s_.dot(w);  // sum over traces of z_n
  const double centered = quad - std::norm(sum_z) / static_cast<double>(count_);
  return std::max(0.0, centered / static_cast<double>(count_ - 1));
}

void displacement_weights(const GridSpec& grid, double sigma, double t_r,
                          double omega_r, Eigen::VectorXcd& w0,
                          Eigen::VectorXcd& w1) {
  const int n = grid.n_samples;
  const double dt = grid.dtau() / sigma;
  w0.resize(n);
  w1.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = grid.tau(i) / sigma;
    const std::complex<double> phase = std::polar(dt, omega_r * t);
    const double g = hg0(t, sigma, t_r);
    w0[i] = g * phase;
    w1[i] = 2.0 * sigma * (t - t_r) * g * phase;
  }
}

std::vector<std::complex<double>> project(const Eigen::MatrixXcd& traces,
                                          const GridSpec& grid, double sigma,
                                          int k, double t_r, double omega_r) {
  if (k != 0 && k != 1)
    throw std::invalid_argument("project: mode index must be 0 or 1");
  setup_eigen();
  Eigen::VectorXcd w0, w1;
  displacement_weights(grid, sigma, t_r, omega_r, w0, w1);
  const Eigen::VectorXcd z = traces.adjoint() * (k == 0 ? w0 : w1);
  return {z.data(), z.data() + z.size()};
}

std::vector<std::complex<double>> project(const TraceBatch& batch, int k,
                                          double t_r, double omega_r) {
  return project(batch.signal, batch.grid, batch.params.sigma, k, t_r, omega_r);
}

std::vector<std::complex<double>> project_noise(const TraceBatch& batch, int k,
                                                double t_r, double omega_r) {
  return project(batch.noise, batch.grid, batch.params.sigma, k, t_r, omega_r);
}

double epsilon_from_ratio(double v_eps) {
  return 4.0 * std::sqrt(std::max(v_eps, 0.0));
}

double complex_variance(const std::vector<std::complex<double>>& z) {
  if (z.size() < 2) throw std::invalid_argument("variance needs >= 2 values");
  std::complex<double> sum{0.0, 0.0};
  double sq = 0.0;
  for (const auto& v : z) {
    sum += v;
    sq += std::norm(v);
  }
  const double n = static_cast<double>(z.size());
  return std::max(0.0, (sq - std::norm(sum) / n) / (n - 1.0));
}

namespace {

struct Objective {
  const EnsembleMoments& signal;
  const EnsembleMoments& noise;
  const GridSpec& grid;
  double sigma;

  // x = sigma * t_r, y = omega_r / sigma.
  DisplacedVariance eval(double x, double y) const {
    DisplacedVariance out;
    out.t_r = x / sigma;
    out.omega_r = y * sigma;
    Eigen::VectorXcd w0, w1;
    displacement_weights(grid, sigma, out.t_r, out.omega_r, w0, w1);
    out.v0 = signal.variance(w0);
    out.v1 = signal.variance(w1);
    out.v0_noise = noise.variance(w0);
    out.v1_noise = noise.variance(w1);
    const double den = out.v0 - out.v0_noise;
    if (den <= 0.0) {
      out.degenerate = true;
      return out;
    }
    out.ratio = (out.v1 - out.v1_noise) / den;
    return out;
  }

  double cost(double x, double y, double x_lo, double x_hi, double y_lo,
              double y_hi) const {
    if (x < x_lo || x > x_hi || y < y_lo || y > y_hi) return kInf;
    const DisplacedVariance v = eval(x, y);
    return v.degenerate ? kInf : v.ratio;
  }
};

struct MinimizeInternal {
  double x = 0.0, y = 0.0;
  int iterations = 0;
  bool all_degenerate = false;
};

MinimizeInternal minimize_scaled(const Objective& obj, const SearchConfig& search) {
  const double x_c = obj.sigma * search.t_center;
  const double y_c = search.omega_center / obj.sigma;
  const double x_lo = x_c - search.t_halfwidth, x_hi = x_c + search.t_halfwidth;
  const double y_lo = y_c - search.omega_halfwidth,
               y_hi = y_c + search.omega_halfwidth;
  const int np = search.coarse_points;

  // Coarse scan. Cells are independent; first strict minimum wins.
  std::vector<double> cost(static_cast<std::size_t>(np) * np);
#pragma omp parallel for schedule(static)
  for (int idx = 0; idx < np * np; ++idx) {
    const int ix = idx / np, iy = idx % np;
    const double x = x_lo + (x_hi - x_lo) * ix / (np - 1);
    const double y = y_lo + (y_hi - y_lo) * iy / (np - 1);
    cost[idx] = obj.cost(x, y, x_lo, x_hi, y_lo, y_hi);
  }
  int best = -1;
  double best_cost = kInf;
  for (int idx = 0; idx < np * np; ++idx) {
    if (cost[idx] < best_cost) {
      best_cost = cost[idx];
      best = idx;
    }
  }
  MinimizeInternal out;
  if (best < 0) {
    out.all_degenerate = true;
    out.x = x_c;
    out.y = y_c;
    return out;
  }

  const double cell_x = (x_hi - x_lo) / (np - 1);
  const double cell_y = (y_hi - y_lo) / (np - 1);
  using Vec2 = std::array<double, 2>;
  std::array<Vec2, 3> v;
  std::array<double, 3> f;
  v[0] = {x_lo + cell_x * (best / np), y_lo + cell_y * (best % np)};
  v[1] = {v[0][0] + cell_x, v[0][1]};
  v[2] = {v[0][0], v[0][1] + cell_y};
  auto fn = [&](const Vec2& p) {
    return obj.cost(p[0], p[1], x_lo, x_hi, y_lo, y_hi);
  };
  f = {best_cost, fn(v[1]), fn(v[2])};

  // Nelder-Mead with standard coefficients.
  auto order = [&] {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2 - i; ++j)
        if (f[j + 1] < f[j]) {
          std::swap(f[j], f[j + 1]);
          std::swap(v[j], v[j + 1]);
        }
  };
  auto diameter = [&] {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        d = std::max(d, std::hypot(v[i][0] - v[j][0], v[i][1] - v[j][1]));
    return d;
  };

  int it = 0;
  for (; it < search.max_iterations; ++it) {
    order();
    if (diameter() < search.refine_tol) break;
    const Vec2 c = {0.5 * (v[0][0] + v[1][0]), 0.5 * (v[0][1] + v[1][1])};
    const Vec2 xr = {c[0] + (c[0] - v[2][0]), c[1] + (c[1] - v[2][1])};
    const double fr = fn(xr);
    if (fr < f[0]) {
      const Vec2 xe = {c[0] + 2.0 * (c[0] - v[2][0]), c[1] + 2.0 * (c[1] - v[2][1])};
      const double fe = fn(xe);
      if (fe < fr) {
        v[2] = xe;
        f[2] = fe;
      } else {
        v[2] = xr;
        f[2] = fr;
      }
    } else if (fr < f[1]) {
      v[2] = xr;
      f[2] = fr;
    } else {
      const Vec2 inward = fr < f[2] ? xr : v[2];
      const double f_in = fr < f[2] ? fr : f[2];
      const Vec2 xc = {c[0] + 0.5 * (inward[0] - c[0]), c[1] + 0.5 * (inward[1] - c[1])};
      const double fc = fn(xc);
      if (fc < f_in) {
        v[2] = xc;
        f[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          v[i] = {v[0][0] + 0.5 * (v[i][0] - v[0][0]),
                  v[0][1] + 0.5 * (v[i][1] - v[0][1])};
          f[i] = fn(v[i]);
        }
      }
    }
  }
  order();
  if (diameter() >= search.refine_tol)
    throw std::runtime_error(
        "minimize_displacement: refinement exceeded iteration cap");
  out.x = v[0][0];
  out.y = v[0][1];
  out.iterations = it;
  return out;
}

MinimizeResult minimize_impl(const TraceSource& signal, const TraceSource& noise,
                             const SearchConfig& search) {
  search.validate();
  if (signal.count() < 2 || noise.count() < 2)
    throw std::invalid_argument("estimate: need >= 2 signal and noise traces");
  const EnsembleMoments sig_m = EnsembleMoments::accumulate(signal);
  const EnsembleMoments noi_m = EnsembleMoments::accumulate(noise);
  const Objective obj{sig_m, noi_m, signal.grid(), signal.sigma()};
  const MinimizeInternal in = minimize_scaled(obj, search);
  MinimizeResult out;
  out.iterations = in.iterations;
  out.all_degenerate = in.all_degenerate;
  out.at_min = obj.eval(in.x, in.y);
  return out;
}

EstimateReport report_from(const MinimizeResult& min) {
  const DisplacedVariance& v = min.at_min;
  EstimateReport r;
  r.t_r_hat = v.t_r;
  r.omega_r_hat = v.omega_r;
  r.v0 = v.v0;
  r.v1 = v.v1;
  r.v0_noise = v.v0_noise;
  r.v1_noise = v.v1_noise;
  if (v.degenerate) {
    r.valid = false;
    r.epsilon_hat = 0.0;
    r.v_eps = 0.0;
    r.snr = v.v0_noise > 0.0 ? (v.v0 - v.v0_noise) / v.v0_noise : 0.0;
    return r;
  }
  r.valid = true;
  r.v_eps = v.ratio;
  r.epsilon_hat = epsilon_from_ratio(v.ratio);
  r.snr = v.v0_noise > 0.0 ? (v.v0 - v.v0_noise) / v.v0_noise : kInf;
  return r;
}

}  // namespace

DisplacedVariance normalized_variance(const TraceBatch& batch, double t_r,
                                      double omega_r) {
  DisplacedVariance out;
  out.t_r = t_r;
  out.omega_r = omega_r;
  out.v0 = complex_variance(project(batch, 0, t_r, omega_r));
  out.v1 = complex_variance(project(batch, 1, t_r, omega_r));
  out.v0_noise = complex_variance(project_noise(batch, 0, t_r, omega_r));
  out.v1_noise = complex_variance(project_noise(batch, 1, t_r, omega_r));
  const double den = out.v0 - out.v0_noise;
  if (den <= 0.0) {
    out.degenerate = true;
    return out;
  }
  out.ratio = (out.v1 - out.v1_noise) / den;
  return out;
}

MinimizeResult minimize_displacement(const TraceBatch& batch,
                                     const SearchConfig& search) {
  const MatrixSource signal(batch.signal, batch.grid, batch.params.sigma);
  const MatrixSource noise(batch.noise, batch.grid, batch.params.sigma);
  return minimize_impl(signal, noise, search);
}

EstimateReport estimate(const TraceBatch& batch, const SearchConfig& search) {
  return report_from(minimize_displacement(batch, search));
}

EstimationResult estimate_with_projections(const TraceSource& signal,
                                           const TraceSource& noise,
                                           const SearchConfig& search) {
  const MinimizeResult min = minimize_impl(signal, noise, search);
  EstimationResult out;
  out.report = report_from(min);
  out.iterations = min.iterations;

  ProjectionSet& p = out.projections;
  p.t_r = min.at_min.t_r;
  p.omega_r = min.at_min.omega_r;
  Eigen::VectorXcd w0, w1;
  displacement_weights(signal.grid(), signal.sigma(), p.t_r, p.omega_r, w0, w1);

  auto project_stream = [&](const TraceSource& src,
                            std::vector<std::complex<double>>& z0,
                            std::vector<std::complex<double>>& z1) {
    const std::int64_t total = src.count();
    z0.resize(total);
    z1.resize(total);
    const std::int64_t n_chunks = (total + kChunk - 1) / kChunk;
#pragma omp parallel
    {
      Eigen::MatrixXcd buffer(src.grid().n_samples, kChunk);
#pragma omp for schedule(static)
      for (std::int64_t c = 0; c < n_chunks; ++c) {
        const std::int64_t first = c * kChunk;
        const std::int64_t cols = std::min(kChunk, total - first);
        auto block = buffer.leftCols(cols);
        src.fill(first, block);
        const Eigen::VectorXcd p0 = block.adjoint() * w0;
        const Eigen::VectorXcd p1 = block.adjoint() * w1;
        for (std::int64_t i = 0; i < cols; ++i) {
          z0[first + i] = p0[i];
          z1[first + i] = p1[i];
        }
      }
    }
  };
  project_stream(signal, p.z0, p.z1);
  project_stream(noise, p.z0_noise, p.z1_noise);
  return out;
}

}  // namespace hetspec
