#include "hetspec/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace hetspec {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::HeterodyneThermal: return "heterodyne_thermal";
    case Scheme::HeterodyneCoherent: return "heterodyne_coherent";
    case Scheme::DirectSensing: return "direct_sensing";
  }
  throw std::logic_error("scheme_name: unknown scheme");
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "heterodyne_thermal") return Scheme::HeterodyneThermal;
  if (name == "heterodyne_coherent") return Scheme::HeterodyneCoherent;
  if (name == "direct_sensing") return Scheme::DirectSensing;
  throw std::invalid_argument("unknown scheme: " + name);
}

namespace {

nlohmann::json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << "\r\n";
  }
  ~CsvFile() = default;

 private:
  std::ofstream out_;
};

}  // namespace

nlohmann::json report_to_json(const EstimateReport& report) {
  return {{"epsilon_hat", report.epsilon_hat},
          {"t_r_hat", report.t_r_hat},
          {"omega_r_hat", report.omega_r_hat},
          {"v_eps", report.v_eps},
          {"snr", number_or_null(report.snr)},
          {"v0", report.v0},
          {"v1", report.v1},
          {"v0_noise", report.v0_noise},
          {"v1_noise", report.v1_noise},
          {"valid", report.valid}};
}

void write_fisher_csv(const std::filesystem::path& path,
                      const std::vector<FisherCurve>& curves) {
  CsvFile csv(path);
  csv.row({"epsilon", "value", "scheme", "n_bar"});
  for (const auto& curve : curves) {
    if (curve.epsilons.size() != curve.values.size())
      throw std::invalid_argument("fisher csv: curve arrays inconsistent");
    for (std::size_t i = 0; i < curve.epsilons.size(); ++i)
      csv.row({format_double(curve.epsilons[i]), format_double(curve.values[i]),
               scheme_name(curve.scheme), format_double(curve.n_bar)});
  }
}

namespace {

std::vector<std::vector<SweepPointResult>> sorted_panels(
    std::vector<std::vector<SweepPointResult>> panels) {
  std::sort(panels.begin(), panels.end(),
            [](const auto& a, const auto& b) {
              const double sa = a.empty() ? 0.0 : a.front().point.n_bar;
              const double sb = b.empty() ? 0.0 : b.front().point.n_bar;
              return sa < sb;
            });
  return panels;
}

}  // namespace

void write_records_csv(const std::filesystem::path& path,
                       const std::vector<std::vector<SweepPointResult>>& panels) {
  CsvFile csv(path);
  csv.row({"panel_snr", "epsilon_true", "epsilon_hat_mean", "bias",
           "variance_of_estimator", "precision", "precision_err", "snr_hat",
           "bootstrap_count", "degenerate_resamples", "n_signal", "n_noise",
           "seed", "fi_het", "fi_ds", "status"});
  for (const auto& panel : sorted_panels(panels)) {
    for (const auto& r : panel) {
      csv.row({format_double(r.point.n_bar),
               format_double(r.point.epsilon_true),
               format_double(r.record.epsilon_hat_mean),
               format_double(r.record.bias),
               format_double(r.record.variance_of_estimator),
               format_double(r.record.precision),
               format_double(r.record.precision_err),
               format_double(r.record.snr_hat),
               std::to_string(r.record.bootstrap_count),
               std::to_string(r.record.degenerate_resamples),
               std::to_string(r.point.n_signal),
               std::to_string(r.point.n_noise),
               std::to_string(r.point.seed),
               format_double(r.fi_heterodyne),
               format_double(r.fi_direct_sensing),
               r.ok ? "ok" : "error:" + r.error});
    }
  }
}

void write_plot_csv(const std::filesystem::path& path,
                    const std::vector<std::vector<SweepPointResult>>& panels) {
  const auto sorted = sorted_panels(panels);
  if (!sorted.empty()) {
    const auto& ref = sorted.front();
    for (const auto& panel : sorted) {
      if (panel.size() != ref.size())
        throw std::invalid_argument("plot data: panels have mismatched grids");
      for (std::size_t i = 0; i < panel.size(); ++i)
        if (panel[i].point.epsilon_true != ref[i].point.epsilon_true)
          throw std::invalid_argument("plot data: panels have mismatched grids");
    }
  }
  CsvFile csv(path);
  csv.row({"panel", "epsilon", "precision", "precision_err", "bias", "fi_het",
           "fi_ds"});
  for (const auto& panel : sorted) {
    for (const auto& r : panel) {
      csv.row({format_double(r.point.n_bar),
               format_double(r.point.epsilon_true),
               format_double(r.record.precision),
               format_double(r.record.precision_err),
               format_double(r.record.bias),
               format_double(r.fi_heterodyne),
               format_double(r.fi_direct_sensing)});
    }
  }
}

}  // namespace hetspec
