#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetspec/estimate.hpp"
#include "hetspec/evaluate.hpp"
#include "hetspec/fisher.hpp"

namespace hetspec {

// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format_double(double value);

std::string scheme_name(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

// Flat JSON form of an estimate report. Non-finite values (e.g. the SNR of a
// noiseless batch) map to null.
nlohmann::json report_to_json(const EstimateReport& report);

// CSV artifacts (RFC 4180, CRLF line endings).
void write_fisher_csv(const std::filesystem::path& path,
                      const std::vector<FisherCurve>& curves);
void write_records_csv(const std::filesystem::path& path,
                       const std::vector<std::vector<SweepPointResult>>& panels);

// Tidy per-panel plot data: panel, epsilon, precision, precision_err, bias,
// fi_het, fi_ds. Panels are emitted in ascending SNR order and must share
// one epsilon grid.
void write_plot_csv(const std::filesystem::path& path,
                    const std::vector<std::vector<SweepPointResult>>& panels);

}  // namespace hetspec
