#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetspec/estimate.hpp"
#include "hetspec/fisher.hpp"
#include "hetspec/model.hpp"
#include "hetspec/simulate.hpp"

namespace hetspec {

enum class RunMode { Simulate, Estimate, Crb, Sweep };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

struct SimulateSection {
  std::int64_t n_signal = 1000;
  std::int64_t n_noise = 1000;
  bool shot_noise = true;
  std::string out_traces = "traces.htr";
};

struct EstimateSection {
  std::string in_traces;
};

struct CrbSection {
  std::vector<Scheme> schemes;
  std::vector<double> epsilons;
  double n_bar = 1.0;
};

struct SweepSection {
  std::vector<double> epsilons;
  std::vector<double> snr_values;
  std::int64_t n_signal = 100000;
  std::int64_t n_noise = 100000;
  int bootstrap_ensembles = 1000;
};

// Validated run description. Parsing rejects unknown keys and reports
// violated invariants with their field path.
struct RunConfig {
  RunMode mode = RunMode::Sweep;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  SourceParams source;
  GridSpec grid;
  SearchConfig search;
  SimulateSection simulate;
  EstimateSection estimate;
  CrbSection crb;
  SweepSection sweep;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

RunConfig load_config(const std::filesystem::path& path);

// Apply a dotted-path override such as "sweep.n_signal=5000". The value is
// parsed as JSON when possible, otherwise taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

}  // namespace hetspec
