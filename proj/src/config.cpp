#include "hetspec/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "hetspec/io.hpp"

namespace hetspec {

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Simulate: return "simulate";
    case RunMode::Estimate: return "estimate";
    case RunMode::Crb: return "crb";
    case RunMode::Sweep: return "sweep";
  }
  throw std::logic_error("to_string: unknown mode");
}

RunMode run_mode_from_string(const std::string& name) {
  if (name == "simulate") return RunMode::Simulate;
  if (name == "estimate") return RunMode::Estimate;
  if (name == "crb") return RunMode::Crb;
  if (name == "sweep") return RunMode::Sweep;
  throw std::invalid_argument("mode: must be simulate|estimate|crb|sweep");
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

void require_object(const json& j, const std::set<std::string>& allowed,
                    const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

template <class T>
T get_or(const json& j, const char* key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "." + key, "has the wrong type");
  }
}

// Either an explicit list or {"start", "stop", "count"}.
std::vector<double> parse_grid_values(const json& j, const std::string& path) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& v : j) {
      if (!v.is_number()) fail(path, "entries must be numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  if (j.is_object()) {
    require_object(j, {"start", "stop", "count"}, path);
    if (!j.contains("start") || !j.contains("stop") || !j.contains("count"))
      fail(path, "needs start, stop and count");
    const double start = j.at("start").get<double>();
    const double stop = j.at("stop").get<double>();
    const int count = j.at("count").get<int>();
    if (count < 1) fail(path + ".count", "must be >= 1");
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i)
      out[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
    return out;
  }
  fail(path, "must be a list or a start/stop/count object");
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  require_object(j, {"mode", "seed", "output_dir", "source", "grid", "search",
                     "simulate", "estimate", "crb", "sweep"},
                 "config");
  RunConfig c;
  if (j.contains("mode"))
    c.mode = run_mode_from_string(j.at("mode").get<std::string>());
  c.seed = get_or<std::uint64_t>(j, "seed", "config", c.seed);
  c.output_dir = get_or<std::string>(j, "output_dir", "config", c.output_dir);

  if (j.contains("source")) {
    const json& s = j.at("source");
    require_object(s, {"kind", "epsilon", "sigma", "t_c", "omega_c", "n_bar"},
                   "source");
    if (s.contains("kind"))
      c.source.kind = source_kind_from_string(s.at("kind").get<std::string>());
    c.source.epsilon = get_or(s, "epsilon", "source", c.source.epsilon);
    c.source.sigma = get_or(s, "sigma", "source", c.source.sigma);
    c.source.t_c = get_or(s, "t_c", "source", c.source.t_c);
    c.source.omega_c = get_or(s, "omega_c", "source", c.source.omega_c);
    c.source.n_bar = get_or(s, "n_bar", "source", c.source.n_bar);
    try {
      c.source.validate();
    } catch (const std::exception& ex) {
      fail("source", ex.what());
    }
  }

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    require_object(g, {"n_samples", "t_min", "t_max"}, "grid");
    c.grid.n_samples = get_or(g, "n_samples", "grid", c.grid.n_samples);
    c.grid.t_min = get_or(g, "t_min", "grid", c.grid.t_min);
    c.grid.t_max = get_or(g, "t_max", "grid", c.grid.t_max);
    try {
      c.grid.validate();
    } catch (const std::exception& ex) {
      fail("grid", ex.what());
    }
  }

  if (j.contains("search")) {
    const json& s = j.at("search");
    require_object(s,
                   {"t_center", "omega_center", "t_halfwidth",
                    "omega_halfwidth", "coarse_points", "refine_tol",
                    "max_iterations"},
                   "search");
    c.search.t_center = get_or(s, "t_center", "search", c.search.t_center);
    c.search.omega_center = get_or(s, "omega_center", "search", c.search.omega_center);
    c.search.t_halfwidth = get_or(s, "t_halfwidth", "search", c.search.t_halfwidth);
    c.search.omega_halfwidth =
        get_or(s, "omega_halfwidth", "search", c.search.omega_halfwidth);
    c.search.coarse_points = get_or(s, "coarse_points", "search", c.search.coarse_points);
    c.search.refine_tol = get_or(s, "refine_tol", "search", c.search.refine_tol);
    c.search.max_iterations =
        get_or(s, "max_iterations", "search", c.search.max_iterations);
    try {
      c.search.validate();
    } catch (const std::exception& ex) {
      fail("search", ex.what());
    }
  }

  if (j.contains("simulate")) {
    const json& s = j.at("simulate");
    require_object(s, {"n_signal", "n_noise", "shot_noise", "out_traces"},
                   "simulate");
    c.simulate.n_signal = get_or(s, "n_signal", "simulate", c.simulate.n_signal);
    c.simulate.n_noise = get_or(s, "n_noise", "simulate", c.simulate.n_noise);
    c.simulate.shot_noise = get_or(s, "shot_noise", "simulate", c.simulate.shot_noise);
    c.simulate.out_traces = get_or(s, "out_traces", "simulate", c.simulate.out_traces);
    if (c.simulate.n_signal < 1 || c.simulate.n_noise < 1)
      fail("simulate", "trace counts must be >= 1");
  }

  if (j.contains("estimate")) {
    const json& s = j.at("estimate");
    require_object(s, {"in_traces"}, "estimate");
    c.estimate.in_traces = get_or(s, "in_traces", "estimate", c.estimate.in_traces);
  }

  if (j.contains("crb")) {
    const json& s = j.at("crb");
    require_object(s, {"schemes", "epsilons", "n_bar"}, "crb");
    if (s.contains("schemes")) {
      if (!s.at("schemes").is_array()) fail("crb.schemes", "must be a list");
      for (const auto& name : s.at("schemes"))
        c.crb.schemes.push_back(scheme_from_string(name.get<std::string>()));
    }
    if (s.contains("epsilons"))
      c.crb.epsilons = parse_grid_values(s.at("epsilons"), "crb.epsilons");
    c.crb.n_bar = get_or(s, "n_bar", "crb", c.crb.n_bar);
    if (!(c.crb.n_bar >= 0.0)) fail("crb.n_bar", "must be >= 0");
    for (double e : c.crb.epsilons)
      if (!(e >= 0.0)) fail("crb.epsilons", "entries must be >= 0");
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    require_object(s,
                   {"epsilons", "snr_values", "n_signal", "n_noise",
                    "bootstrap_ensembles"},
                   "sweep");
    if (s.contains("epsilons"))
      c.sweep.epsilons = parse_grid_values(s.at("epsilons"), "sweep.epsilons");
    if (s.contains("snr_values"))
      c.sweep.snr_values = parse_grid_values(s.at("snr_values"), "sweep.snr_values");
    c.sweep.n_signal = get_or(s, "n_signal", "sweep", c.sweep.n_signal);
    c.sweep.n_noise = get_or(s, "n_noise", "sweep", c.sweep.n_noise);
    c.sweep.bootstrap_ensembles =
        get_or(s, "bootstrap_ensembles", "sweep", c.sweep.bootstrap_ensembles);
    if (c.sweep.n_signal < 100 || c.sweep.n_noise < 100)
      fail("sweep", "n_signal and n_noise must be >= 100");
    if (c.sweep.bootstrap_ensembles < 2)
      fail("sweep.bootstrap_ensembles", "must be >= 2");
    for (double e : c.sweep.epsilons)
      if (!(e >= 0.0)) fail("sweep.epsilons", "entries must be >= 0");
    for (double v : c.sweep.snr_values)
      if (!(v > 0.0)) fail("sweep.snr_values", "entries must be > 0");
  }

  // Mode-dependent requirements.
  if (c.mode == RunMode::Estimate && c.estimate.in_traces.empty())
    fail("estimate.in_traces", "required for mode estimate");
  if (c.mode == RunMode::Crb) {
    if (c.crb.epsilons.empty()) fail("crb.epsilons", "must be non-empty");
    if (c.crb.schemes.empty()) fail("crb.schemes", "must be non-empty");
  }
  if (c.mode == RunMode::Sweep) {
    if (c.sweep.epsilons.empty()) fail("sweep.epsilons", "must be non-empty");
    if (c.sweep.snr_values.empty()) fail("sweep.snr_values", "must be non-empty");
  }
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["mode"] = to_string(mode);
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["source"] = {{"kind", to_string(source.kind)}, {"epsilon", source.epsilon},
                 {"sigma", source.sigma},          {"t_c", source.t_c},
                 {"omega_c", source.omega_c},      {"n_bar", source.n_bar}};
  j["grid"] = {{"n_samples", grid.n_samples},
               {"t_min", grid.t_min},
               {"t_max", grid.t_max}};
  j["search"] = {{"t_center", search.t_center},
                 {"omega_center", search.omega_center},
                 {"t_halfwidth", search.t_halfwidth},
                 {"omega_halfwidth", search.omega_halfwidth},
                 {"coarse_points", search.coarse_points},
                 {"refine_tol", search.refine_tol},
                 {"max_iterations", search.max_iterations}};
  j["simulate"] = {{"n_signal", simulate.n_signal},
                   {"n_noise", simulate.n_noise},
                   {"shot_noise", simulate.shot_noise},
                   {"out_traces", simulate.out_traces}};
  if (!estimate.in_traces.empty())
    j["estimate"] = {{"in_traces", estimate.in_traces}};
  if (!crb.epsilons.empty()) {
    std::vector<std::string> names;
    for (Scheme s : crb.schemes) names.push_back(scheme_name(s));
    j["crb"] = {{"schemes", names},
                {"epsilons", crb.epsilons},
                {"n_bar", crb.n_bar}};
  }
  if (!sweep.epsilons.empty())
    j["sweep"] = {{"epsilons", sweep.epsilons},
                  {"snr_values", sweep.snr_values},
                  {"n_signal", sweep.n_signal},
                  {"n_noise", sweep.n_noise},
                  {"bootstrap_ensembles", sweep.bootstrap_ensembles}};
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument("config: parse error: " + std::string(ex.what()));
  }
  return RunConfig::from_json(j);
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override must look like key.path=value: " +
                                assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  nlohmann::json* node = &j;
  std::size_t pos = 0;
  while (true) {
    const auto dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot - pos);
    if (key.empty())
      throw std::invalid_argument("override has an empty path segment: " + path);
    if (dot == std::string::npos) {
      nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
      (*node)[key] = value.is_discarded() ? nlohmann::json(text) : value;
      return;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

}  // namespace hetspec
