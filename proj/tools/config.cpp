#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "rrk/analysis.hpp"
#include "rrk/errors.hpp"
#include "rrk/integrators.hpp"
#include "rrk/problems.hpp"
#include "rrk/tableaux.hpp"

namespace rrk::cli {
namespace {

using nlohmann::json;

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string normalize_key(std::string_view key) {
  std::string k(key);
  std::replace(k.begin(), k.end(), '_', '-');
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return k;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& expected) {
  throw Error(ErrorKind::ConfigError, "key '" + key + "' expects " + expected);
}

double as_positive(const json& v, const std::string& key) {
  if (!v.is_number()) bad_value(key, "a number");
  const double x = v.get<double>();
  if (!(x > 0.0)) bad_value(key, "a positive number");
  return x;
}

long as_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long>() < 1) bad_value(key, "a positive integer");
  return v.get<long>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) bad_value(key, "a string");
  return v.get<std::string>();
}

void apply(ExperimentSpec& spec, const std::string& key, const json& v) {
  if (key == "problem") {
    spec.problem = as_string(v, key);
  } else if (key == "method") {
    spec.method = as_string(v, key);
  } else if (key == "scheme") {
    spec.scheme = as_string(v, key);
  } else if (key == "invariant") {
    spec.invariant = as_string(v, key);
  } else if (key == "dt") {
    spec.dt = as_positive(v, key);
  } else if (key == "t-end") {
    spec.t_end = as_positive(v, key);
  } else if (key == "seed") {
    if (!v.is_number_integer() || v.get<long long>() < 0) bad_value(key, "a non-negative integer");
    spec.seed = v.get<std::uint64_t>();
  } else if (key == "output") {
    spec.output = as_string(v, key);
  } else if (key == "dts") {
    if (!v.is_array() || v.empty()) bad_value(key, "a non-empty array of numbers");
    spec.dts.clear();
    for (const auto& x : v) spec.dts.push_back(as_positive(x, key));
  } else if (key == "max-s") {
    spec.max_s = static_cast<int>(as_count(v, key));
  } else if (key == "eccentricity") {
    if (!v.is_number() || v.get<double>() < 0.0 || v.get<double>() >= 1.0) bad_value(key, "a number in [0, 1)");
    spec.eccentricity = v.get<double>();
  } else if (key == "grid") {
    spec.grid = as_count(v, key);
  } else if (key == "direction") {
    spec.direction = as_string(v, key);
  } else if (key == "cloud-size") {
    spec.cloud_size = as_count(v, key);
  } else if (key == "radius") {
    spec.radius = as_positive(v, key);
  } else if (key == "sample-stride") {
    spec.sample_stride = as_count(v, key);
  } else if (key == "gamma-mode") {
    spec.gamma_mode = as_string(v, key);
  } else if (key == "data-dir") {
    spec.data_dir = as_string(v, key);
  }
}

void apply_all(ExperimentSpec& spec, const json& values, const char* origin) {
  if (values.is_null()) return;
  if (!values.is_object()) throw Error(ErrorKind::ConfigError, std::string(origin) + " must be a JSON object");
  const auto& known = config_keys();
  for (const auto& [raw, v] : values.items()) {
    const std::string key = normalize_key(raw);
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      std::string msg = "unknown key '" + raw + "' in " + origin;
      if (const auto hint = suggest_key(raw)) msg += "; did you mean '" + *hint + "'?";
      throw Error(ErrorKind::ConfigError, msg);
    }
    apply(spec, key, v);
  }
}

const std::map<std::string, std::string, std::less<>>& synonyms() {
  static const std::map<std::string, std::string, std::less<>> table = {
      {"stepsize", "dt"},        {"step-size", "dt"},     {"step", "dt"},          {"h", "dt"},
      {"timestep", "dt"},        {"time-step", "dt"},     {"tend", "t-end"},       {"t-final", "t-end"},
      {"final-time", "t-end"},   {"tfinal", "t-end"},     {"tmax", "t-end"},       {"tableau", "method"},
      {"integrator", "method"},  {"rk", "method"},        {"mode", "scheme"},      {"system", "problem"},
      {"out", "output"},         {"output-path", "output"}, {"rng-seed", "seed"},  {"stepsizes", "dts"},
      {"step-sizes", "dts"},     {"n", "grid"},           {"points", "cloud-size"}, {"functional", "invariant"},
      {"e", "eccentricity"},     {"datadir", "data-dir"}, {"stride", "sample-stride"},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"integrate", "converge", "errgrowth", "poincare", "volume",
                                                 "kdv",       "solar",    "argon",     "lemma-a2", "gamma-asymptotic"};
  return names;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "problem", "method", "scheme", "invariant", "dt",        "t-end",      "seed",   "output",        "dts",
      "max-s",   "eccentricity", "grid", "direction", "cloud-size", "radius", "sample-stride", "gamma-mode",
      "data-dir"};
  return keys;
}

std::optional<std::string> suggest_key(std::string_view unknown) {
  const std::string key = normalize_key(unknown);
  if (const auto it = synonyms().find(key); it != synonyms().end()) return it->second;
  std::optional<std::string> best;
  std::size_t best_distance = 3;  // suggestions farther than two edits are noise
  for (const auto& k : config_keys()) {
    const std::size_t d = edit_distance(key, k);
    if (d < best_distance) {
      best_distance = d;
      best = k;
    }
  }
  return best;
}

json experiment_defaults(std::string_view experiment) {
  if (experiment == "integrate") {
    return {{"problem", "duffing"}, {"method", "rk44"}, {"scheme", "baseline"}, {"dt", 0.5}, {"t-end", 500.0}};
  }
  if (experiment == "converge") {
    return {{"problem", "harmonic"}, {"method", "heun3"}, {"scheme", "relaxation"},
            {"dts", {0.4, 0.2, 0.1, 0.05, 0.025}}, {"t-end", 10.0}};
  }
  if (experiment == "errgrowth") {
    return {{"problem", "nonlinear-oscillator"}, {"method", "heun3"}, {"scheme", "relaxation"}, {"dt", 0.025},
            {"t-end", 2000.0}};
  }
  if (experiment == "poincare") {
    return {{"problem", "henon-heiles"}, {"method", "ssprk33"}, {"scheme", "relaxation"}, {"dt", 0.1},
            {"t-end", 5000.0}, {"direction", "positive"}};
  }
  if (experiment == "volume") {
    return {{"problem", "harmonic"}, {"method", "rk44"}, {"scheme", "relaxation"}, {"dt", 0.25}, {"t-end", 200.0},
            {"cloud-size", 200}, {"radius", 1e-3}, {"seed", 0x5EED}, {"sample-stride", 4}};
  }
  if (experiment == "kdv") {
    return {{"problem", "kdv"}, {"method", "norsett23"}, {"scheme", "relaxation"}, {"dt", 0.5}, {"t-end", 200.0},
            {"grid", 128}};
  }
  if (experiment == "solar") {
    return {{"problem", "solar"}, {"method", "ssprk22"}, {"scheme", "relaxation"}, {"dt", 200.0}, {"t-end", 20000.0}};
  }
  if (experiment == "argon") {
    return {{"problem", "argon"}, {"method", "rk44"}, {"scheme", "relaxation"}, {"dt", 1e-4}, {"t-end", 0.2}};
  }
  if (experiment == "lemma-a2") return {{"max-s", 12}};
  if (experiment == "gamma-asymptotic") {
    return {{"problem", "harmonic"}, {"method", "heun3"}, {"dts", {0.1, 0.05, 0.025, 0.0125}}};
  }
  std::string known;
  for (const auto& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorKind::ConfigError, "unknown experiment '" + std::string(experiment) + "' (known: " + known + ")");
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config file " + path.string());
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw Error(ErrorKind::ConfigError, path.string() + " must hold a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
}

ExperimentSpec resolve_spec(std::string_view experiment, const json& file_values, const json& flag_values) {
  ExperimentSpec spec;
  spec.experiment = std::string(experiment);
  apply_all(spec, experiment_defaults(experiment), "defaults");
  apply_all(spec, file_values, "config file");
  apply_all(spec, flag_values, "flags");
  if (spec.output.empty()) spec.output = "rrk_" + spec.experiment;
  return spec;
}

void validate_spec(const ExperimentSpec& spec) {
  const std::string& e = spec.experiment;
  if (e == "lemma-a2") return;

  for (const char* fixed : {"kdv", "solar", "argon"}) {
    if (e == fixed && spec.problem != fixed) {
      throw Error(ErrorKind::ConfigError, "experiment " + e + " always uses problem " + fixed);
    }
  }
  (void)registry_get(spec.method);
  if (spec.gamma_mode != "root" && spec.gamma_mode != "closed-form") {
    throw Error(ErrorKind::ConfigError, "gamma-mode must be 'root' or 'closed-form'");
  }
  if (e == "poincare") (void)parse_crossing_direction(spec.direction);

  ProblemParameters params;
  params.eccentricity = spec.eccentricity;
  params.grid = spec.grid;
  params.data_dir = spec.data_dir;
  if (spec.problem == "kdv" && spec.grid % 2 != 0) throw Error(ErrorKind::ConfigError, "grid must be even");
  const OdeProblem problem = make_problem(spec.problem, params);

  if (e == "gamma-asymptotic") {
    if (!problem.jacobian) throw Error(ErrorKind::ConfigError, spec.problem + " is not a linear problem");
    if (spec.dts.size() < 2) throw Error(ErrorKind::ConfigError, "gamma-asymptotic needs at least two dts");
    return;
  }
  const Scheme scheme = parse_scheme(spec.scheme);
  if (scheme == Scheme::Relaxation || scheme == Scheme::Projection) (void)problem.invariant(spec.invariant);
  if (scheme == Scheme::SymplecticEuler && !problem.partition) {
    throw Error(ErrorKind::NotPartitioned, spec.problem + " has no canonical (q, p) partition");
  }
  if (e == "converge") {
    if (spec.dts.size() < 4) throw Error(ErrorKind::ConfigError, "converge needs at least 4 step sizes");
    const auto [lo, hi] = std::minmax_element(spec.dts.begin(), spec.dts.end());
    if (*hi < 8.0 * *lo) throw Error(ErrorKind::ConfigError, "converge step sizes must span at least a factor 8");
    if (!problem.has_reference()) throw Error(ErrorKind::ReferenceUnavailable, spec.problem + " has no reference");
  }
  if (e == "errgrowth" && !problem.has_reference()) {
    throw Error(ErrorKind::ReferenceUnavailable, spec.problem + " has no reference");
  }
  if (e == "volume" && problem.dim < 2) throw Error(ErrorKind::ConfigError, "volume needs at least two coordinates");
}

json to_json(const ExperimentSpec& spec) {
  json j = {{"experiment", spec.experiment},
            {"problem", spec.problem},
            {"method", spec.method},
            {"scheme", spec.scheme},
            {"invariant", spec.invariant},
            {"dt", spec.dt},
            {"t-end", spec.t_end},
            {"seed", spec.seed},
            {"output", spec.output},
            {"dts", spec.dts},
            {"max-s", spec.max_s},
            {"eccentricity", spec.eccentricity},
            {"grid", spec.grid},
            {"direction", spec.direction},
            {"cloud-size", spec.cloud_size},
            {"radius", spec.radius},
            {"sample-stride", spec.sample_stride},
            {"gamma-mode", spec.gamma_mode}};
  if (spec.data_dir) j["data-dir"] = spec.data_dir->string();
  return j;
}

}  // namespace rrk::cli
