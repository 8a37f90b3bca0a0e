// rrk-lab: command-line runner for the relaxation Runge-Kutta experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.

#include <deque>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "config.hpp"
#include "experiments.hpp"
#include "output.hpp"
#include "rrk/errors.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d = {
      {"integrate", "Integrate one problem and record states, invariants and gamma"},
      {"converge", "Observed order of accuracy over a list of step sizes"},
      {"errgrowth", "Exponent of the error growth in time"},
      {"poincare", "Poincare section in the u1 = 0 plane, recording (u2, u4)"},
      {"volume", "Phase-space area of a perturbed initial cloud"},
      {"kdv", "KdV soliton with the split-form Fourier semidiscretization"},
      {"solar", "Outer solar system"},
      {"argon", "Frozen argon crystal, energy and kinetic temperature"},
      {"lemma-a2", "Exact-rational check of the alternating factorial identity"},
      {"gamma-asymptotic", "Leading behaviour of gamma - 1 as dt -> 0"},
  };
  return d;
}

struct Flags {
  std::string problem, method, scheme, invariant, output, config, direction, gamma_mode, data_dir;
  double dt = 0, t_end = 0, eccentricity = 0, radius = 0;
  std::uint64_t seed = 0;
  std::vector<double> dts;
  int max_s = 0;
  long grid = 0, cloud_size = 0, sample_stride = 0;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  CLI::Option* config_opt = nullptr;
  CLI::Option* show_defaults = nullptr;
};

std::string default_note(const json& defaults, const std::string& key) {
  if (!defaults.contains(key)) return "";
  return " (default " + defaults.at(key).dump() + ")";
}

void add_options(CLI::App* sub, Flags& f, const json& defaults) {
  auto opt = [&](const std::string& key, auto& var, const std::string& help) {
    CLI::Option* o = sub->add_option("--" + key, var, help + default_note(defaults, key));
    f.options.emplace_back(key, o);
  };
  opt("problem", f.problem, "Problem identifier");
  opt("method", f.method, "Runge-Kutta method (rk44, ssprk22, ssprk33, heun3, fehlberg4, dp75, bs85, norsett23, sdirk34, sdirk54)");
  opt("scheme", f.scheme, "baseline | relaxation | projection | symplectic-euler");
  opt("invariant", f.invariant, "Invariant to conserve (default \"energy\")");
  opt("dt", f.dt, "Step size");
  opt("t-end", f.t_end, "Final time");
  opt("seed", f.seed, "RNG seed for random clouds (default 24301)");
  opt("output", f.output, "Output path prefix for <prefix>.csv and <prefix>.json (default rrk_<experiment>)");
  opt("dts", f.dts, "Step sizes for order or gamma fits");
  opt("max-s", f.max_s, "Largest stage count in the identity sweep");
  opt("eccentricity", f.eccentricity, "Kepler eccentricity (default 0.5)");
  opt("grid", f.grid, "KdV grid size (default 128)");
  opt("direction", f.direction, "Section crossing direction: positive | negative | both (default positive)");
  opt("cloud-size", f.cloud_size, "Number of cloud points");
  opt("radius", f.radius, "Cloud radius");
  opt("sample-stride", f.sample_stride, "Steps between area samples");
  opt("gamma-mode", f.gamma_mode, "root | closed-form (default root)");
  opt("data-dir", f.data_dir, "Directory of constants files (default $RRK_LAB_DATA_DIR or the built-in path)");
  f.config_opt = sub->add_option("--config", f.config, "JSON file with any of the keys above; flags win");
  f.show_defaults = sub->add_flag("--show-defaults", "Print this experiment's defaults and exit");
}

template <typename T>
void put(json& j, const std::string& key, const T& value) {
  j[key] = value;
}

json flag_values(const Flags& f) {
  json j = json::object();
  for (const auto& [key, o] : f.options) {
    if (o->count() == 0) continue;
    if (key == "problem") put(j, key, f.problem);
    else if (key == "method") put(j, key, f.method);
    else if (key == "scheme") put(j, key, f.scheme);
    else if (key == "invariant") put(j, key, f.invariant);
    else if (key == "dt") put(j, key, f.dt);
    else if (key == "t-end") put(j, key, f.t_end);
    else if (key == "seed") put(j, key, f.seed);
    else if (key == "output") put(j, key, f.output);
    else if (key == "dts") put(j, key, f.dts);
    else if (key == "max-s") put(j, key, f.max_s);
    else if (key == "eccentricity") put(j, key, f.eccentricity);
    else if (key == "grid") put(j, key, f.grid);
    else if (key == "direction") put(j, key, f.direction);
    else if (key == "cloud-size") put(j, key, f.cloud_size);
    else if (key == "radius") put(j, key, f.radius);
    else if (key == "sample-stride") put(j, key, f.sample_stride);
    else if (key == "gamma-mode") put(j, key, f.gamma_mode);
    else if (key == "data-dir") put(j, key, f.data_dir);
  }
  return j;
}

int exit_code(rrk::ErrorKind kind) {
  switch (rrk::error_class(kind)) {
    case rrk::ErrorClass::Config: return kExitConfig;
    case rrk::ErrorClass::Io: return kExitIo;
    case rrk::ErrorClass::Numeric: return kExitNumeric;
  }
  return kExitNumeric;
}

json all_defaults() {
  json j = json::object();
  for (const auto& name : rrk::cli::experiment_names()) j[name] = rrk::cli::experiment_defaults(name);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rrk-lab: relaxation Runge-Kutta experiments.\n"
               "Defaults per experiment are listed by --show-defaults; a --config JSON file may set\n"
               "any long flag by name, and explicit flags override it."};
  app.set_version_flag("--version", std::string(rrk::cli::kVersion));
  app.require_subcommand(0, 1);
  bool show_all_defaults = false;
  app.add_flag("--show-defaults", show_all_defaults, "Print the defaults of every experiment and exit");

  std::deque<Flags> flags;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& name : rrk::cli::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, descriptions().at(name));
    flags.emplace_back();
    add_options(sub, flags.back(), rrk::cli::experiment_defaults(name));
    subs.emplace_back(name, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (show_all_defaults) {
    std::cout << all_defaults().dump(2) << "\n";
    return 0;
  }

  std::size_t chosen = subs.size();
  for (std::size_t k = 0; k < subs.size(); ++k) {
    if (subs[k].second->parsed()) chosen = k;
  }
  if (chosen == subs.size()) {
    std::cerr << app.help();
    return kExitConfig;
  }
  const std::string& experiment = subs[chosen].first;
  const Flags& f = flags[chosen];
  if (f.show_defaults->count() > 0) {
    std::cout << rrk::cli::experiment_defaults(experiment).dump(2) << "\n";
    return 0;
  }

  json echo = {{"experiment", experiment}};
  std::string output = "rrk_" + experiment;
  try {
    const json file_values = f.config.empty() ? json::object() : rrk::cli::load_config_file(f.config);
    const json flag_json = flag_values(f);
    echo["config_file"] = file_values;
    echo["flags"] = flag_json;
    if (flag_json.contains("output")) {
      output = flag_json["output"].get<std::string>();
    } else if (file_values.contains("output") && file_values["output"].is_string()) {
      output = file_values["output"].get<std::string>();
    }
    const rrk::cli::ExperimentSpec spec = rrk::cli::resolve_spec(experiment, file_values, flag_json);
    echo = rrk::cli::to_json(spec);
    output = spec.output;

    const rrk::cli::ExperimentReport report = rrk::cli::run(spec);
    rrk::cli::write_report(report);
    if (report.summary.contains("message")) std::cout << report.summary["message"].get<std::string>() << "\n";
    for (const auto& p : rrk::cli::csv_paths(report)) std::cout << "wrote " << p.string() << "\n";
    std::cout << "wrote " << rrk::cli::json_path(spec.output).string() << "\n";
    return 0;
  } catch (const rrk::Error& e) {
    std::cerr << "rrk-lab: " << e.what();
    if (e.step()) std::cerr << " (step " << *e.step() << ")";
    std::cerr << "\n";
    try {
      rrk::cli::write_failure(output, echo, std::string(rrk::to_string(e.kind())), e.what(),
                              e.step() ? json(*e.step()) : json(nullptr));
    } catch (const rrk::Error&) {
      // the summary itself could not be written; the exit code still reports the failure
    }
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "rrk-lab: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "rrk-lab: " << e.what() << "\n";
    return kExitNumeric;
  }
}
