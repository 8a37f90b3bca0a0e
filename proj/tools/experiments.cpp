#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "rrk/analysis.hpp"
#include "rrk/errors.hpp"
#include "rrk/integrators.hpp"
#include "rrk/problems.hpp"
#include "rrk/tableaux.hpp"

namespace rrk::cli {
namespace {

using nlohmann::json;

ProblemParameters parameters(const ExperimentSpec& spec) {
  ProblemParameters p;
  p.eccentricity = spec.eccentricity;
  p.grid = spec.grid;
  p.data_dir = spec.data_dir;
  return p;
}

IntegrateOptions options(const ExperimentSpec& spec) {
  IntegrateOptions o;
  o.invariant = spec.invariant;
  o.step.gamma_mode = spec.gamma_mode == "closed-form" ? GammaMode::QuadraticClosedForm : GammaMode::RootFind;
  return o;
}

const Tableau* tableau_for(const ExperimentSpec& spec) {
  return parse_scheme(spec.scheme) == Scheme::SymplecticEuler ? nullptr : &registry_get(spec.method);
}

Trajectory run_trajectory(const OdeProblem& problem, const ExperimentSpec& spec) {
  return integrate(problem, tableau_for(spec), parse_scheme(spec.scheme), problem.initial_state, problem.t0,
                   spec.t_end, spec.dt, options(spec));
}

json fit_json(const LinearFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}, {"samples", fit.samples}};
}

/// Drift summary of every recorded invariant.
json invariant_summary(const Trajectory& traj) {
  json out = json::object();
  for (const auto& [name, series] : traj.invariant_series) {
    out[name] = {{"initial", series.front()},
                 {"final", series.back()},
                 {"max_relative_drift", max_relative_drift(series)},
                 {"final_drift", series.back() - series.front()}};
  }
  return out;
}

ExperimentReport integrate_experiment(const ExperimentSpec& spec) {
  const OdeProblem problem = make_problem(spec.problem, parameters(spec));
  const Trajectory traj = run_trajectory(problem, spec);

  Table t{"trajectory", {"time"}, {}};
  for (Eigen::Index i = 0; i < problem.dim; ++i) t.columns.push_back("u" + std::to_string(i + 1));
  for (const auto& [name, series] : traj.invariant_series) t.columns.push_back(name);
  t.columns.push_back("gamma");
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<double> row{traj.times[k]};
    for (Eigen::Index i = 0; i < problem.dim; ++i) row.push_back(traj.states[k](i));
    for (const auto& [name, series] : traj.invariant_series) row.push_back(series[k]);
    row.push_back(k == 0 ? std::nan("") : traj.gammas[k - 1]);
    t.rows.push_back(std::move(row));
  }

  ExperimentReport r{spec, {std::move(t)}, json::object(), 0.0};
  r.summary = {{"steps", traj.steps()},
               {"final_time", traj.times.back()},
               {"newton_iterations", traj.newton_iterations},
               {"invariants", invariant_summary(traj)}};
  if (problem.has_reference()) {
    r.summary["final_error"] = state_error(problem, traj.times.back(), traj.states.back());
  }
  return r;
}

ExperimentReport converge_experiment(const ExperimentSpec& spec) {
  const OdeProblem problem = make_problem(spec.problem, parameters(spec));
  const OrderFit fit = convergence_order(problem, tableau_for(spec), parse_scheme(spec.scheme), spec.dts,
                                         spec.t_end, options(spec));
  Table t{"convergence", {"dt", "error", "final_time"}, {}};
  for (std::size_t k = 0; k < fit.dts.size(); ++k) t.rows.push_back({fit.dts[k], fit.errors[k], fit.final_times[k]});
  ExperimentReport r{spec, {std::move(t)}, json::object(), 0.0};
  r.summary = {{"slope", fit.slope},
               {"r_squared", fit.r_squared},
               {"fit_window_dt", {fit.window.first, fit.window.second}},
               {"window_samples", fit.window_samples},
               {"reliable", fit.reliable},
               {"declared_order", tableau_for(spec) ? tableau_for(spec)->declared_order : 1}};
  return r;
}

ExperimentReport errgrowth_experiment(const ExperimentSpec& spec) {
  const OdeProblem problem = make_problem(spec.problem, parameters(spec));
  const GrowthFit fit = error_growth_fit(problem, tableau_for(spec), parse_scheme(spec.scheme), spec.dt, spec.t_end,
                                         default_growth_samples(spec.problem, spec.t_end), options(spec));
  Table t{"growth", {"time", "error"}, {}};
  for (std::size_t k = 0; k < fit.times.size(); ++k) t.rows.push_back({fit.times[k], fit.errors[k]});
  ExperimentReport r{spec, {std::move(t)}, json::object(), 0.0};
  r.summary = {{"exponent", fit.exponent},
               {"r_squared", fit.r_squared},
               {"fit_window_t", {fit.window.first, fit.window.second}},
               {"window_samples", fit.window_samples},
               {"saturation_threshold", kSaturationError}};
  return r;
}

ExperimentReport poincare_experiment(const ExperimentSpec& spec) {
  const OdeProblem problem = make_problem(spec.problem, parameters(spec));
  if (problem.dim < 4) throw Error(ErrorKind::ConfigError, "poincare needs a state with at least 4 coordinates");
  const Trajectory traj = run_trajectory(problem, spec);
  const Stepper stepper(problem, tableau_for(spec), parse_scheme(spec.scheme), spec.invariant, options(spec).step);
  SectionPlane plane;
  plane.direction = parse_crossing_direction(spec.direction);
  const auto points = poincare_section(traj, problem, plane, stepper_refiner(stepper));

  const Invariant& h = problem.invariant(problem.has_invariant("energy") ? "energy" : spec.invariant);
  const double h0 = h.value(problem.initial_state);
  Table t{"section",
          {"time", "u" + std::to_string(plane.record.first + 1), "u" + std::to_string(plane.record.second + 1),
           "H_deviation"},
          {}};
  double worst = 0.0;
  for (const auto& p : points) {
    const double dev = h.value(p.state) - h0;
    worst = std::max(worst, std::abs(dev));
    t.rows.push_back({p.t, p.coords[0], p.coords[1], dev});
  }
  ExperimentReport r{spec, {std::move(t)}, json::object(), 0.0};
  r.summary = {{"points", points.size()},
               {"plane", {{"coordinate", "u" + std::to_string(plane.plane_coord + 1)}, {"value", plane.plane_value}}},
               {"direction", to_string(plane.direction)},
               {"max_abs_H_deviation", worst},
               {"trajectory_max_relative_drift", max_relative_drift(traj.series(h.name))}};
  return r;
}

ExperimentReport volume_experiment(const ExperimentSpec& spec) {
  const OdeProblem problem = make_problem(spec.problem, parameters(spec));
  const Stepper stepper(problem, tableau_for(spec), parse_scheme(spec.scheme), spec.invariant, options(spec).step);
  const auto cloud = disk_cloud(problem.initial_state, spec.radius, static_cast<std::size_t>(spec.cloud_size),
                                spec.seed);
  const VolumeSeries vs = volume_series(stepper, cloud, spec.dt, spec.t_end,
                                        static_cast<std::size_t>(spec.sample_stride));
  Table t{"volume", {"time", "area", "relative_change"}, {}};
  for (std::size_t k = 0; k < vs.times.size(); ++k) t.rows.push_back({vs.times[k], vs.areas[k], vs.relative_change[k]});
  ExperimentReport r{spec, {std::move(t)}, json::object(), 0.0};
  r.summary = {{"relative_change_fit", fit_json(vs.fit)},
               {"fit_window_t", {vs.times.front(), vs.times.back()}},
               {"initial_area", vs.areas.front()},
               {"final_relative_change", vs.relative_change.back()}};
  return r;
}

ExperimentReport kdv_experiment(const ExperimentSpec& spec) {
  const OdeProblem problem = make_problem("kdv", parameters(spec));
  const Trajectory traj = run_trajectory(problem, spec);
  const auto& energy = traj.series("energy");
  const auto& mass = traj.series("mass");
  Table t{"kdv", {"time", "energy", "mass", "error"}, {}};
  bool monotone = true;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (k > 0 && energy[k] > energy[k - 1]) monotone = false;
    t.rows.push_back({traj.times[k], energy[k], mass[k], state_error(problem, traj.times[k], traj.states[k])});
  }
  const double final_error = t.rows.back().back();
  ExperimentReport r{spec, {std::move(t)}, json::object(), 0.0};
  r.summary = {{"energy_relative_drift", max_drift_relative_to_initial(energy)},
               {"mass_relative_drift", max_drift_relative_to_initial(mass)},
               {"energy_nonincreasing", monotone},
               {"final_time", traj.times.back()},
               {"final_error", final_error},
               {"newton_iterations", traj.newton_iterations},
               {"steps", traj.steps()}};
  return r;
}

ExperimentReport solar_experiment(const ExperimentSpec& spec) {
  const NBodySetup setup = outer_solar_system(spec.data_dir);
  const Trajectory traj = run_trajectory(setup.problem, spec);
  const auto& h = traj.series("energy");
  const auto n = static_cast<Eigen::Index>(setup.bodies());

  Table t{"orbits", {"time", "H"}, {}};
  for (const auto& name : setup.names) {
    for (const char* axis : {"x", "y", "z"}) t.columns.push_back(name + "_" + axis);
  }
  double momentum_drift = 0.0;
  const Eigen::Vector3d p0 = setup.problem.initial_state.tail(3 * n).reshaped(3, n).rowwise().sum();
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<double> row{traj.times[k], h[k]};
    for (Eigen::Index i = 0; i < 3 * n; ++i) row.push_back(traj.states[k](i));
    t.rows.push_back(std::move(row));
    const Eigen::Vector3d pk = traj.states[k].tail(3 * n).reshaped(3, n).rowwise().sum();
    momentum_drift = std::max(momentum_drift, (pk - p0).norm());
  }
  ExperimentReport r{spec, {std::move(t)}, json::object(), 0.0};
  r.summary = {{"H_initial", h.front()},
               {"H_relative_drift", max_drift_relative_to_initial(h)},
               {"H_final_relative_drift", (h.back() - h.front()) / std::abs(h.front())},
               {"linear_momentum_drift", momentum_drift},
               {"steps", traj.steps()}};
  return r;
}

ExperimentReport argon_experiment(const ExperimentSpec& spec) {
  const NBodySetup setup = argon_crystal(spec.data_dir);
  const Trajectory traj = run_trajectory(setup.problem, spec);
  const auto& h = traj.series("energy");
  const TemperatureSeries temp = temperature_series(traj, setup.masses, setup.boltzmann, setup.space_dim);
  Table t{"argon", {"time", "H", "temperature"}, {}};
  for (std::size_t k = 0; k < traj.times.size(); ++k) t.rows.push_back({traj.times[k], h[k], temp.temperature[k]});
  ExperimentReport r{spec, {std::move(t)}, json::object(), 0.0};
  r.summary = {{"H_initial", h.front()},
               {"H_relative_drift", max_drift_relative_to_initial(h)},
               {"temperature_drift_fit", fit_json(temp.drift)},
               {"fit_window_t", {temp.times.front(), temp.times.back()}},
               {"initial_temperature", temp.temperature.front()},
               {"steps", traj.steps()}};
  return r;
}

ExperimentReport lemma_experiment(const ExperimentSpec& spec) {
  const auto checks = lemma_a2_sweep(spec.max_s);
  Table t{"lemma_a2", {"s", "m", "residual", "exact"}, {}};
  json cases = json::array();
  bool all_exact = true;
  for (const auto& c : checks) {
    all_exact = all_exact && c.exact;
    t.rows.push_back({static_cast<double>(c.s), static_cast<double>(c.m), c.residual, c.exact ? 1.0 : 0.0});
    cases.push_back({{"s", c.s}, {"m", c.m}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"exact", c.exact}});
  }
  ExperimentReport r{spec, {std::move(t)}, json::object(), 0.0};
  r.summary = {{"cases", checks.size()},
               {"all_exact", all_exact},
               {"message", all_exact ? "all residuals zero" : "nonzero residual found"},
               {"details", cases}};
  if (!all_exact) throw Error(ErrorKind::ToleranceNotMet, "Lemma identity fails in exact arithmetic");
  return r;
}

ExperimentReport gamma_experiment(const ExperimentSpec& spec) {
  const OdeProblem problem = make_problem(spec.problem, parameters(spec));
  const GammaAsymptotics g = gamma_asymptotic_check(registry_get(spec.method), problem, spec.dts);
  Table t{"gamma", {"dt", "gamma_minus_one"}, {}};
  for (std::size_t k = 0; k < g.dts.size(); ++k) t.rows.push_back({g.dts[k], g.gamma_minus_one[k]});
  ExperimentReport r{spec, {std::move(t)}, json::object(), 0.0};
  r.summary = {{"order", g.order},
               {"applicable", g.applicable},
               {"exponent", g.exponent},
               {"constant", g.constant},
               {"fit", fit_json(g.fit)}};
  if (g.applicable) {
    r.summary["predicted_constant"] = g.predicted_constant;
    r.summary["relative_deviation"] = g.relative_deviation;
  }
  return r;
}

}  // namespace

std::vector<double> default_growth_samples(const std::string& problem, double t_end) {
  std::vector<double> times;
  if (problem == "kepler") {
    const double period = 2.0 * std::numbers::pi;
    for (int k = 0; (k + 0.5) * period <= t_end; ++k) times.push_back((k + 0.5) * period);
  }
  return times;
}

double max_drift_relative_to_initial(const std::vector<double>& series) {
  double worst = 0.0;
  for (double v : series) worst = std::max(worst, std::abs(v - series.front()) / std::abs(series.front()));
  return worst;
}

ExperimentReport run(const ExperimentSpec& spec) {
  validate_spec(spec);
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  const std::string& e = spec.experiment;
  if (e == "integrate") {
    report = integrate_experiment(spec);
  } else if (e == "converge") {
    report = converge_experiment(spec);
  } else if (e == "errgrowth") {
    report = errgrowth_experiment(spec);
  } else if (e == "poincare") {
    report = poincare_experiment(spec);
  } else if (e == "volume") {
    report = volume_experiment(spec);
  } else if (e == "kdv") {
    report = kdv_experiment(spec);
  } else if (e == "solar") {
    report = solar_experiment(spec);
  } else if (e == "argon") {
    report = argon_experiment(spec);
  } else if (e == "lemma-a2") {
    report = lemma_experiment(spec);
  } else if (e == "gamma-asymptotic") {
    report = gamma_experiment(spec);
  } else {
    throw Error(ErrorKind::ConfigError, "unknown experiment '" + e + "'");
  }
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace rrk::cli
