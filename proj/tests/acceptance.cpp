// Acceptance checks for the relaxation Runge-Kutta library and CLI.
// Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "experiments.hpp"
#include "output.hpp"
#include "rrk/analysis.hpp"
#include "rrk/problems.hpp"

using namespace rrk;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Collects named sub-checks of one criterion.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    std::printf("    [%s] %s\n", ok ? " ok " : "FAIL", what.c_str());
    all_ = all_ && ok;
  }
  void note(const std::string& what) { std::printf("    [info] %s\n", what.c_str()); }
  [[nodiscard]] bool ok() const { return all_; }

 private:
  bool all_ = true;
};

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}
std::string fmt(const char* f, double a, double b, double c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double end_drift(const std::vector<double>& h) {
  return std::abs(h.back() - h.front()) / std::max(1.0, std::abs(h.front()));
}

// Max relative drift over the first and second halves of a series.
std::pair<double, double> half_drifts(const std::vector<double>& h) {
  const double scale = std::max(1.0, std::abs(h.front()));
  double a = 0.0, b = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    double& half = 2 * k < h.size() ? a : b;
    half = std::max(half, std::abs(h[k] - h.front()) / scale);
  }
  return {a, b};
}

bool criterion_conservation(Checks& c) {
  struct Case {
    const char* problem;
    const char* method;
    double dt;
    double t_end;
  };
  for (const Case& k : {Case{"lotka-volterra", "rk44", 0.85, 500.0}, Case{"henon-heiles", "ssprk33", 0.1, 5000.0},
                        Case{"duffing", "rk44", 0.5, 500.0}, Case{"kepler", "ssprk33", 0.01, 100.0}}) {
    const OdeProblem p = make_problem(k.problem);
    const Tableau& t = registry_get(k.method);
    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory rel = integrate(p, &t, Scheme::Relaxation, p.initial_state, 0.0, k.t_end, k.dt);
    const Trajectory base = integrate(p, &t, Scheme::Baseline, p.initial_state, 0.0, k.t_end, k.dt);
    const double secs = seconds_since(t0);
    const double drift_rel = max_relative_drift(rel.series("energy"));
    const auto& hb = base.series("energy");
    const auto [first, second] = half_drifts(hb);
    const std::string tag = std::string(k.problem) + "/" + k.method;
    c.expect(drift_rel <= 1e-10, tag + fmt(": relaxation max drift %.2e <= 1e-10", drift_rel));
    c.expect(end_drift(hb) >= 1e-6, tag + fmt(": baseline end drift %.2e >= 1e-6", end_drift(hb)));
    c.expect(second >= first,
             tag + fmt(": baseline drift grows (first half %.2e, second half %.2e)", first, second));
    c.expect(secs <= 60.0, tag + fmt(": runtime %.1f s <= 60 s", secs));
  }
  return c.ok();
}

bool criterion_superconvergence(Checks& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> dts = {0.4, 0.2, 0.1, 0.05, 0.025};
  struct Case {
    const char* method;
    double target;
    double tol;
  };
  for (const char* prob : {"harmonic", "nonlinear-oscillator"}) {
    const OdeProblem p = make_problem(prob);
    for (const Case& k : {Case{"heun3", 4.0, 0.25}, Case{"bs85", 6.0, 0.3}, Case{"ssprk22", 2.0, 0.25},
                          Case{"rk44", 4.0, 0.25}}) {
      const OrderFit f = convergence_order(p, &registry_get(k.method), Scheme::Relaxation, dts, 10.0);
      c.expect(std::abs(f.slope - k.target) <= k.tol && f.window_samples >= 3,
               std::string(prob) + "/" + k.method +
                   fmt(": slope %.3f, expected %.1f +- %.2f", f.slope, k.target, k.tol) +
                   " (" + std::to_string(f.window_samples) + " points in window)");
    }
  }
  // Non-Euclidean controls: local slopes only settle at 3 below dt = 0.025.
  const std::vector<double> fine = {0.025, 0.0125, 0.00625, 0.003125};
  for (const char* prob : {"skew4", "linear-hamiltonian"}) {
    const OdeProblem p = make_problem(prob);
    const OrderFit coarse = convergence_order(p, &registry_get("heun3"), Scheme::Relaxation, dts, 10.0);
    const OrderFit f = convergence_order(p, &registry_get("heun3"), Scheme::Relaxation, fine, 10.0);
    c.note(std::string(prob) + fmt(": heun3 slope on the oscillator grid %.3f (pre-asymptotic)", coarse.slope));
    c.expect(std::abs(f.slope - 3.0) <= 0.25,
             std::string(prob) + fmt(": heun3 slope %.3f on dt 0.025..0.003125, expected 3 +- 0.25", f.slope));
  }
  const double secs = seconds_since(t0);
  c.expect(secs <= 120.0, fmt("runtime %.1f s <= 120 s", secs));
  return c.ok();
}

bool criterion_error_growth(Checks& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const OdeProblem nl = nonlinear_oscillator();
  const Tableau& heun = registry_get("heun3");
  const GrowthFit nr = error_growth_fit(nl, &heun, Scheme::Relaxation, 0.025, 2000.0);
  const GrowthFit nb = error_growth_fit(nl, &heun, Scheme::Baseline, 0.025, 2000.0);
  c.expect(std::abs(nr.exponent - 1.0) <= 0.3, fmt("nonlinear oscillator relaxation exponent %.3f, expected 1 +- 0.3", nr.exponent));
  c.expect(std::abs(nb.exponent - 2.0) <= 0.3, fmt("nonlinear oscillator baseline exponent %.3f, expected 2 +- 0.3", nb.exponent));

  const OdeProblem kp = kepler(0.5);
  const Tableau& ssp = registry_get("ssprk33");
  const auto samples = cli::default_growth_samples("kepler", 500.0);
  IntegrateOptions on_h;
  IntegrateOptions on_l;
  on_l.invariant = "angular-momentum";
  const GrowthFit kh = error_growth_fit(kp, &ssp, Scheme::Relaxation, 0.01, 500.0, samples, on_h);
  const GrowthFit kl = error_growth_fit(kp, &ssp, Scheme::Relaxation, 0.01, 500.0, samples, on_l);
  const GrowthFit kb = error_growth_fit(kp, &ssp, Scheme::Baseline, 0.01, 500.0, samples);
  c.note("Kepler errors sampled at aphelion passages t = (k + 1/2) 2 pi");
  c.expect(std::abs(kh.exponent - 1.0) <= 0.3, fmt("Kepler relax-on-H exponent %.3f, expected 1 +- 0.3", kh.exponent));
  c.expect(std::abs(kl.exponent - 2.0) <= 0.3, fmt("Kepler relax-on-L exponent %.3f, expected 2 +- 0.3", kl.exponent));
  c.expect(std::abs(kb.exponent - 2.0) <= 0.3, fmt("Kepler baseline exponent %.3f, expected 2 +- 0.3", kb.exponent));
  const double secs = seconds_since(t0);
  c.expect(secs <= 300.0, fmt("runtime %.1f s <= 300 s", secs));
  return c.ok();
}

bool criterion_kdv(Checks& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const OdeProblem p = kdv_semidiscretization(128, -20.0, 60.0);
  const Tableau& t = registry_get("norsett23");
  const Trajectory rel = integrate(p, &t, Scheme::Relaxation, p.initial_state, 0.0, 200.0, 0.5);
  const Trajectory proj = integrate(p, &t, Scheme::Projection, p.initial_state, 0.0, 200.0, 0.5);
  const Trajectory base = integrate(p, &t, Scheme::Baseline, p.initial_state, 0.0, 200.0, 0.5);

  auto rel_drift = [](const std::vector<double>& h) {
    double m = 0.0;
    for (double v : h) m = std::max(m, std::abs(v - h.front()) / std::abs(h.front()));
    return m;
  };
  const double re = rel_drift(rel.series("energy")), rm = rel_drift(rel.series("mass"));
  const double pe = rel_drift(proj.series("energy")), pm = rel_drift(proj.series("mass"));
  c.expect(re <= 1e-9, fmt("relaxation energy drift %.2e <= 1e-9", re));
  c.expect(rm <= 1e-9, fmt("relaxation mass drift %.2e <= 1e-9", rm));
  c.expect(pe <= 1e-9, fmt("projection energy drift %.2e <= 1e-9", pe));
  c.expect(pm >= 100.0 * rm, fmt("projection mass drift %.2e >= 100 x relaxation's %.2e", pm, rm));
  const auto& be = base.series("energy");
  bool monotone = true;
  for (std::size_t k = 1; k < be.size(); ++k) monotone = monotone && be[k] <= be[k - 1];
  c.expect(monotone && be.back() < be.front(),
           fmt("baseline energy decays monotonically (%.6f -> %.6f)", be.front(), be.back()));
  const double err_rel = state_error(p, rel.times.back(), rel.states.back());
  const double err_base = state_error(p, base.times.back(), base.states.back());
  c.expect(3.0 * err_rel <= err_base,
           fmt("final soliton error relaxation %.3e, baseline %.3e (ratio %.1f >= 3)", err_rel, err_base,
               err_base / err_rel));
  const double secs = seconds_since(t0);
  c.expect(secs <= 600.0, fmt("runtime %.1f s <= 600 s", secs));
  return c.ok();
}

bool criterion_phase_volume(Checks& c) {
  const OdeProblem p = harmonic_oscillator();
  const Tableau& t = registry_get("rk44");
  const auto cloud = disk_cloud(p.initial_state, 1e-3, 200, kDefaultCloudSeed);
  const double dt = 0.25, t_end = 200.0;
  const VolumeSeries base = volume_series(Stepper(p, &t, Scheme::Baseline), cloud, dt, t_end, 4);
  const VolumeSeries rel = volume_series(Stepper(p, &t, Scheme::Relaxation), cloud, dt, t_end, 4);
  const VolumeSeries se = volume_series(Stepper(p, nullptr, Scheme::SymplecticEuler), cloud, dt, t_end, 4);
  const double sb = base.fit.slope, sr = rel.fit.slope, ss = se.fit.slope;
  c.note(fmt("area-change slopes: baseline %.3e, relaxation %.3e, symplectic Euler %.3e", sb, sr, ss));
  c.expect(std::abs(sr) <= 1e-10, fmt("|relaxation slope| %.2e <= 1e-10", std::abs(sr)));
  c.expect(std::abs(sr) <= std::abs(sb) / 100.0, fmt("|relaxation slope| <= |baseline slope| / 100 = %.2e", std::abs(sb) / 100));
  c.expect(std::abs(ss) <= 1e-10, fmt("|symplectic Euler slope| %.2e <= 1e-10", std::abs(ss)));
  return c.ok();
}

bool criterion_identities(Checks& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sweep = lemma_a2_sweep(12);
  bool exact = true;
  for (const auto& k : sweep) exact = exact && k.exact && k.residual == 0.0;
  c.expect(exact, "alternating factorial identity exact for all " + std::to_string(sweep.size()) +
                      " admissible (s, m), s <= 12");
  const GammaAsymptotics g =
      gamma_asymptotic_check(registry_get("heun3"), harmonic_oscillator(), {0.1, 0.05, 0.025, 0.0125});
  c.expect(std::abs(g.exponent - 2.0) <= 0.1, fmt("heun3 gamma - 1 exponent %.4f, expected 2 +- 0.1", g.exponent));
  c.expect(g.applicable && g.relative_deviation <= 0.05,
           fmt("leading constant %.6f vs predicted %.6f (deviation %.2f%%)", g.constant, g.predicted_constant,
               100 * g.relative_deviation));
  const double secs = seconds_since(t0);
  c.expect(secs <= 5.0, fmt("runtime %.2f s <= 5 s", secs));
  return c.ok();
}

bool criterion_oracles(Checks& c) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), dts(0.02, 0.5);
  std::normal_distribution<double> nd;

  // closed-form gamma against the root solve on random skew systems
  const std::vector<std::string> methods = {"heun3", "rk44", "ssprk33", "ssprk22", "bs85", "dp75", "norsett23"};
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    Matrix M(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) M(i, j) = nd(rng);
    const Matrix L = M - M.transpose();
    OdeProblem p;
    p.name = "skew";
    p.dim = 4;
    p.rhs = [L](double, const Vector& u) -> Vector { return L * u; };
    p.jacobian = [L](double, const Vector&) -> Matrix { return L; };
    Invariant h;
    h.name = "energy";
    h.value = [](const Vector& u) { return 0.5 * u.squaredNorm(); };
    h.gradient = [](const Vector& u) -> Vector { return u; };
    h.quadratic_weight = 1.0;
    p.invariants.push_back(h);
    Vector u(4);
    for (int i = 0; i < 4; ++i) u(i) = unit(rng);
    const double dt = dts(rng);
    const Tableau& t = registry_get(methods[k % methods.size()]);
    const RkStepResult rk = rk_step(p, t, 0.0, u, dt);
    const double closed = gamma_quadratic_closed_form(rk.stage_derivatives, t.b, t.A);
    const double root = gamma_root_solve(p.invariants[0], u, rk.direction, dt).gamma;
    worst = std::max(worst, std::abs(closed - root));
  }
  c.expect(worst <= 1e-11, fmt("closed-form vs root-solved gamma, 100 random steps: max diff %.2e <= 1e-11", worst));

  // projection onto a quadratic invariant is radial rescaling
  const OdeProblem osc = harmonic_oscillator(2);
  double worst_proj = 0.0;
  for (int k = 0; k < 100; ++k) {
    Vector u(4);
    for (int i = 0; i < 4; ++i) u(i) = unit(rng);
    const Tableau& t = registry_get(methods[k % methods.size()]);
    const double dt = dts(rng);
    const Vector plus = rk_step(osc, t, 0.0, u, dt).u_plus;
    const Vector radial = plus * (u.norm() / plus.norm());
    const StepOutcome out = projection_step(osc, t, "energy", 0.0, u, dt);
    worst_proj = std::max(worst_proj, (out.u_next - radial).norm() / u.norm());
  }
  c.expect(worst_proj <= 1e-12, fmt("projection vs radial rescale: max diff %.2e <= 1e-12", worst_proj));

  // DIRK stability functions against determinant / closed-form oracles
  std::vector<std::complex<double>> zs;
  std::uniform_real_distribution<double> re(-4.0, 0.5), im(-3.0, 3.0);
  for (int k = 0; k < 20; ++k) zs.emplace_back(re(rng), im(rng));
  auto by_step = [](const Tableau& t, std::complex<double> z) {
    OdeProblem p;
    p.name = "dahlquist";
    p.dim = 2;
    Matrix L(2, 2);
    L << z.real(), -z.imag(), z.imag(), z.real();
    p.rhs = [L](double, const Vector& u) -> Vector { return L * u; };
    p.jacobian = [L](double, const Vector&) -> Matrix { return L; };
    Vector u0(2);
    u0 << 1.0, 0.0;
    const Vector r = rk_step(p, t, 0.0, u0, 1.0).u_plus;
    return std::complex<double>(r(0), r(1));
  };
  auto by_det = [](const Tableau& t, std::complex<double> z) {
    const Eigen::Index s = t.stages();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(s, s);
    const Eigen::MatrixXcd A = t.A.cast<std::complex<double>>();
    const Eigen::MatrixXcd ebT = Eigen::VectorXcd::Ones(s) * t.b.cast<std::complex<double>>().transpose();
    return (I - z * A + z * ebT).determinant() / (I - z * A).determinant();
  };
  const double g = (3.0 + std::sqrt(3.0)) / 6.0;
  double worst_R = 0.0;
  for (const auto z : zs) {
    const auto closed = (1.0 + (1.0 - 2.0 * g) * z + (g * g - 2.0 * g + 0.5) * z * z) / ((1.0 - g * z) * (1.0 - g * z));
    worst_R = std::max(worst_R, std::abs(by_step(registry_get("norsett23"), z) - closed));
    for (const char* m : {"sdirk34", "sdirk54"}) {
      const auto R = by_step(registry_get(m), z);
      worst_R = std::max(worst_R, std::abs(R - by_det(registry_get(m), z)) / std::max(1.0, std::abs(R)));
    }
  }
  c.expect(worst_R <= 1e-12, fmt("DIRK stability function at 20 points: max diff %.2e <= 1e-12", worst_R));
  return c.ok();
}

bool criterion_nbody(Checks& c) {
  const NBodySetup solar = outer_solar_system();
  const Tableau& ssp = registry_get("ssprk22");
  const Trajectory sb = integrate(solar.problem, &ssp, Scheme::Baseline, solar.problem.initial_state, 0.0, 20000.0, 200.0);
  const Trajectory sr = integrate(solar.problem, &ssp, Scheme::Relaxation, solar.problem.initial_state, 0.0, 20000.0, 200.0);
  const double db = cli::max_drift_relative_to_initial(sb.series("energy"));
  const double dr = cli::max_drift_relative_to_initial(sr.series("energy"));
  c.note("solar drifts measured relative to |H0|");
  c.expect(db >= 1e-5, fmt("solar baseline |H drift| %.2e >= 1e-5", db));
  c.expect(dr <= 1e-10, fmt("solar relaxation |H drift| %.2e <= 1e-10", dr));

  const NBodySetup argon = argon_crystal();
  const Tableau& rk4 = registry_get("rk44");
  const double dt = 1e-4, t_end = 0.2;
  const Trajectory ab = integrate(argon.problem, &rk4, Scheme::Baseline, argon.problem.initial_state, 0.0, t_end, dt);
  const Trajectory ar = integrate(argon.problem, &rk4, Scheme::Relaxation, argon.problem.initial_state, 0.0, t_end, dt);
  const double har = cli::max_drift_relative_to_initial(ar.series("energy"));
  c.expect(har <= 1e-10, fmt("argon relaxation energy drift %.2e <= 1e-10", har));
  const TemperatureSeries tb = temperature_series(ab, argon.masses, argon.boltzmann, argon.space_dim);
  const TemperatureSeries tr = temperature_series(ar, argon.masses, argon.boltzmann, argon.space_dim);
  const double ratio = std::abs(tb.drift.slope) / std::abs(tr.drift.slope);
  c.note(fmt("argon dt = %.0e ns, initial temperature %.2f K", dt, tr.temperature.front()));
  c.expect(ratio >= 10.0, fmt("temperature slope baseline %.3e K/ns, relaxation %.3e K/ns, ratio %.1f >= 10",
                              tb.drift.slope, tr.drift.slope, ratio));
  return c.ok();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool criterion_determinism(Checks& c) {
  const auto dir = std::filesystem::temp_directory_path() / "rrk_acceptance_determinism";
  std::filesystem::create_directories(dir);
  struct Case {
    const char* experiment;
    nlohmann::json flags;
  };
  const std::vector<Case> cases = {
      {"integrate", nlohmann::json::object()},
      {"volume", {{"t-end", 50.0}}},
      {"volume", {{"t-end", 50.0}, {"seed", 12345}}},
      {"poincare", {{"t-end", 500.0}}},
      {"converge", nlohmann::json::object()},
      {"lemma-a2", nlohmann::json::object()},
  };
  int idx = 0;
  for (const auto& k : cases) {
    std::vector<std::vector<std::string>> runs;
    for (int rep = 0; rep < 2; ++rep) {
      nlohmann::json flags = k.flags;
      flags["output"] = (dir / ("case" + std::to_string(idx) + "_" + std::to_string(rep))).string();
      const cli::ExperimentReport r = cli::run(cli::resolve_spec(k.experiment, nlohmann::json::object(), flags));
      cli::write_report(r);
      std::vector<std::string> texts;
      for (const auto& path : cli::csv_paths(r)) texts.push_back(slurp(path));
      runs.push_back(std::move(texts));
    }
    c.expect(!runs[0].empty() && runs[0] == runs[1],
             std::string(k.experiment) + " " + k.flags.dump() + ": repeated runs give byte-identical CSV");
    ++idx;
  }
  return c.ok();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<bool(Checks&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "conservation", criterion_conservation},
      {2, "superconvergence", criterion_superconvergence},
      {3, "error growth", criterion_error_growth},
      {4, "KdV soliton", criterion_kdv},
      {5, "phase volume", criterion_phase_volume},
      {6, "exact identities and gamma asymptotics", criterion_identities},
      {7, "oracle equivalence", criterion_oracles},
      {8, "N-body", criterion_nbody},
      {9, "determinism", criterion_determinism},
  };
  int failures = 0;
  for (const auto& k : criteria) {
    std::printf("criterion %d (%s)\n", k.id, k.title);
    std::fflush(stdout);
    Checks checks;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ok = k.run(checks);
    } catch (const std::exception& e) {
      std::printf("    [FAIL] exception: %s\n", e.what());
      ok = false;
    }
    std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", k.id, k.title, seconds_since(t0));
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
