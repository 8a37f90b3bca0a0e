#include "rrk/integrators.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace rrk {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw Error(ErrorKind::NonFiniteState, what);
}

bool degenerate_direction(const Vector& u, const Vector& d, double dt) {
  return dt * d.norm() <= kEps * std::max(1.0, u.norm());
}

}  // namespace

RkStepResult rk_step_explicit(const OdeProblem& problem, const Tableau& tableau, double tn, const Vector& u,
                              double dt) {
  if (!tableau.is_explicit()) throw Error(ErrorKind::NotExplicit, tableau.name + " is not explicit");
  const Eigen::Index s = tableau.stages();
  RkStepResult out;
  out.stage_derivatives.resize(u.size(), s);
  Vector y(u.size());
  for (Eigen::Index i = 0; i < s; ++i) {
    y = u;
    for (Eigen::Index j = 0; j < i; ++j) {
      if (tableau.A(i, j) != 0.0) y.noalias() += (dt * tableau.A(i, j)) * out.stage_derivatives.col(j);
    }
    out.stage_derivatives.col(i) = problem.rhs(tn + tableau.c(i) * dt, y);
    require_finite(out.stage_derivatives.col(i), "stage derivative");
  }
  out.direction = out.stage_derivatives * tableau.b;
  out.u_plus = u + dt * out.direction;
  require_finite(out.u_plus, "step result");
  return out;
}

RkStepResult dirk_step(const OdeProblem& problem, const Tableau& tableau, double tn, const Vector& u, double dt,
                       const NewtonOptions& newton) {
  const Eigen::Index s = tableau.stages();
  const Eigen::Index n = u.size();
  RkStepResult out;
  out.stage_derivatives.resize(n, s);
  const Matrix identity = Matrix::Identity(n, n);

  for (Eigen::Index i = 0; i < s; ++i) {
    const double ti = tn + tableau.c(i) * dt;
    Vector known = u;
    for (Eigen::Index j = 0; j < i; ++j) {
      if (tableau.A(i, j) != 0.0) known.noalias() += (dt * tableau.A(i, j)) * out.stage_derivatives.col(j);
    }
    const double diag = dt * tableau.A(i, i);
    Vector y = known;
    if (diag == 0.0) {
      out.stage_derivatives.col(i) = problem.rhs(ti, y);
      require_finite(out.stage_derivatives.col(i), "stage derivative");
      continue;
    }

    Vector fy = problem.rhs(ti, y);
    int iters = 0;
    double residual = std::numeric_limits<double>::infinity();
    while (iters < newton.max_iter) {
      ++iters;
      const Vector g = y - known - diag * fy;
      const Matrix jf = problem.jacobian ? problem.jacobian(ti, y) : finite_difference_jacobian(problem.rhs, ti, y);
      const Matrix jg = identity - diag * jf;
      y -= jg.partialPivLu().solve(g);
      require_finite(y, "Newton iterate");
      fy = problem.rhs(ti, y);
      require_finite(fy, "stage derivative");
      residual = (y - known - diag * fy).lpNorm<Eigen::Infinity>();
      if (residual <= newton.tol) break;
    }
    if (!(residual <= newton.tol)) {
      throw Error(ErrorKind::NewtonDivergence, "stage " + std::to_string(i + 1) + " residual " +
                                                   std::to_string(residual) + " after " +
                                                   std::to_string(iters) + " iterations");
    }
    out.newton_iterations += iters;
    out.max_stage_iterations = std::max(out.max_stage_iterations, iters);
    out.stage_derivatives.col(i) = fy;
  }
  out.direction = out.stage_derivatives * tableau.b;
  out.u_plus = u + dt * out.direction;
  require_finite(out.u_plus, "step result");
  return out;
}

RkStepResult rk_step(const OdeProblem& problem, const Tableau& tableau, double tn, const Vector& u, double dt,
                     const NewtonOptions& newton) {
  return tableau.is_explicit() ? rk_step_explicit(problem, tableau, tn, u, dt)
                               : dirk_step(problem, tableau, tn, u, dt, newton);
}

double gamma_quadratic_closed_form(const Matrix& stage_derivatives, const Vector& b, const Matrix& A) {
  const Matrix gram = stage_derivatives.transpose() * stage_derivatives;
  const double numerator = 2.0 * b.dot((A.cwiseProduct(gram)).rowwise().sum());
  const double denominator = b.dot(gram * b);
  if (!(denominator > kEps)) {
    throw Error(ErrorKind::DegenerateDirection, "sum_ij b_i b_j <f_i, f_j> vanishes");
  }
  return numerator / denominator;
}

GammaSolve gamma_root_solve(const Invariant& invariant, const Vector& u, const Vector& d, double dt, double tol) {
  const double h0 = invariant.value(u);
  const double scale = std::max(1.0, std::abs(h0));
  int evaluations = 0;
  Vector trial(u.size());
  auto residual = [&](double gamma) {
    ++evaluations;
    trial = u + (gamma * dt) * d;
    return invariant.value(trial) - h0;
  };

  const double r1 = residual(1.0);
  if (r1 == 0.0) return {1.0, evaluations};

  // Lower end never reaches the trivial root gamma = 0.
  constexpr double kLowest = 1e-2;
  double delta = 0.1;
  for (int expansion = 0; expansion <= 8; ++expansion, delta *= 2.0) {
    const double lo = std::max(1.0 - delta, kLowest);
    const double hi = 1.0 + delta;
    const double rlo = residual(lo);
    const double rhi = residual(hi);

    struct Candidate {
      double gamma;
      double res;
    };
    std::vector<Candidate> roots;
    auto refine = [&](double a, double b, double fa, double fb) {
      std::uintmax_t max_iter = 200;
      auto [x0, x1] = boost::math::tools::toms748_solve(residual, a, b, fa, fb,
                                                        boost::math::tools::eps_tolerance<double>(), max_iter);
      const double f0 = residual(x0);
      const double f1 = residual(x1);
      roots.push_back(std::abs(f0) <= std::abs(f1) ? Candidate{x0, f0} : Candidate{x1, f1});
    };
    if (std::signbit(rlo) != std::signbit(r1)) refine(lo, 1.0, rlo, r1);
    if (std::signbit(rhi) != std::signbit(r1)) refine(1.0, hi, r1, rhi);
    if (roots.empty()) continue;

    const auto best = std::min_element(roots.begin(), roots.end(), [](const Candidate& a, const Candidate& b) {
      return std::abs(a.gamma - 1.0) < std::abs(b.gamma - 1.0);
    });
    if (std::abs(best->res) > tol * scale) {
      throw Error(ErrorKind::ToleranceNotMet, "relaxation residual " + std::to_string(best->res));
    }
    return {best->gamma, evaluations};
  }

  // No sign change anywhere: the baseline step already conserves H to tolerance
  // (e.g. a direction tangent to the level set).
  if (std::abs(r1) <= tol * scale) return {1.0, evaluations};
  throw Error(ErrorKind::BracketFailure,
              "no sign change of H(u + gamma dt d) - H(u) in [" + std::to_string(std::max(1.0 - delta / 2, kLowest)) +
                  ", " + std::to_string(1.0 + delta / 2) + "], r(1) = " + std::to_string(r1));
}

StepOutcome baseline_step(const OdeProblem& problem, const Tableau& tableau, double tn, const Vector& u, double dt,
                          const StepOptions& options) {
  RkStepResult rk = rk_step(problem, tableau, tn, u, dt, options.newton);
  return {std::move(rk.u_plus), 1.0, dt, rk.newton_iterations, 0};
}

StepOutcome rrk_step(const OdeProblem& problem, const Tableau& tableau, const std::string& invariant_name, double tn,
                     const Vector& u, double dt, const StepOptions& options) {
  const Invariant& inv = problem.invariant(invariant_name);
  RkStepResult rk = rk_step(problem, tableau, tn, u, dt, options.newton);

  StepOutcome out;
  out.newton_iterations = rk.newton_iterations;
  if (degenerate_direction(u, rk.direction, dt)) {
    out.gamma = 1.0;
  } else if (options.gamma_mode == GammaMode::QuadraticClosedForm) {
    if (!inv.is_quadratic()) {
      throw Error(ErrorKind::PreconditionViolated, "closed-form relaxation needs a quadratic invariant, got " +
                                                       inv.name);
    }
    out.gamma = gamma_quadratic_closed_form(rk.stage_derivatives, tableau.b, tableau.A);
  } else {
    const GammaSolve solve = gamma_root_solve(inv, u, rk.direction, dt, options.gamma_tol);
    out.gamma = solve.gamma;
    out.gamma_solver_iterations = solve.iterations;
  }
  if (!(out.gamma > 0.0 && out.gamma < 2.0)) {
    throw Error(ErrorKind::BracketFailure, "relaxation parameter " + std::to_string(out.gamma) +
                                               " outside (0, 2); reduce dt");
  }
  out.u_next = u + (out.gamma * dt) * rk.direction;
  out.dt_effective = out.gamma * dt;
  return out;
}

StepOutcome projection_step(const OdeProblem& problem, const Tableau& tableau, const std::string& invariant_name,
                            double tn, const Vector& u, double dt, const StepOptions& options) {
  const Invariant& inv = problem.invariant(invariant_name);
  RkStepResult rk = rk_step(problem, tableau, tn, u, dt, options.newton);

  const double h0 = inv.value(u);
  const double target = options.projection_tol * std::max(1.0, std::abs(h0));
  const Vector normal = invariant_gradient(inv, rk.u_plus);

  StepOutcome out;
  out.gamma = std::numeric_limits<double>::quiet_NaN();
  out.dt_effective = dt;
  out.newton_iterations = rk.newton_iterations;

  double lambda = 0.0;
  Vector x = rk.u_plus;
  double phi = inv.value(x) - h0;
  int iters = 0;
  while (std::abs(phi) > target) {
    if (iters == options.projection_max_iter) {
      throw Error(ErrorKind::NewtonDivergence, "projection residual " + std::to_string(phi));
    }
    ++iters;
    const double slope = invariant_gradient(inv, x).dot(normal);
    if (slope == 0.0 || !std::isfinite(slope)) {
      throw Error(ErrorKind::NewtonDivergence, "projection derivative vanished");
    }
    lambda -= phi / slope;
    x = rk.u_plus + lambda * normal;
    phi = inv.value(x) - h0;
  }
  out.gamma_solver_iterations = iters;
  out.u_next = std::move(x);
  return out;
}

Vector symplectic_euler_step(const OdeProblem& problem, double /*tn*/, const Vector& u, double dt) {
  if (!problem.partition) {
    throw Error(ErrorKind::NotPartitioned, problem.name + " has no canonical (q, p) partition");
  }
  const CanonicalPartition& part = *problem.partition;
  Vector next = u;
  // p update; implicit in p_{n+1} unless dH/dq ignores p.
  const Vector p_old = u(part.p_index);
  Vector dq = part.dH_dq(next);
  next(part.p_index) = p_old - dt * dq;
  if (!part.separable) {
    for (int it = 0; it < 100; ++it) {
      const Vector p_prev = next(part.p_index);
      dq = part.dH_dq(next);
      next(part.p_index) = p_old - dt * dq;
      if ((next(part.p_index) - p_prev).lpNorm<Eigen::Infinity>() <= 4 * kEps * std::max(1.0, p_prev.norm())) break;
    }
  }
  const Vector dp = part.dH_dp(next);
  next(part.q_index) = u(part.q_index) + dt * dp;
  require_finite(next, "symplectic Euler step");
  return next;
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Baseline: return "baseline";
    case Scheme::Relaxation: return "relaxation";
    case Scheme::Projection: return "projection";
    case Scheme::SymplecticEuler: return "symplectic-euler";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "baseline") return Scheme::Baseline;
  if (text == "relaxation") return Scheme::Relaxation;
  if (text == "projection") return Scheme::Projection;
  if (text == "symplectic-euler") return Scheme::SymplecticEuler;
  throw Error(ErrorKind::ConfigError, "unknown scheme '" + std::string(text) +
                                          "' (baseline, relaxation, projection, symplectic-euler)");
}

Stepper::Stepper(const OdeProblem& problem, const Tableau* tableau, Scheme scheme, std::string invariant,
                 StepOptions options)
    : problem_(&problem), tableau_(tableau), scheme_(scheme), invariant_(std::move(invariant)),
      options_(std::move(options)) {
  if (scheme_ == Scheme::SymplecticEuler) {
    if (!problem.partition) {
      throw Error(ErrorKind::NotPartitioned, problem.name + " has no canonical (q, p) partition");
    }
  } else if (tableau_ == nullptr) {
    throw Error(ErrorKind::PreconditionViolated, "Runge-Kutta schemes need a tableau");
  }
  if (scheme_ == Scheme::Relaxation || scheme_ == Scheme::Projection) {
    (void)problem.invariant(invariant_);
  }
}

StepOutcome Stepper::step(double tn, const Vector& u, double dt) const {
  switch (scheme_) {
    case Scheme::Baseline: return baseline_step(*problem_, *tableau_, tn, u, dt, options_);
    case Scheme::Relaxation: return rrk_step(*problem_, *tableau_, invariant_, tn, u, dt, options_);
    case Scheme::Projection: return projection_step(*problem_, *tableau_, invariant_, tn, u, dt, options_);
    case Scheme::SymplecticEuler: return {symplectic_euler_step(*problem_, tn, u, dt), 1.0, dt, 0, 0};
  }
  throw Error(ErrorKind::PreconditionViolated, "unknown scheme");
}

const std::vector<double>& Trajectory::series(std::string_view name) const {
  for (const auto& [key, values] : invariant_series) {
    if (key == name) return values;
  }
  throw Error(ErrorKind::UnknownInvariant, "no recorded series '" + std::string(name) + "'");
}

Trajectory integrate(const OdeProblem& problem, const Tableau* tableau, Scheme scheme, const Vector& u0, double t0,
                     double t_end, double dt, const IntegrateOptions& options) {
  if (!(t_end > t0)) throw Error(ErrorKind::PreconditionViolated, "t_end must exceed t0");
  if (!(dt > 0.0)) throw Error(ErrorKind::PreconditionViolated, "dt must be positive");

  const Stepper stepper(problem, tableau, scheme, options.invariant, options.step);

  Trajectory traj;
  const auto expected = static_cast<std::size_t>(std::ceil((t_end - t0) / dt)) + 2;
  traj.times.reserve(expected);
  traj.states.reserve(expected);
  traj.gammas.reserve(expected);
  for (const auto& inv : problem.invariants) {
    traj.invariant_series.emplace_back(inv.name, std::vector<double>{});
    traj.invariant_series.back().second.reserve(expected);
  }
  auto record = [&](double t, const Vector& u) {
    traj.times.push_back(t);
    traj.states.push_back(u);
    for (std::size_t k = 0; k < problem.invariants.size(); ++k) {
      traj.invariant_series[k].second.push_back(problem.invariants[k].value(u));
    }
  };

  record(t0, u0);
  const double slack = 1e-9 * dt;
  Vector u = u0;
  double t = t0;
  long n = 0;
  long full_steps = 0;
  while (t < t_end - slack) {
    const bool last = t + dt > t_end - slack;
    const double h = last ? t_end - t : dt;
    StepOutcome out;
    try {
      out = stepper.step(t, u, h);
    } catch (const Error& e) {
      throw e.with_step(n);
    }
    u = std::move(out.u_next);
    traj.newton_iterations += out.newton_iterations;
    if (scheme == Scheme::Relaxation) {
      t += out.dt_effective;
    } else if (last) {
      t = t_end;
    } else {
      ++full_steps;
      t = t0 + static_cast<double>(full_steps) * dt;
    }
    traj.gammas.push_back(out.gamma);
    record(t, u);
    ++n;
  }
  return traj;
}

}  // namespace rrk
