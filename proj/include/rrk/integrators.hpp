#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rrk/ode_problem.hpp"
#include "rrk/tableaux.hpp"

namespace rrk {

/// Result of one unmodified Runge-Kutta step.
struct RkStepResult {
  Vector u_plus;
  Vector direction;           // d = sum_i b_i f_i
  Matrix stage_derivatives;   // column i holds f_i
  int newton_iterations = 0;  // total over all stages
  int max_stage_iterations = 0;
};

struct NewtonOptions {
  double tol = 1e-11;  // infinity norm of the stage residual
  int max_iter = 50;
};

[[nodiscard]] RkStepResult rk_step_explicit(const OdeProblem& problem, const Tableau& tableau, double tn,
                                            const Vector& u, double dt);

/// Diagonally implicit step; stages are solved in order by Newton's method
/// with the Jacobian refreshed every iteration.
[[nodiscard]] RkStepResult dirk_step(const OdeProblem& problem, const Tableau& tableau, double tn,
                                     const Vector& u, double dt, const NewtonOptions& newton = {});

/// Dispatches on the tableau kind.
[[nodiscard]] RkStepResult rk_step(const OdeProblem& problem, const Tableau& tableau, double tn,
                                   const Vector& u, double dt, const NewtonOptions& newton = {});

/// Relaxation parameter for H(u) = w/2 <u, u> from the stage derivatives:
///   gamma = 2 sum_ij b_i a_ij <f_i, f_j> / sum_ij b_i b_j <f_i, f_j>.
/// The weight w cancels. Valid when <y, f(y)> = 0, i.e. H is an invariant of the ODE.
[[nodiscard]] double gamma_quadratic_closed_form(const Matrix& stage_derivatives, const Vector& b,
                                                 const Matrix& A);

struct GammaSolve {
  double gamma = 1.0;
  int iterations = 0;
};

/// Root of r(gamma) = H(u + gamma dt d) - H(u) nearest to 1, excluding gamma = 0.
///
/// The search starts from [1 - 0.1, 1 + 0.1] and doubles the half-width up to
/// eight times until a sign change brackets a root, which is then refined to
/// machine precision. Throws BracketFailure or ToleranceNotMet.
[[nodiscard]] GammaSolve gamma_root_solve(const Invariant& invariant, const Vector& u, const Vector& d,
                                          double dt, double tol = 1e-13);

enum class GammaMode { RootFind, QuadraticClosedForm };

struct StepOutcome {
  Vector u_next;
  double gamma = 1.0;  // NaN for projection steps
  double dt_effective = 0.0;
  int newton_iterations = 0;
  int gamma_solver_iterations = 0;
};

struct StepOptions {
  GammaMode gamma_mode = GammaMode::RootFind;
  double gamma_tol = 1e-13;
  double projection_tol = 1e-13;
  int projection_max_iter = 50;
  NewtonOptions newton;
};

[[nodiscard]] StepOutcome baseline_step(const OdeProblem& problem, const Tableau& tableau, double tn,
                                        const Vector& u, double dt, const StepOptions& options = {});

/// u_next = u + gamma dt d with gamma chosen so the named invariant is unchanged.
[[nodiscard]] StepOutcome rrk_step(const OdeProblem& problem, const Tableau& tableau,
                                   const std::string& invariant_name, double tn, const Vector& u, double dt,
                                   const StepOptions& options = {});

/// Baseline step followed by an orthogonal correction u_plus + lambda grad H(u_plus).
[[nodiscard]] StepOutcome projection_step(const OdeProblem& problem, const Tableau& tableau,
                                          const std::string& invariant_name, double tn, const Vector& u,
                                          double dt, const StepOptions& options = {});

/// p_{n+1} = p_n - dt dH/dq(q_n, p_{n+1}),  q_{n+1} = q_n + dt dH/dp(q_n, p_{n+1}).
/// Throws NotPartitioned when the problem has no canonical split.
[[nodiscard]] Vector symplectic_euler_step(const OdeProblem& problem, double tn, const Vector& u, double dt);

enum class Scheme { Baseline, Relaxation, Projection, SymplecticEuler };

[[nodiscard]] std::string to_string(Scheme scheme);
/// Accepts baseline, relaxation, projection, symplectic-euler.
[[nodiscard]] Scheme parse_scheme(std::string_view text);

/// One configured time stepper; immutable and shareable between runs.
class Stepper {
 public:
  /// tableau may be null only for the symplectic Euler scheme.
  Stepper(const OdeProblem& problem, const Tableau* tableau, Scheme scheme, std::string invariant = "energy",
          StepOptions options = {});

  [[nodiscard]] StepOutcome step(double tn, const Vector& u, double dt) const;

  [[nodiscard]] Scheme scheme() const noexcept { return scheme_; }
  [[nodiscard]] const OdeProblem& problem() const noexcept { return *problem_; }

 private:
  const OdeProblem* problem_;
  const Tableau* tableau_;
  Scheme scheme_;
  std::string invariant_;
  StepOptions options_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> gammas;  // one per step
  std::vector<std::pair<std::string, std::vector<double>>> invariant_series;
  long newton_iterations = 0;

  [[nodiscard]] std::size_t steps() const noexcept { return gammas.size(); }
  [[nodiscard]] const std::vector<double>& series(std::string_view name) const;
};

struct IntegrateOptions {
  std::string invariant = "energy";
  StepOptions step;
};

/// Fixed-step integration from t0 to t_end.
///
/// Baseline and projection runs land on t_end with a shortened last step. For
/// relaxation the grid is t_{k+1} = t_k + gamma_k dt and the run stops at the
/// first time within one step of t_end. Errors carry the failing step index.
[[nodiscard]] Trajectory integrate(const OdeProblem& problem, const Tableau* tableau, Scheme scheme,
                                   const Vector& u0, double t0, double t_end, double dt,
                                   const IntegrateOptions& options = {});

}  // namespace rrk
