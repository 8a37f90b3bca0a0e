#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rrk/integrators.hpp"
#include "rrk/ode_problem.hpp"
#include "rrk/tableaux.hpp"

namespace rrk {

/// Ordinary least squares y = slope x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t samples = 0;
};

/// Needs at least two points with distinct x.
[[nodiscard]] LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// error_weight * |u - reference(t)|. Throws ReferenceUnavailable.
[[nodiscard]] double state_error(const OdeProblem& problem, double t, const Vector& u);

/// max_k |H_k - H_0| / max(1, |H_0|).
[[nodiscard]] double max_relative_drift(const std::vector<double>& series);

struct OrderFit {
  std::vector<double> dts;
  std::vector<double> errors;
  std::vector<double> final_times;
  std::pair<double, double> window{0.0, 0.0};  // dt range used by the fit
  std::size_t window_samples = 0;
  double slope = 0.0;
  double r_squared = 0.0;
  /// Enough in-window points and r^2 >= 0.98.
  bool reliable = false;
};

/// Fit over errors in (100 eps, 0.1).
[[nodiscard]] OrderFit fit_order(std::vector<double> dts, std::vector<double> errors);

/// Error at the final trajectory time against the reference evaluated there.
[[nodiscard]] OrderFit convergence_order(const OdeProblem& problem, const Tableau* tableau, Scheme scheme,
                                         const std::vector<double>& dts, double t_end,
                                         const IntegrateOptions& options = {});

struct GrowthFit {
  std::pair<double, double> window{0.0, 0.0};
  std::vector<double> times;   // actual trajectory times of the samples
  std::vector<double> errors;
  std::size_t window_samples = 0;
  double exponent = 0.0;
  double r_squared = 0.0;
};

inline constexpr double kSaturationError = 0.5;

/// Fits log(error) against log(t) on [0.2 t_end, t_end] without samples >= 0.5.
/// Throws SaturatedWindow when nothing usable remains.
[[nodiscard]] GrowthFit fit_growth(std::vector<double> times, std::vector<double> errors, double t_end);

/// sample_times empty: 200 logarithmically spaced times in [t_end / 1000, t_end].
/// Each sample uses the stored state whose time is nearest to it.
[[nodiscard]] GrowthFit error_growth_fit(const OdeProblem& problem, const Tableau* tableau, Scheme scheme,
                                         double dt, double t_end, std::vector<double> sample_times = {},
                                         const IntegrateOptions& options = {});

/// Same, on an existing trajectory.
[[nodiscard]] GrowthFit error_growth_fit(const OdeProblem& problem, const Trajectory& traj, double t_end,
                                         std::vector<double> sample_times = {});

enum class CrossingDirection { Positive, Negative, Both };

[[nodiscard]] std::string to_string(CrossingDirection direction);
[[nodiscard]] CrossingDirection parse_crossing_direction(std::string_view text);

struct SectionPlane {
  Eigen::Index plane_coord = 0;
  double plane_value = 0.0;
  std::pair<Eigen::Index, Eigen::Index> record{1, 3};
  CrossingDirection direction = CrossingDirection::Positive;
};

struct SectionPoint {
  double t = 0.0;
  Vector state;
  std::array<double, 2> coords{0.0, 0.0};
};

/// Advances a state by a step of the given size; used to land exactly on the plane.
using CrossingRefiner = std::function<std::pair<double, Vector>(double t, const Vector& u, double h)>;

/// Sign changes between consecutive stored states, located on the cubic
/// Hermite interpolant built from the states and rhs at both ends and polished
/// by Newton's method. With a refiner the crossing is then re-stepped from the
/// left state and the step size corrected by secant iterations, so the recorded
/// state is an actual step of the integrator.
[[nodiscard]] std::vector<SectionPoint> poincare_section(const Trajectory& traj, const OdeProblem& problem,
                                                         const SectionPlane& plane,
                                                         const CrossingRefiner& refiner = {});

/// Refiner taking one step of the given stepper.
[[nodiscard]] CrossingRefiner stepper_refiner(const Stepper& stepper);

using Point2 = std::array<double, 2>;

struct HullArea {
  double area = 0.0;
  bool degenerate = false;  // all points collinear
  std::size_t vertices = 0;
};

/// Monotone chain hull and shoelace area. Needs at least 3 points.
[[nodiscard]] HullArea convex_hull_area_2d(std::vector<Point2> points);

inline constexpr std::uint64_t kDefaultCloudSeed = 0x5EED;

/// Uniform samples in the disk of the given radius around center, perturbing
/// coordinates (c0, c1) only. Rejection sampling with a seeded mt19937_64.
[[nodiscard]] std::vector<Vector> disk_cloud(const Vector& center, double radius, std::size_t count,
                                             std::uint64_t seed = kDefaultCloudSeed, Eigen::Index c0 = 0,
                                             Eigen::Index c1 = 1);

struct VolumeSeries {
  std::vector<double> times;
  std::vector<double> areas;
  std::vector<double> relative_change;  // (area - area_0) / area_0
  LinearFit fit;                         // relative change against time
};

/// Steps all cloud members in lockstep and samples the hull of coordinates
/// (0, 1) every sample_stride steps, at the nominal time k dt.
[[nodiscard]] VolumeSeries volume_series(const Stepper& stepper, const std::vector<Vector>& cloud, double dt,
                                         double t_end, std::size_t sample_stride = 1);

struct TemperatureSeries {
  std::vector<double> times;
  std::vector<double> temperature;
  LinearFit drift;
};

/// T = sum_i |p_i|^2 / m_i / (N d k_B) with the momenta in the trailing N d entries.
[[nodiscard]] double kinetic_temperature(const Vector& state, const std::vector<double>& masses, double k_B,
                                         int space_dim);
[[nodiscard]] TemperatureSeries temperature_series(const Trajectory& traj, const std::vector<double>& masses,
                                                   double k_B, int space_dim);

struct LemmaA2Check {
  int s = 0;
  int m = 0;
  std::string lhs;  // exact fractions
  std::string rhs;
  bool exact = false;
  double residual = 0.0;
};

/// sum_n (-1)^n / ((m-n)! (m+n)!) over max(1-m, m-s) <= n <= min(m-1, s-m)
/// against -2 (-1)^m / (2m)!, in exact rationals. Needs 1 <= m, 2m <= s + 1.
[[nodiscard]] LemmaA2Check verify_lemma_a2(int s, int m);
/// Every admissible (s, m) with s <= max_s.
[[nodiscard]] std::vector<LemmaA2Check> lemma_a2_sweep(int max_s);

struct GammaAsymptotics {
  int order = 0;
  bool applicable = false;  // odd order: the leading constant is predicted
  std::vector<double> dts;
  std::vector<double> gamma_minus_one;
  double exponent = 0.0;
  double constant = 0.0;
  double predicted_constant = 0.0;
  double relative_deviation = 0.0;
  LinearFit fit;
};

/// Relaxation parameters of single steps from u0 on a linear skew problem
/// u' = L u with the quadratic invariant; fits |gamma - 1| = C dt^e. For odd p
/// the prediction is C = -2 (-1)^((p+1)/2) (alpha_{p+1} - 1/(p+1)!) |L^((p+1)/2) u0|^2 / |L u0|^2.
[[nodiscard]] GammaAsymptotics gamma_asymptotic_check(const Tableau& tableau, const OdeProblem& linear_problem,
                                                      const std::vector<double>& dts);

}  // namespace rrk
