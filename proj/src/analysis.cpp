#include "rrk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "rrk/errors.hpp"

namespace rrk {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string strip_kind(const Error& e) {
  const std::string what = e.what();
  const auto colon = what.find(": ");
  return colon == std::string::npos ? what : what.substr(colon + 2);
}

/// Exact fraction over 128-bit integers, always reduced with a positive denominator.
class Rational {
 public:
  using Int = __int128;

  Rational(Int num = 0, Int den = 1) : num_(num), den_(den) {
    if (den_ == 0) throw Error(ErrorKind::PreconditionViolated, "zero denominator");
    normalize();
  }

  Rational operator+(const Rational& o) const {
    const Int g = gcd(den_, o.den_);
    return Rational(num_ * (o.den_ / g) + o.num_ * (den_ / g), den_ / g * o.den_);
  }
  Rational operator-(const Rational& o) const { return *this + Rational(-o.num_, o.den_); }
  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }

  [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  [[nodiscard]] std::string str() const { return den_ == 1 ? int_str(num_) : int_str(num_) + "/" + int_str(den_); }

 private:
  static Int abs(Int v) { return v < 0 ? -v : v; }
  static Int gcd(Int a, Int b) {
    a = abs(a);
    b = abs(b);
    while (b != 0) {
      const Int r = a % b;
      a = b;
      b = r;
    }
    return a == 0 ? 1 : a;
  }
  static std::string int_str(Int v) {
    if (v == 0) return "0";
    const bool negative = v < 0;
    std::string digits;
    for (Int w = abs(v); w > 0; w /= 10) digits.push_back(static_cast<char>('0' + static_cast<int>(w % 10)));
    if (negative) digits.push_back('-');
    return {digits.rbegin(), digits.rend()};
  }
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const Int g = gcd(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  Int num_;
  Int den_;
};

Rational::Int factorial(int n) {
  Rational::Int f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

/// Index of the stored time nearest to t; times are increasing.
std::size_t nearest_index(const std::vector<double>& times, double t) {
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return times.size() - 1;
  const auto hi = static_cast<std::size_t>(it - times.begin());
  return (t - times[hi - 1] <= times[hi] - t) ? hi - 1 : hi;
}

struct Hermite {
  const Vector& y0;
  const Vector& y1;
  const Vector& f0;
  const Vector& f1;
  double h;

  [[nodiscard]] Vector value(double s) const {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + ((s3 - 2 * s2 + s) * h) * f0 + (-2 * s3 + 3 * s2) * y1 +
           ((s3 - s2) * h) * f1;
  }
  [[nodiscard]] double component(Eigen::Index c, double s) const {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0(c) + (s3 - 2 * s2 + s) * h * f0(c) + (-2 * s3 + 3 * s2) * y1(c) +
           (s3 - s2) * h * f1(c);
  }
  [[nodiscard]] double slope(Eigen::Index c, double s) const {
    const double s2 = s * s;
    return (6 * s2 - 6 * s) * y0(c) + (3 * s2 - 4 * s + 1) * h * f0(c) + (-6 * s2 + 6 * s) * y1(c) +
           (3 * s2 - 2 * s) * h * f1(c);
  }
};

}  // namespace

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::PreconditionViolated, "linear fit needs at least two paired samples");
  }
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::PreconditionViolated, "linear fit needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.samples = x.size();
  return fit;
}

double state_error(const OdeProblem& problem, double t, const Vector& u) {
  if (!problem.has_reference()) {
    throw Error(ErrorKind::ReferenceUnavailable, problem.name + " has no reference solution");
  }
  return problem.error_weight * (u - problem.analytic_solution(t)).norm();
}

double max_relative_drift(const std::vector<double>& series) {
  if (series.empty()) return 0.0;
  const double scale = std::max(1.0, std::abs(series.front()));
  double worst = 0.0;
  for (double v : series) worst = std::max(worst, std::abs(v - series.front()) / scale);
  return worst;
}

OrderFit fit_order(std::vector<double> dts, std::vector<double> errors) {
  if (dts.size() != errors.size()) throw Error(ErrorKind::PreconditionViolated, "dts and errors differ in length");
  OrderFit out;
  out.dts = std::move(dts);
  out.errors = std::move(errors);
  std::vector<double> x, y;
  for (std::size_t k = 0; k < out.dts.size(); ++k) {
    const double e = out.errors[k];
    if (e > 100.0 * kEps && e < 0.1) {
      x.push_back(std::log(out.dts[k]));
      y.push_back(std::log(e));
    }
  }
  out.window_samples = x.size();
  if (x.size() >= 2) {
    const LinearFit fit = linear_fit(x, y);
    out.slope = fit.slope;
    out.r_squared = fit.r_squared;
    out.window = {std::exp(*std::min_element(x.begin(), x.end())), std::exp(*std::max_element(x.begin(), x.end()))};
  }
  out.reliable = x.size() >= 3 && out.r_squared >= 0.98;
  return out;
}

OrderFit convergence_order(const OdeProblem& problem, const Tableau* tableau, Scheme scheme,
                           const std::vector<double>& dts, double t_end, const IntegrateOptions& options) {
  if (!problem.has_reference()) {
    throw Error(ErrorKind::ReferenceUnavailable, problem.name + " has no reference solution");
  }
  std::vector<double> errors, finals;
  for (double dt : dts) {
    const Trajectory traj = integrate(problem, tableau, scheme, problem.initial_state, problem.t0, t_end, dt, options);
    finals.push_back(traj.times.back());
    errors.push_back(state_error(problem, traj.times.back(), traj.states.back()));
  }
  OrderFit fit = fit_order(dts, std::move(errors));
  fit.final_times = std::move(finals);
  return fit;
}

GrowthFit fit_growth(std::vector<double> times, std::vector<double> errors, double t_end) {
  if (times.size() != errors.size()) throw Error(ErrorKind::PreconditionViolated, "times and errors differ in length");
  GrowthFit out;
  out.window = {0.2 * t_end, t_end};
  std::vector<double> x, y;
  std::size_t saturated = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < out.window.first || times[k] > out.window.second * (1.0 + 1e-12)) continue;
    if (errors[k] >= kSaturationError) {
      ++saturated;
      continue;
    }
    if (!(errors[k] > 0.0)) continue;
    x.push_back(std::log(times[k]));
    y.push_back(std::log(errors[k]));
  }
  out.times = std::move(times);
  out.errors = std::move(errors);
  out.window_samples = x.size();
  if (x.size() < 2) {
    if (saturated > 0) {
      throw Error(ErrorKind::SaturatedWindow, std::to_string(saturated) + " late samples reach error 0.5");
    }
    throw Error(ErrorKind::PreconditionViolated, "fewer than two samples inside the growth window");
  }
  const LinearFit fit = linear_fit(x, y);
  out.exponent = fit.slope;
  out.r_squared = fit.r_squared;
  return out;
}

GrowthFit error_growth_fit(const OdeProblem& problem, const Trajectory& traj, double t_end,
                           std::vector<double> sample_times) {
  if (!problem.has_reference()) {
    throw Error(ErrorKind::ReferenceUnavailable, problem.name + " has no reference solution");
  }
  if (sample_times.empty()) {
    constexpr int kSamples = 200;
    const double lo = std::log(t_end / 1000.0);
    const double hi = std::log(t_end);
    for (int k = 0; k < kSamples; ++k) sample_times.push_back(std::exp(lo + (hi - lo) * k / (kSamples - 1)));
  }
  std::vector<double> times, errors;
  std::size_t last = traj.times.size();
  for (double s : sample_times) {
    const std::size_t k = nearest_index(traj.times, s);
    if (k == last) continue;  // several samples mapped onto one state
    last = k;
    times.push_back(traj.times[k]);
    errors.push_back(state_error(problem, traj.times[k], traj.states[k]));
  }
  return fit_growth(std::move(times), std::move(errors), t_end);
}

GrowthFit error_growth_fit(const OdeProblem& problem, const Tableau* tableau, Scheme scheme, double dt,
                           double t_end, std::vector<double> sample_times, const IntegrateOptions& options) {
  if (!problem.has_reference()) {
    throw Error(ErrorKind::ReferenceUnavailable, problem.name + " has no reference solution");
  }
  const Trajectory traj = integrate(problem, tableau, scheme, problem.initial_state, problem.t0, t_end, dt, options);
  return error_growth_fit(problem, traj, t_end, std::move(sample_times));
}

std::string to_string(CrossingDirection direction) {
  switch (direction) {
    case CrossingDirection::Positive: return "positive";
    case CrossingDirection::Negative: return "negative";
    case CrossingDirection::Both: return "both";
  }
  return "unknown";
}

CrossingDirection parse_crossing_direction(std::string_view text) {
  if (text == "positive") return CrossingDirection::Positive;
  if (text == "negative") return CrossingDirection::Negative;
  if (text == "both") return CrossingDirection::Both;
  throw Error(ErrorKind::ConfigError, "unknown crossing direction '" + std::string(text) + "' (positive, negative, both)");
}

std::vector<SectionPoint> poincare_section(const Trajectory& traj, const OdeProblem& problem,
                                           const SectionPlane& plane, const CrossingRefiner& refiner) {
  std::vector<SectionPoint> points;
  const Eigen::Index c = plane.plane_coord;
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const Vector& y0 = traj.states[k];
    const Vector& y1 = traj.states[k + 1];
    const double s0 = y0(c) - plane.plane_value;
    const double s1 = y1(c) - plane.plane_value;
    const bool up = s0 < 0.0 && s1 >= 0.0;
    const bool down = s0 > 0.0 && s1 <= 0.0;
    if (!(up || down)) continue;
    if ((plane.direction == CrossingDirection::Positive && !up) ||
        (plane.direction == CrossingDirection::Negative && !down)) {
      continue;
    }

    const double t0 = traj.times[k];
    const double h = traj.times[k + 1] - t0;
    const Vector f0 = problem.rhs(t0, y0);
    const Vector f1 = problem.rhs(t0 + h, y1);
    const Hermite interp{y0, y1, f0, f1, h};

    // Newton on the interpolant, safeguarded to stay inside the bracket.
    double lo = 0.0, hi = 1.0;
    double s = s0 / (s0 - s1);
    for (int it = 0; it < 50; ++it) {
      const double r = interp.component(c, s) - plane.plane_value;
      if (std::abs(r) <= 4.0 * kEps * std::max(1.0, std::abs(plane.plane_value))) break;
      if ((r < 0.0) == up) {
        lo = s;
      } else {
        hi = s;
      }
      const double d = interp.slope(c, s);
      double next = (d != 0.0) ? s - r / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) <= 4.0 * kEps) {
        s = next;
        break;
      }
      s = next;
    }

    SectionPoint pt;
    pt.t = t0 + s * h;
    pt.state = interp.value(s);

    if (refiner) {
      // Secant on the step size of a fresh step from the left state.
      const double slope_guess = pt.state.size() > 0 ? problem.rhs(pt.t, pt.state)(c) : 0.0;
      double ha = s * h;
      auto [ta, ua] = refiner(t0, y0, ha);
      double ga = ua(c) - plane.plane_value;
      double hb = slope_guess != 0.0 ? ha - ga / slope_guess : ha;
      if (hb != ha && std::abs(ga) > 0.0) {
        auto [tb, ub] = refiner(t0, y0, hb);
        double gb = ub(c) - plane.plane_value;
        for (int it = 0; it < 30 && gb != 0.0 && gb != ga; ++it) {
          if (std::abs(gb) <= 4.0 * kEps * std::max(1.0, std::abs(plane.plane_value))) break;
          const double hn = hb - gb * (hb - ha) / (gb - ga);
          ha = hb;
          ga = gb;
          hb = hn;
          std::tie(tb, ub) = refiner(t0, y0, hb);
          gb = ub(c) - plane.plane_value;
        }
        if (std::abs(gb) <= std::abs(ga)) {
          ta = tb;
          ua = ub;
        }
      }
      pt.t = ta;
      pt.state = ua;
    }
    pt.coords = {pt.state(plane.record.first), pt.state(plane.record.second)};
    points.push_back(std::move(pt));
  }
  return points;
}

CrossingRefiner stepper_refiner(const Stepper& stepper) {
  return [&stepper](double t, const Vector& u, double h) -> std::pair<double, Vector> {
    if (h <= 0.0) return {t, u};
    StepOutcome out = stepper.step(t, u, h);
    return {t + out.dt_effective, std::move(out.u_next)};
  };
}

HullArea convex_hull_area_2d(std::vector<Point2> points) {
  if (points.size() < 3) throw Error(ErrorKind::PreconditionViolated, "convex hull needs at least 3 points");
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };

  std::vector<Point2> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k > 0 ? k - 1 : 0);

  HullArea out;
  out.vertices = hull.size();
  if (hull.size() < 3) {
    out.degenerate = true;
    return out;
  }
  // Fan from the first vertex keeps the sum translation invariant.
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < hull.size(); ++i) twice += cross(hull[0], hull[i], hull[i + 1]);
  out.area = 0.5 * twice;
  out.degenerate = !(out.area > 0.0);
  return out;
}

std::vector<Vector> disk_cloud(const Vector& center, double radius, std::size_t count, std::uint64_t seed,
                               Eigen::Index c0, Eigen::Index c1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Vector> cloud;
  cloud.reserve(count);
  while (cloud.size() < count) {
    const double a = unit(rng);
    const double b = unit(rng);
    if (a * a + b * b > 1.0) continue;
    Vector u = center;
    u(c0) += radius * a;
    u(c1) += radius * b;
    cloud.push_back(std::move(u));
  }
  return cloud;
}

VolumeSeries volume_series(const Stepper& stepper, const std::vector<Vector>& cloud, double dt, double t_end,
                           std::size_t sample_stride) {
  if (cloud.size() < 3) throw Error(ErrorKind::PreconditionViolated, "cloud needs at least 3 points");
  if (!(dt > 0.0) || !(t_end > 0.0)) throw Error(ErrorKind::PreconditionViolated, "dt and t_end must be positive");
  sample_stride = std::max<std::size_t>(sample_stride, 1);
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));

  std::vector<Vector> members = cloud;
  std::vector<double> clocks(members.size(), 0.0);
  std::vector<Point2> projected(members.size());
  VolumeSeries out;
  auto sample = [&](std::size_t step) {
    for (std::size_t i = 0; i < members.size(); ++i) projected[i] = {members[i](0), members[i](1)};
    out.times.push_back(static_cast<double>(step) * dt);
    out.areas.push_back(convex_hull_area_2d(projected).area);
    out.relative_change.push_back((out.areas.back() - out.areas.front()) / out.areas.front());
  };

  sample(0);
  if (!(out.areas.front() > 0.0)) throw Error(ErrorKind::PreconditionViolated, "initial cloud is degenerate");
  for (std::size_t step = 1; step <= steps; ++step) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      try {
        StepOutcome next = stepper.step(clocks[i], members[i], dt);
        clocks[i] += next.dt_effective;
        members[i] = std::move(next.u_next);
      } catch (const Error& e) {
        throw Error(e.kind(), "cloud point " + std::to_string(i) + ": " + strip_kind(e))
            .with_step(static_cast<long>(step - 1));
      }
    }
    if (step % sample_stride == 0 || step == steps) sample(step);
  }
  out.fit = linear_fit(out.times, out.relative_change);
  return out;
}

double kinetic_temperature(const Vector& state, const std::vector<double>& masses, double k_B, int space_dim) {
  const auto n = static_cast<Eigen::Index>(masses.size());
  const Eigen::Index np = n * space_dim;
  if (state.size() < np) throw Error(ErrorKind::PreconditionViolated, "state shorter than the momentum block");
  const auto p = state.tail(np);
  double twice_kinetic = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    twice_kinetic += p.segment(i * space_dim, space_dim).squaredNorm() / masses[static_cast<std::size_t>(i)];
  }
  return twice_kinetic / (static_cast<double>(np) * k_B);
}

TemperatureSeries temperature_series(const Trajectory& traj, const std::vector<double>& masses, double k_B,
                                     int space_dim) {
  TemperatureSeries out;
  out.times = traj.times;
  out.temperature.reserve(traj.states.size());
  for (const auto& u : traj.states) out.temperature.push_back(kinetic_temperature(u, masses, k_B, space_dim));
  if (out.times.size() >= 2) out.drift = linear_fit(out.times, out.temperature);
  return out;
}

LemmaA2Check verify_lemma_a2(int s, int m) {
  if (s < 1 || m < 1 || 2 * m > s + 1) {
    throw Error(ErrorKind::PreconditionViolated, "needs s, m >= 1 and 2m <= s + 1 (s = " + std::to_string(s) +
                                                     ", m = " + std::to_string(m) + ")");
  }
  if (2 * m > 30) throw Error(ErrorKind::PreconditionViolated, "(2m)! exceeds 128-bit range");
  Rational lhs;
  for (int n = std::max(1 - m, m - s); n <= std::min(m - 1, s - m); ++n) {
    const Rational::Int sign = (n % 2 == 0) ? 1 : -1;
    lhs = lhs + Rational(sign, factorial(m - n) * factorial(m + n));
  }
  const Rational::Int sign_m = (m % 2 == 0) ? 1 : -1;
  const Rational rhs(-2 * sign_m, factorial(2 * m));
  LemmaA2Check out;
  out.s = s;
  out.m = m;
  out.lhs = lhs.str();
  out.rhs = rhs.str();
  out.exact = lhs == rhs;
  out.residual = (lhs - rhs).to_double();
  return out;
}

std::vector<LemmaA2Check> lemma_a2_sweep(int max_s) {
  std::vector<LemmaA2Check> out;
  for (int s = 1; s <= max_s; ++s) {
    for (int m = 1; 2 * m <= s + 1; ++m) out.push_back(verify_lemma_a2(s, m));
  }
  return out;
}

GammaAsymptotics gamma_asymptotic_check(const Tableau& tableau, const OdeProblem& linear_problem,
                                        const std::vector<double>& dts) {
  if (!tableau.is_explicit()) throw Error(ErrorKind::NotExplicit, tableau.name + " is not explicit");
  if (!linear_problem.jacobian) {
    throw Error(ErrorKind::PreconditionViolated, linear_problem.name + " does not expose its linear operator");
  }
  if (dts.size() < 2) throw Error(ErrorKind::PreconditionViolated, "need at least two step sizes");

  GammaAsymptotics out;
  out.order = tableau.declared_order;
  out.applicable = out.order % 2 == 1;
  out.dts = dts;
  const Vector& u0 = linear_problem.initial_state;
  std::vector<double> x, y;
  double sign = 1.0;
  for (double dt : dts) {
    const RkStepResult rk = rk_step_explicit(linear_problem, tableau, linear_problem.t0, u0, dt);
    const double g = gamma_quadratic_closed_form(rk.stage_derivatives, tableau.b, tableau.A);
    out.gamma_minus_one.push_back(g - 1.0);
    if (g != 1.0) {
      x.push_back(std::log(dt));
      y.push_back(std::log(std::abs(g - 1.0)));
      sign = g > 1.0 ? 1.0 : -1.0;
    }
  }
  if (x.size() < 2) throw Error(ErrorKind::DegenerateDirection, "gamma equals 1 at every step size");
  out.fit = linear_fit(x, y);
  out.exponent = out.fit.slope;
  out.constant = sign * std::exp(out.fit.intercept);

  if (out.applicable) {
    const int p = out.order;
    const Vector alpha = stability_monomial_coefficients(tableau);
    const double alpha_next = alpha.size() > p ? alpha(p) : 0.0;
    double inv_factorial = 1.0;
    for (int k = 2; k <= p + 1; ++k) inv_factorial /= k;
    const Matrix L = linear_problem.jacobian(linear_problem.t0, u0);
    Vector w = u0;
    for (int k = 0; k < (p + 1) / 2; ++k) w = L * w;
    const double ratio = w.squaredNorm() / (L * u0).squaredNorm();
    const double parity = ((p + 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    out.predicted_constant = -2.0 * parity * (alpha_next - inv_factorial) * ratio;
    out.relative_deviation = std::abs(out.constant - out.predicted_constant) / std::abs(out.predicted_constant);
  }
  return out;
}

}  // namespace rrk
