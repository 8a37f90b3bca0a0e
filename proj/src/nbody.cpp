#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rrk/errors.hpp"
#include "rrk/problems.hpp"

#ifndef RRK_LAB_DEFAULT_DATA_DIR
#define RRK_LAB_DEFAULT_DATA_DIR "data"
#endif

namespace rrk {
namespace {

/// V(r) and V'(r) of a radial pair potential scaled by the two masses.
struct PairTerm {
  double value;
  double derivative;
};
using PairPotential = std::function<PairTerm(double r, double mi, double mj)>;

/// H = sum |p_i|^2 / (2 m_i) + sum_{i<j} V(|q_i - q_j|), state (q_1..q_N, p_1..p_N).
OdeProblem pairwise_hamiltonian(std::string name, std::vector<double> masses, int dim, PairPotential pair,
                                const Vector& u0) {
  const auto n = static_cast<Eigen::Index>(masses.size());
  const Eigen::Index nq = n * dim;

  auto potential = [masses, dim, n, pair](const Vector& u) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double r = (u.segment(i * dim, dim) - u.segment(j * dim, dim)).norm();
        if (!(r > 0.0)) throw Error(ErrorKind::DomainViolation, "bodies collide");
        v += pair(r, masses[static_cast<std::size_t>(i)], masses[static_cast<std::size_t>(j)]).value;
      }
    }
    return v;
  };
  auto dH_dq = [masses, dim, n, nq, pair](const Vector& u) -> Vector {
    Vector g = Vector::Zero(nq);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Vector diff = u.segment(i * dim, dim) - u.segment(j * dim, dim);
        const double r = diff.norm();
        if (!(r > 0.0)) throw Error(ErrorKind::DomainViolation, "bodies collide");
        const double dv = pair(r, masses[static_cast<std::size_t>(i)], masses[static_cast<std::size_t>(j)]).derivative;
        g.segment(i * dim, dim) += (dv / r) * diff;
        g.segment(j * dim, dim) -= (dv / r) * diff;
      }
    }
    return g;
  };
  Vector inv_mass(nq);
  for (Eigen::Index i = 0; i < n; ++i) inv_mass.segment(i * dim, dim).setConstant(1.0 / masses[static_cast<std::size_t>(i)]);
  auto dH_dp = [inv_mass, nq](const Vector& u) -> Vector { return u.tail(nq).cwiseProduct(inv_mass); };

  OdeProblem p;
  p.name = std::move(name);
  p.dim = 2 * nq;
  p.rhs = [dH_dq, dH_dp, nq](double, const Vector& u) -> Vector {
    Vector f(2 * nq);
    f << dH_dp(u), -dH_dq(u);
    return f;
  };
  Invariant h;
  h.name = "energy";
  h.value = [potential, inv_mass, nq](const Vector& u) {
    return 0.5 * u.tail(nq).cwiseProduct(u.tail(nq)).dot(inv_mass) + potential(u);
  };
  h.gradient = [dH_dq, dH_dp, nq](const Vector& u) -> Vector {
    Vector g(2 * nq);
    g << dH_dq(u), dH_dp(u);
    return g;
  };
  p.invariants.push_back(std::move(h));
  std::vector<Eigen::Index> qi(static_cast<std::size_t>(nq)), pi(static_cast<std::size_t>(nq));
  for (Eigen::Index k = 0; k < nq; ++k) {
    qi[static_cast<std::size_t>(k)] = k;
    pi[static_cast<std::size_t>(k)] = nq + k;
  }
  p.partition = CanonicalPartition{qi, pi, dH_dq, dH_dp, true};
  p.initial_state = u0;
  return p;
}

/// Non-empty, non-comment lines split into whitespace tokens.
std::vector<std::vector<std::string>> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingDataFile, "cannot open " + path.string());
  std::vector<std::vector<std::string>> records;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (!tokens.empty()) records.push_back(std::move(tokens));
  }
  return records;
}

double to_double(const std::string& text, const std::filesystem::path& path) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) throw Error(ErrorKind::IoError, path.string() + ": bad number '" + text + "'");
  return v;
}

void expect_fields(const std::vector<std::string>& rec, std::size_t count, const std::filesystem::path& path) {
  if (rec.size() != count) {
    throw Error(ErrorKind::IoError, path.string() + ": record '" + rec.front() + "' needs " +
                                        std::to_string(count - 1) + " values");
  }
}

}  // namespace

std::filesystem::path resolve_data_dir(const std::optional<std::filesystem::path>& explicit_dir) {
  if (explicit_dir) return *explicit_dir;
  if (const char* env = std::getenv("RRK_LAB_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return RRK_LAB_DEFAULT_DATA_DIR;
}

double lennard_jones(double r, double epsilon, double sigma) {
  const double s6 = std::pow(sigma / r, 6);
  return 4.0 * epsilon * (s6 * s6 - s6);
}

NBodySetup outer_solar_system(const std::optional<std::filesystem::path>& data_dir) {
  const auto path = resolve_data_dir(data_dir) / "outer_solar_system.dat";
  NBodySetup setup;
  setup.space_dim = 3;
  std::vector<Vector> q, v;
  bool have_g = false;
  for (const auto& rec : read_records(path)) {
    if (rec[0] == "G") {
      expect_fields(rec, 2, path);
      setup.gravitational_constant = to_double(rec[1], path);
      have_g = true;
    } else if (rec[0] == "body") {
      expect_fields(rec, 9, path);
      setup.names.push_back(rec[1]);
      setup.masses.push_back(to_double(rec[2], path));
      Vector qi(3), vi(3);
      for (int k = 0; k < 3; ++k) {
        qi(k) = to_double(rec[3 + k], path);
        vi(k) = to_double(rec[6 + k], path);
      }
      q.push_back(qi);
      v.push_back(vi);
    } else {
      throw Error(ErrorKind::IoError, path.string() + ": unknown record '" + rec[0] + "'");
    }
  }
  if (!have_g || setup.masses.size() < 2) throw Error(ErrorKind::IoError, path.string() + ": incomplete data");

  const auto n = static_cast<Eigen::Index>(setup.masses.size());
  Vector u0(6 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u0.segment(3 * i, 3) = q[static_cast<std::size_t>(i)];
    u0.segment(3 * n + 3 * i, 3) = setup.masses[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
  }
  const double G = setup.gravitational_constant;
  PairPotential gravity = [G](double r, double mi, double mj) {
    const double v = -G * mi * mj / r;
    return PairTerm{v, -v / r};
  };
  setup.problem = pairwise_hamiltonian("solar", setup.masses, 3, gravity, u0);
  return setup;
}

NBodySetup argon_crystal(const std::optional<std::filesystem::path>& data_dir) {
  const auto path = resolve_data_dir(data_dir) / "argon_crystal.dat";
  double eps_over_kb = 0.0, sigma = 0.0, mass_kg = 0.0, kb = 0.0;
  std::vector<Vector> q, v;
  for (const auto& rec : read_records(path)) {
    if (rec[0] == "atom") {
      expect_fields(rec, 5, path);
      Vector qi(2), vi(2);
      qi << to_double(rec[1], path), to_double(rec[2], path);
      vi << to_double(rec[3], path), to_double(rec[4], path);
      q.push_back(qi);
      v.push_back(vi);
      continue;
    }
    expect_fields(rec, 2, path);
    const double value = to_double(rec[1], path);
    if (rec[0] == "epsilon_over_kB") {
      eps_over_kb = value;
    } else if (rec[0] == "sigma") {
      sigma = value;
    } else if (rec[0] == "mass") {
      mass_kg = value;
    } else if (rec[0] == "kB") {
      kb = value;
    } else {
      throw Error(ErrorKind::IoError, path.string() + ": unknown record '" + rec[0] + "'");
    }
  }
  if (!(eps_over_kb > 0 && sigma > 0 && mass_kg > 0 && kb > 0) || q.size() < 2) {
    throw Error(ErrorKind::IoError, path.string() + ": incomplete data");
  }

  // Mass unit = one argon atom; with nm and ns the energy unit is mass_kg * (m/s)^2.
  NBodySetup setup;
  setup.space_dim = 2;
  setup.boltzmann = kb / mass_kg;
  setup.lj_epsilon = eps_over_kb * setup.boltzmann;
  setup.lj_sigma = sigma;
  const auto n = static_cast<Eigen::Index>(q.size());
  setup.masses.assign(static_cast<std::size_t>(n), 1.0);
  for (Eigen::Index i = 0; i < n; ++i) setup.names.push_back("Ar" + std::to_string(i + 1));

  Vector u0(4 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u0.segment(2 * i, 2) = q[static_cast<std::size_t>(i)];
    u0.segment(2 * n + 2 * i, 2) = v[static_cast<std::size_t>(i)];
  }
  const double eps = setup.lj_epsilon;
  PairPotential lj = [eps, sigma](double r, double, double) {
    const double s6 = std::pow(sigma / r, 6);
    return PairTerm{4.0 * eps * (s6 * s6 - s6), 4.0 * eps * (-12.0 * s6 * s6 + 6.0 * s6) / r};
  };
  setup.problem = pairwise_hamiltonian("argon", setup.masses, 2, lj, u0);
  return setup;
}

}  // namespace rrk
