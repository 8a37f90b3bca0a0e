#pragma once

#include <vector>

#include "config.hpp"
#include "output.hpp"
#include "rrk/ode_problem.hpp"

namespace rrk::cli {

/// Runs one validated experiment. Library errors propagate unchanged.
[[nodiscard]] ExperimentReport run(const ExperimentSpec& spec);

/// Error-growth sample times: aphelion passages (k + 1/2) 2 pi for Kepler orbits,
/// otherwise empty (logarithmic default of the analysis layer).
[[nodiscard]] std::vector<double> default_growth_samples(const std::string& problem, double t_end);

/// max_k |H_k - H_0| / |H_0|.
[[nodiscard]] double max_drift_relative_to_initial(const std::vector<double>& series);

}  // namespace rrk::cli
