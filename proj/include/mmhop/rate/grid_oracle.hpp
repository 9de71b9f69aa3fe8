#pragma once

#include <optional>

#include "mmhop/rate/sca_problem.hpp"

namespace mmhop {

// Exhaustive grid over per-link rates (equivalently normalised powers) with
// zoom refinement. Returns the best
// feasible objective (sum -Y x), or nullopt when the instance has more than
// `max_dims` power variables or no feasible grid point was found.
std::optional<double> grid_oracle_objective(const ScaProblem& p, int points_per_dim = 0,
                                            int zoom_rounds = 40, int max_dims = 4);

}  // namespace mmhop
