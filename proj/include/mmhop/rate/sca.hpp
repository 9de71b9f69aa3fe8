#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mmhop/rate/barrier_solver.hpp"
#include "mmhop/rate/sca_problem.hpp"

namespace mmhop {

struct ScaOptions {
  double tol = 1e-6;
  int max_iter = 50;
  BarrierOptions barrier;
};

struct ScaIterate {
  int iterations = 0;
  Eigen::VectorXd z;                  // full variable vector (ScaLayout order)
  std::vector<double> x_nats;         // per subflow
  std::vector<std::vector<double>> power_w;  // [subflow][tx index along path]
  std::vector<std::vector<double>> y;        // [subflow][relay]
  double objective = 0.0;             // sum -Y x
  std::vector<double> history;        // objective after each iteration
  int newton_steps = 0;
  double stationarity = 0.0;
  double complementarity = 0.0;
};

class NonMonotone : public SolverError {
 public:
  explicit NonMonotone(const std::string& what) : SolverError(what) {}
};

// Successive convex approximation: solve the convexified program, move the
// linearisation point to its solution, repeat until the objective settles.
// `warm` is used when it is strictly feasible for its own linearisation;
// otherwise the start comes from interior_point().
ScaIterate sca_solve(const ScaProblem& p, const ScaOptions& opt = {},
                     const std::optional<Eigen::VectorXd>& warm = std::nullopt);

// Objective sum -Y x of a full variable vector.
double sca_objective(const ScaProblem& p, const ScaLayout& lay, const Eigen::VectorXd& z);

}  // namespace mmhop
