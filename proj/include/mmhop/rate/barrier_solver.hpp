#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mmhop/common/error.hpp"

namespace mmhop {

// One smooth convex inequality f(z) <= 0. Three shapes cover the rate program:
//   kLinear     sum_k coef_k z_k - rhs
//   kLogRate    z[a] - ln(1 + gain z[b]) - rhs
//   kQuadratic  z[a]^2 - gain z[b] - 1 - rhs
// `scale` > 0 multiplies f; it leaves the barrier's central path unchanged
// and only helps conditioning.
struct Constraint {
  enum class Kind { kLinear, kLogRate, kQuadratic };
  Kind kind = Kind::kLinear;
  std::vector<std::pair<int, double>> terms;
  int a = -1;
  int b = -1;
  double gain = 0.0;
  double rhs = 0.0;
  double scale = 1.0;
  // Simple variable bounds are kept apart from the structural count.
  bool is_bound = false;

  static Constraint linear(std::vector<std::pair<int, double>> terms, double rhs,
                           double scale = 1.0);
  static Constraint upper(int var, double value);
  static Constraint lower(int var, double value, bool bound = false);
  static Constraint log_rate(int rate_var, int power_var, double gain);
  static Constraint quadratic(int slack_var, int power_var, double gain, double scale = 1.0);

  // f(z); +inf outside the function's domain.
  double value(const Eigen::VectorXd& z) const;
};

// minimize c^T z subject to f_i(z) <= 0.
struct ConvexProgram {
  int num_vars = 0;
  Eigen::VectorXd cost;
  std::vector<Constraint> constraints;

  int num_structural() const;
  double objective(const Eigen::VectorXd& z) const { return cost.dot(z); }
  // Largest f_i(z).
  double max_violation(const Eigen::VectorXd& z) const;
  bool strictly_feasible(const Eigen::VectorXd& z) const;
};

struct BarrierOptions {
  double t0 = 1.0;
  double mu = 10.0;
  int max_newton_per_stage = 100;
  int max_stages = 40;
  // Stop once m / t falls below this (absolute, objective units).
  double gap_tol = 1e-8;
  double newton_tol = 1e-10;
  double ls_alpha = 0.25;
  double ls_beta = 0.5;
  // Residuals and refitted multipliers cost a few QR solves; the slot loop skips them.
  bool compute_kkt = true;
};

struct BarrierResult {
  Eigen::VectorXd z;
  double objective = 0.0;
  Eigen::VectorXd duals;
  int stages = 0;
  int newton_steps = 0;
  double final_t = 0.0;
  double gap_bound = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;
};

class InfeasibleInstance : public SolverError {
 public:
  explicit InfeasibleInstance(const std::string& what) : SolverError(what) {}
};

class MaxIterationsExceeded : public SolverError {
 public:
  MaxIterationsExceeded(const std::string& what, BarrierResult best)
      : SolverError(what), best_(std::move(best)) {}
  const BarrierResult& best() const { return best_; }

 private:
  BarrierResult best_;
};

// Log-barrier Newton method with a backtracking line search that never leaves
// the strict interior. `z0` must be strictly feasible.
BarrierResult solve_convex(const ConvexProgram& prog, const Eigen::VectorXd& z0,
                           const BarrierOptions& opt = {});

// KKT residuals of (z, duals): max |c + sum lambda_i grad f_i| and
// max |lambda_i f_i|.
std::pair<double, double> kkt_residuals(const ConvexProgram& prog, const Eigen::VectorXd& z,
                                        const Eigen::VectorXd& duals);

}  // namespace mmhop
