#include "mmhop/rate/sca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mmhop {

double sca_objective(const ScaProblem& p, const ScaLayout& lay, const Eigen::VectorXd& z) {
  double obj = 0.0;
  for (std::size_t si = 0; si < p.subflows.size(); ++si)
    obj -= p.subflows[si].weight * z[lay.x[si]];
  return obj;
}

namespace {

ScaIterate unpack(const ScaProblem& p, const ScaLayout& lay, const Eigen::VectorXd& z) {
  ScaIterate it;
  it.z = z;
  for (std::size_t si = 0; si < p.subflows.size(); ++si) {
    const auto& s = p.subflows[si];
    it.x_nats.push_back(z[lay.x[si]]);
    std::vector<double> pw;
    for (std::size_t k = 0; k < lay.q[si].size(); ++k)
      pw.push_back(std::max(z[lay.q[si][k]], 0.0) * p.budgets_w.at(static_cast<std::size_t>(s.hops[k])));
    it.power_w.push_back(std::move(pw));
    std::vector<double> ys;
    for (int v : lay.y[si]) ys.push_back(z[v]);
    it.y.push_back(std::move(ys));
  }
  it.objective = sca_objective(p, lay, z);
  return it;
}

}  // namespace

ScaIterate sca_solve(const ScaProblem& p, const ScaOptions& opt,
                     const std::optional<Eigen::VectorXd>& warm) {
  p.validate();
  const ScaLayout lay = ScaLayout::of(p);
  Eigen::VectorXd lin;
  if (warm && warm->size() == lay.n && convexify(p, lay, *warm).strictly_feasible(*warm)) {
    lin = *warm;
  } else {
    lin = interior_point(p, lay);
  }

  double wmax = 0.0;
  for (const auto& s : p.subflows) wmax = std::max(wmax, s.weight);
  const double norm = wmax > 0.0 ? wmax : 1.0;
  const bool vacuous = p.num_relay_hops() == 0;

  std::vector<double> history;
  int steps = 0;
  Eigen::VectorXd z = lin;
  BarrierResult last;
  for (int l = 0; l < opt.max_iter; ++l) {
    const ConvexProgram prog = convexify(p, lay, lin);
    Eigen::VectorXd start = z;
    if (!prog.strictly_feasible(start)) {
      // Rounding can leave the previous optimum on the boundary of the new
      // surrogate; nudge it toward the linearisation point.
      start = 0.999999 * z + 0.000001 * lin;
      if (!prog.strictly_feasible(start)) start = lin;
    }
    last = solve_convex(prog, start, opt.barrier);
    steps += last.newton_steps;
    z = last.z;
    const double obj = sca_objective(p, lay, z);
    if (!history.empty()) {
      const double slack = 2.0 * last.gap_bound * norm + 1e-12 * (1.0 + std::abs(history.back()));
      if (obj > history.back() + slack)
        throw NonMonotone("sca: objective increased from " + std::to_string(history.back()) +
                          " to " + std::to_string(obj));
    }
    history.push_back(obj);
    lin = z;
    if (vacuous) break;
    if (history.size() >= 2) {
      const double prev = history[history.size() - 2];
      if (std::abs(obj - prev) <= opt.tol * (1.0 + std::abs(prev))) break;
    }
  }
  ScaIterate it = unpack(p, lay, z);
  it.iterations = static_cast<int>(history.size());
  it.history = std::move(history);
  it.newton_steps = steps;
  it.stationarity = last.stationarity;
  it.complementarity = last.complementarity;
  return it;
}

}  // namespace mmhop
