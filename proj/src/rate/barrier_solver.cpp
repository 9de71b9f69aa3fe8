#include "mmhop/rate/barrier_solver.hpp"

#include <cmath>
#include <limits>

namespace mmhop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Value, gradient entries and diagonal Hessian entries of one constraint.
struct Local {
  double f = 0.0;
  int n = 0;
  int idx[3] = {-1, -1, -1};
  double grad[3] = {0.0, 0.0, 0.0};
  int hidx = -1;
  double hess = 0.0;
};

void eval_local(const Constraint& c, const Eigen::VectorXd& z, Local& out) {
  switch (c.kind) {
    case Constraint::Kind::kLinear: {
      double f = -c.rhs;
      for (const auto& [k, v] : c.terms) f += v * z[k];
      out.f = c.scale * f;
      out.n = 0;
      out.hidx = -1;
      return;
    }
    case Constraint::Kind::kLogRate: {
      const double arg = 1.0 + c.gain * z[c.b];
      if (!(arg > 0.0)) {
        out.f = kInf;
        return;
      }
      out.f = c.scale * (z[c.a] - std::log(arg) - c.rhs);
      out.n = 2;
      out.idx[0] = c.a;
      out.grad[0] = c.scale;
      out.idx[1] = c.b;
      out.grad[1] = -c.scale * c.gain / arg;
      out.hidx = c.b;
      out.hess = c.scale * c.gain * c.gain / (arg * arg);
      return;
    }
    case Constraint::Kind::kQuadratic: {
      const double y = z[c.a];
      out.f = c.scale * (y * y - c.gain * z[c.b] - 1.0 - c.rhs);
      out.n = 2;
      out.idx[0] = c.a;
      out.grad[0] = c.scale * 2.0 * y;
      out.idx[1] = c.b;
      out.grad[1] = -c.scale * c.gain;
      out.hidx = c.a;
      out.hess = c.scale * 2.0;
      return;
    }
  }
}

// Gradient of a linear constraint is read from its terms directly.
template <typename Fn>
void for_grad(const Constraint& c, const Local& l, Fn&& fn) {
  if (c.kind == Constraint::Kind::kLinear) {
    for (const auto& [k, v] : c.terms) fn(k, c.scale * v);
  } else {
    for (int i = 0; i < l.n; ++i) fn(l.idx[i], l.grad[i]);
  }
}

class Barrier {
 public:
  explicit Barrier(const ConvexProgram& p)
      : prog_(p), locals_(p.constraints.size()), g_(p.num_vars), h_(p.num_vars, p.num_vars) {}

  // Barrier value at z, or +inf when z is not strictly feasible.
  double value(const Eigen::VectorXd& z, double t) {
    double phi = t * prog_.cost.dot(z);
    Local l;
    for (const auto& c : prog_.constraints) {
      eval_local(c, z, l);
      if (!(l.f < 0.0)) return kInf;
      phi -= std::log(-l.f);
    }
    return phi;
  }

  // phi(b) - phi(a) without cancelling the large t * cost terms; +inf when
  // b leaves the interior. a must be the point of the last derivatives() call.
  double delta(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double t) {
    double d = t * prog_.cost.dot(b - a);
    Local lb;
    for (std::size_t i = 0; i < prog_.constraints.size(); ++i) {
      eval_local(prog_.constraints[i], b, lb);
      if (!(lb.f < 0.0)) return kInf;
      const double fa = locals_[i].f;
      d -= std::log1p((lb.f - fa) / fa);
    }
    return d;
  }

  // Fills gradient and Hessian; returns false outside the interior.
  bool derivatives(const Eigen::VectorXd& z, double t) {
    g_ = t * prog_.cost;
    h_.setZero();
    for (std::size_t i = 0; i < prog_.constraints.size(); ++i) {
      const auto& c = prog_.constraints[i];
      Local& l = locals_[i];
      eval_local(c, z, l);
      if (!(l.f < 0.0)) return false;
      const double inv = -1.0 / l.f;
      for_grad(c, l, [&](int k, double gk) {
        g_[k] += inv * gk;
        for_grad(c, l, [&](int j, double gj) { h_(k, j) += inv * inv * gk * gj; });
      });
      if (l.hidx >= 0) h_(l.hidx, l.hidx) += inv * l.hess;
    }
    return true;
  }

  const Eigen::VectorXd& grad() const { return g_; }
  const Eigen::MatrixXd& hess() const { return h_; }

 private:
  const ConvexProgram& prog_;
  std::vector<Local> locals_;
  Eigen::VectorXd g_;
  Eigen::MatrixXd h_;
};

Eigen::VectorXd duals_at(const ConvexProgram& prog, const Eigen::VectorXd& z, double t) {
  Eigen::VectorXd lam(static_cast<Eigen::Index>(prog.constraints.size()));
  for (std::size_t i = 0; i < prog.constraints.size(); ++i)
    lam[static_cast<Eigen::Index>(i)] = 1.0 / (-t * prog.constraints[i].value(z));
  return lam;
}

// Least-squares multipliers on the constraints the barrier duals mark as
// active. The barrier estimate 1/(-t f) carries the centring error of the
// last Newton stage; this refit removes it when the active set is clear.
Eigen::VectorXd refit_duals(const ConvexProgram& prog, const Eigen::VectorXd& z,
                            const Eigen::VectorXd& lam) {
  const double top = lam.maxCoeff();
  std::vector<int> active;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (lam[i] > 1e-6 * top) active.push_back(static_cast<int>(i));
  if (active.empty()) return lam;
  Eigen::MatrixXd jt = Eigen::MatrixXd::Zero(prog.num_vars, static_cast<Eigen::Index>(active.size()));
  Local l;
  for (std::size_t a = 0; a < active.size(); ++a) {
    const auto& c = prog.constraints[static_cast<std::size_t>(active[a])];
    eval_local(c, z, l);
    for_grad(c, l, [&](int k, double gk) { jt(k, static_cast<Eigen::Index>(a)) += gk; });
  }
  const Eigen::VectorXd fit = jt.colPivHouseholderQr().solve(-prog.cost);
  if (!fit.allFinite() || fit.minCoeff() < 0.0) return lam;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(lam.size());
  for (std::size_t a = 0; a < active.size(); ++a) out[active[a]] = fit[static_cast<Eigen::Index>(a)];
  return out;
}

BarrierResult pack(const ConvexProgram& prog, const Eigen::VectorXd& z, double t, int stages,
                   int steps, bool kkt) {
  BarrierResult r;
  r.z = z;
  r.objective = prog.objective(z);
  r.duals = duals_at(prog, z, t);
  r.stages = stages;
  r.newton_steps = steps;
  r.final_t = t;
  r.gap_bound = static_cast<double>(prog.constraints.size()) / t;
  if (!kkt) return r;
  if (prog.cost.lpNorm<Eigen::Infinity>() > 0.0) {
    const Eigen::VectorXd alt = refit_duals(prog, z, r.duals);
    if (kkt_residuals(prog, z, alt).first < kkt_residuals(prog, z, r.duals).first) r.duals = alt;
  }
  std::tie(r.stationarity, r.complementarity) = kkt_residuals(prog, z, r.duals);
  return r;
}

}  // namespace

Constraint Constraint::linear(std::vector<std::pair<int, double>> terms, double rhs,
                              double scale) {
  Constraint c;
  c.kind = Kind::kLinear;
  c.terms = std::move(terms);
  c.rhs = rhs;
  c.scale = scale;
  return c;
}

Constraint Constraint::upper(int var, double value) { return linear({{var, 1.0}}, value); }

Constraint Constraint::lower(int var, double value, bool bound) {
  Constraint c = linear({{var, -1.0}}, -value);
  c.is_bound = bound;
  return c;
}

Constraint Constraint::log_rate(int rate_var, int power_var, double gain) {
  Constraint c;
  c.kind = Kind::kLogRate;
  c.a = rate_var;
  c.b = power_var;
  c.gain = gain;
  return c;
}

Constraint Constraint::quadratic(int slack_var, int power_var, double gain, double scale) {
  Constraint c;
  c.kind = Kind::kQuadratic;
  c.a = slack_var;
  c.b = power_var;
  c.gain = gain;
  c.scale = scale;
  return c;
}

double Constraint::value(const Eigen::VectorXd& z) const {
  Local l;
  eval_local(*this, z, l);
  return l.f;
}

int ConvexProgram::num_structural() const {
  int n = 0;
  for (const auto& c : constraints) n += c.is_bound ? 0 : 1;
  return n;
}

double ConvexProgram::max_violation(const Eigen::VectorXd& z) const {
  double worst = -kInf;
  for (const auto& c : constraints) worst = std::max(worst, c.value(z));
  return worst;
}

bool ConvexProgram::strictly_feasible(const Eigen::VectorXd& z) const {
  for (const auto& c : constraints)
    if (!(c.value(z) < 0.0)) return false;
  return true;
}

std::pair<double, double> kkt_residuals(const ConvexProgram& prog, const Eigen::VectorXd& z,
                                        const Eigen::VectorXd& duals) {
  Eigen::VectorXd r = prog.cost;
  double comp = 0.0;
  Local l;
  for (std::size_t i = 0; i < prog.constraints.size(); ++i) {
    const auto& c = prog.constraints[i];
    eval_local(c, z, l);
    const double lam = duals[static_cast<Eigen::Index>(i)];
    for_grad(c, l, [&](int k, double gk) { r[k] += lam * gk; });
    comp = std::max(comp, std::abs(lam * l.f));
  }
  return {r.lpNorm<Eigen::Infinity>(), comp};
}

BarrierResult solve_convex(const ConvexProgram& prog, const Eigen::VectorXd& z0,
                           const BarrierOptions& opt) {
  if (z0.size() != prog.num_vars || prog.cost.size() != prog.num_vars)
    throw ValidationError("solve_convex: dimension mismatch");
  if (!prog.strictly_feasible(z0))
    throw InfeasibleInstance("solve_convex: starting point is not strictly feasible");

  Barrier bar(prog);
  Eigen::VectorXd z = z0;
  const double m = static_cast<double>(prog.constraints.size());
  const bool pure_centering = prog.cost.lpNorm<Eigen::Infinity>() == 0.0;
  double t = opt.t0;
  int steps = 0;
  Eigen::LLT<Eigen::MatrixXd> llt(prog.num_vars);
  Eigen::VectorXd dz(prog.num_vars);
  Eigen::VectorXd trial(prog.num_vars);

  for (int stage = 1; stage <= opt.max_stages; ++stage) {
    bool centred = false;
    for (int it = 0; it < opt.max_newton_per_stage; ++it) {
      bar.derivatives(z, t);
      llt.compute(bar.hess());
      if (llt.info() == Eigen::Success) dz = llt.solve(-bar.grad());
      if (llt.info() != Eigen::Success || !dz.allFinite()) {
        // Flat directions: regularise lightly.
        Eigen::MatrixXd hr = bar.hess();
        hr.diagonal().array() += 1e-10 * (1.0 + hr.diagonal().cwiseAbs().maxCoeff());
        dz = hr.ldlt().solve(-bar.grad());
      }
      const double slope = bar.grad().dot(dz);
      const double decrement2 = -slope;
      if (decrement2 / 2.0 <= opt.newton_tol || !(decrement2 > 0.0)) {
        centred = true;
        break;
      }
      ++steps;
      double s = 1.0;
      double d = kInf;
      for (int ls = 0; ls < 80; ++ls) {
        trial = z + s * dz;
        d = bar.delta(z, trial, t);
        if (d <= opt.ls_alpha * s * slope) break;
        s *= opt.ls_beta;
      }
      if (!(d < kInf) || d > 0.0 || s * dz.lpNorm<Eigen::Infinity>() < 1e-14 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
        // No progress possible at machine precision: treat as centred.
        centred = true;
        break;
      }
      z = trial;
    }
    if (!centred)
      throw MaxIterationsExceeded("solve_convex: Newton did not converge within a stage",
                                  pack(prog, z, t, stage, steps, opt.compute_kkt));
    if (pure_centering || m / t <= opt.gap_tol) return pack(prog, z, t, stage, steps, opt.compute_kkt);
    t *= opt.mu;
  }
  throw MaxIterationsExceeded("solve_convex: barrier stage limit reached",
                              pack(prog, z, t, opt.max_stages, steps, opt.compute_kkt));
}

}  // namespace mmhop
