#include "mmhop/rate/sca_problem.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mmhop/common/error.hpp"

namespace mmhop {

void ScaProblem::validate() const {
  if (subflows.empty()) throw ValidationError("sca: no active subflow");
  for (const auto& s : subflows) {
    if (s.hops.size() < 2 || s.hops.front() != 0) throw ValidationError("sca: bad path");
    if (s.relays.size() + 2 > s.hops.size()) throw ValidationError("sca: too many relays");
    if (!(s.gain0 > 0.0)) throw ValidationError("sca: MBS edge gain must be > 0");
    if (!(s.weight >= 0.0)) throw ValidationError("sca: negative weight");
    if (!(s.cap_nats > s.lb_nats)) throw ValidationError("sca: empty rate interval");
    for (std::size_t k = 0; k < s.relays.size(); ++k) {
      const auto& r = s.relays[k];
      if (r.node != s.hops[k + 1]) throw ValidationError("sca: relay out of path order");
      if (!(r.gain_in > 0.0 && r.gain_out > 0.0)) throw ValidationError("sca: relay gains must be > 0");
      if (!(static_cast<std::size_t>(r.node) < budgets_w.size())) throw ValidationError("sca: relay has no budget");
    }
  }
  for (double b : budgets_w)
    if (!(b > 0.0)) throw ValidationError("sca: budgets must be > 0");
}

int ScaProblem::num_relay_hops() const {
  int n = 0;
  for (const auto& s : subflows) n += static_cast<int>(s.relays.size());
  return n;
}

std::vector<int> ScaProblem::active_bs() const {
  std::set<int> bs;
  for (const auto& s : subflows) {
    bs.insert(0);
    for (const auto& r : s.relays) bs.insert(r.node);
  }
  return {bs.begin(), bs.end()};
}

int ScaProblem::num_constraints() const {
  const int f = static_cast<int>(subflows.size());
  return f + 2 * num_relay_hops() + static_cast<int>(active_bs().size()) + 2 * f;
}

int ScaProblem::num_vars() const { return ScaLayout::of(*this).n; }

ScaLayout ScaLayout::of(const ScaProblem& p) {
  ScaLayout l;
  for (const auto& s : p.subflows) {
    l.x.push_back(l.n++);
    l.q.push_back({l.n++});
    l.y.emplace_back();
    for (std::size_t k = 0; k < s.relays.size(); ++k) {
      l.q.back().push_back(l.n++);
      l.y.back().push_back(l.n++);
    }
  }
  return l;
}

ScaProblem build_subproblem(const SlotInputs& in, BuildReport* report) {
  BuildReport rep;
  ScaProblem p;
  p.budgets_w = in.budgets_w;
  if (in.budgets_w.empty()) throw ValidationError("sca: no budgets");
  const double p0 = in.budgets_w[0];
  for (const auto& s : in.subflows) {
    if (s.edge_gains.size() + 1 != s.hops.size()) throw ValidationError("sca: one gain per hop required");
    if (s.relay_slack_bits.size() + 2 != s.hops.size())
      throw ValidationError("sca: one slack value per relay required");
    SubflowBlock b;
    b.subflow = s.subflow;
    b.flow = s.flow;
    b.path = s.path;
    b.hops = s.hops;
    b.weight = s.weight;
    b.gain0 = s.edge_gains[0];
    b.cap_nats = in.scale.bits_to_nats(s.cap_bits);
    const double top0 = std::log1p(p0 * b.gain0) - in.cap_margin_nats;
    if (in.enforce_slack) {
      double lb = std::max(in.scale.bits_to_nats(s.mbs_slack_bits), 0.0);
      const double lim = std::min(top0, b.cap_nats - in.cap_margin_nats);
      if (lb > lim) {
        lb = std::max(lim, 0.0);
        ++rep.capped;
      }
      b.lb_nats = lb;

      std::vector<RelayHop> chain;
      bool any_active = false;
      for (std::size_t k = 1; k + 1 < s.hops.size(); ++k) {
        const int node = s.hops[k];
        const int prev = s.hops[k - 1];
        RelayHop h;
        h.node = node;
        h.gain_in = s.edge_gains[k - 1];
        h.gain_out = s.edge_gains[k];
        h.d_nats = in.scale.bits_to_nats(s.relay_slack_bits[k - 1]);
        const double d_cap = std::log1p(in.budgets_w.at(node) * h.gain_out) - in.cap_margin_nats;
        if (h.d_nats > d_cap) {
          h.d_nats = d_cap;
          h.capped = true;
          ++rep.capped;
        }
        // Binding is possible only if e^D (1 + P_in g_in) can exceed 1.
        if (h.d_nats + std::log1p(in.budgets_w.at(prev) * h.gain_in) > 0.0) any_active = true;
        chain.push_back(h);
      }
      if (any_active) {
        b.relays = std::move(chain);
      } else if (!chain.empty()) {
        ++rep.pruned_chains;
      }
    }
    p.subflows.push_back(std::move(b));
  }
  p.validate();
  if (report) *report = rep;
  return p;
}

namespace {

double budget_of_tx(const ScaProblem& p, const SubflowBlock& s, std::size_t k) {
  return p.budgets_w.at(static_cast<std::size_t>(s.hops[k]));
}

}  // namespace

ConvexProgram convexify(const ScaProblem& p, const ScaLayout& lay, const Eigen::VectorXd& lin) {
  ConvexProgram prog;
  prog.num_vars = lay.n;
  prog.cost = Eigen::VectorXd::Zero(lay.n);
  double wmax = 0.0;
  for (const auto& s : p.subflows) wmax = std::max(wmax, s.weight);

  std::vector<std::vector<std::pair<int, double>>> budget(p.budgets_w.size());
  for (std::size_t si = 0; si < p.subflows.size(); ++si) {
    const auto& s = p.subflows[si];
    const int x = lay.x[si];
    if (wmax > 0.0) prog.cost[x] = -s.weight / wmax;

    const double g0 = s.gain0 * budget_of_tx(p, s, 0);
    prog.constraints.push_back(Constraint::log_rate(x, lay.q[si][0], g0));
    budget[0].push_back({lay.q[si][0], 1.0});

    for (std::size_t k = 1; k <= s.relays.size(); ++k) {
      const auto& r = s.relays[k - 1];
      const int q_out = lay.q[si][k];
      const int q_in = lay.q[si][k - 1];
      const int y = lay.y[si][k - 1];
      const double g_out = r.gain_out * budget_of_tx(p, s, k);
      const double g_in = r.gain_in * budget_of_tx(p, s, k - 1);
      prog.constraints.push_back(Constraint::quadratic(y, q_out, g_out, 1.0 / (1.0 + g_out)));
      // First-order surrogate of y^2 / (1 + g_in q_in) around (y_l, q_l).
      const double yl = lin[y];
      const double cl = 1.0 + g_in * lin[q_in];
      const double ed = std::exp(r.d_nats);
      prog.constraints.push_back(Constraint::linear(
          {{y, -2.0 * yl / cl}, {q_in, yl * yl * g_in / (cl * cl)}}, -ed - yl * yl / (cl * cl),
          1.0 / ed));
      budget[static_cast<std::size_t>(r.node)].push_back({q_out, 1.0});
    }
    prog.constraints.push_back(Constraint::lower(x, s.lb_nats));
    prog.constraints.push_back(Constraint::upper(x, s.cap_nats));
  }
  for (auto& terms : budget)
    if (!terms.empty()) prog.constraints.push_back(Constraint::linear(std::move(terms), 1.0));
  for (std::size_t si = 0; si < p.subflows.size(); ++si)
    for (int q : lay.q[si]) prog.constraints.push_back(Constraint::lower(q, 0.0, true));
  return prog;
}

Eigen::VectorXd interior_point(const ScaProblem& p, const ScaLayout& lay) {
  // In rate space r_k = ln(1 + G_k q_k) the chain constraints are linear and
  // budgets are convex and increasing, so the componentwise smallest chain is
  // the cheapest point. Add margin delta to every link.
  auto build = [&](double delta, Eigen::VectorXd& z) {
    std::vector<double> load(p.budgets_w.size(), 0.0);
    for (std::size_t si = 0; si < p.subflows.size(); ++si) {
      const auto& s = p.subflows[si];
      std::vector<double> r(s.relays.size() + 1);
      r[0] = s.lb_nats + delta;
      for (std::size_t k = 1; k < r.size(); ++k)
        r[k] = std::max(r[k - 1] + s.relays[k - 1].d_nats, 0.0) + delta;
      const double x = s.lb_nats + 0.5 * std::min(delta, s.cap_nats - s.lb_nats);
      z[lay.x[si]] = x;
      for (std::size_t k = 0; k < r.size(); ++k) {
        const double g = (k == 0 ? s.gain0 : s.relays[k - 1].gain_out) * budget_of_tx(p, s, k);
        const double q = std::expm1(r[k]) / g;
        z[lay.q[si][k]] = q;
        load[static_cast<std::size_t>(s.hops[k])] += q;
      }
      for (std::size_t k = 1; k < r.size(); ++k)
        z[lay.y[si][k - 1]] = std::exp(0.25 * (r[k - 1] + s.relays[k - 1].d_nats + r[k]));
    }
    return *std::max_element(load.begin(), load.end());
  };

  Eigen::VectorXd z(lay.n);
  for (double delta = 0.5; delta > 1e-9; delta *= 0.5) {
    if (build(delta, z) < 1.0 - 1e-9) {
      const ConvexProgram prog = convexify(p, lay, z);
      if (prog.strictly_feasible(z)) return z;
    }
  }
  throw InfeasibleInstance("sca: latency targets exceed the power budgets");
}

double original_violation(const ScaProblem& p, const ScaLayout& lay, const Eigen::VectorXd& z) {
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<double> load(p.budgets_w.size(), 0.0);
  for (std::size_t si = 0; si < p.subflows.size(); ++si) {
    const auto& s = p.subflows[si];
    const double x = z[lay.x[si]];
    std::vector<double> r(s.relays.size() + 1);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double q = z[lay.q[si][k]];
      worst = std::max(worst, -q);
      const double g = (k == 0 ? s.gain0 : s.relays[k - 1].gain_out) * budget_of_tx(p, s, k);
      r[k] = std::log1p(g * std::max(q, 0.0));
      load[static_cast<std::size_t>(s.hops[k])] += q;
    }
    worst = std::max(worst, x - r[0]);
    worst = std::max(worst, s.lb_nats - x);
    worst = std::max(worst, x - s.cap_nats);
    for (std::size_t k = 1; k < r.size(); ++k)
      worst = std::max(worst, s.relays[k - 1].d_nats - (r[k] - r[k - 1]));
  }
  for (double l : load) worst = std::max(worst, l - 1.0);
  return worst;
}

}  // namespace mmhop
