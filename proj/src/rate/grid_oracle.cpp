#include "mmhop/rate/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmhop {

namespace {

struct PowerVar {
  int subflow;
  int k;
  int node;
  double gain;  // per unit budget fraction
};

}  // namespace

std::optional<double> grid_oracle_objective(const ScaProblem& p, int points_per_dim,
                                            int zoom_rounds, int max_dims) {
  std::vector<PowerVar> vars;
  for (std::size_t si = 0; si < p.subflows.size(); ++si) {
    const auto& s = p.subflows[si];
    for (std::size_t k = 0; k <= s.relays.size(); ++k) {
      const int node = s.hops[k];
      const double g = (k == 0 ? s.gain0 : s.relays[k - 1].gain_out) *
                       p.budgets_w.at(static_cast<std::size_t>(node));
      vars.push_back({static_cast<int>(si), static_cast<int>(k), node, g});
    }
  }
  const int d = static_cast<int>(vars.size());
  if (d > max_dims || d == 0) return std::nullopt;
  if (points_per_dim <= 0) points_per_dim = d <= 2 ? 101 : (d == 3 ? 41 : 15);

  // The grid runs over link rates c = ln(1 + G q) rather than powers, so thin
  // feasible bands at high gain still get grid points.
  std::vector<double> top(d);
  for (int i = 0; i < d; ++i) top[i] = std::log1p(vars[i].gain);
  std::vector<double> lo(d, 0.0), hi(top), q(d), best_q(d);
  double best = std::numeric_limits<double>::infinity();
  double best_margin = -std::numeric_limits<double>::infinity();

  // margin: smallest slack over the latency and budget constraints.
  auto evaluate = [&](const std::vector<double>& qq, double& margin) -> double {
    std::vector<double> load(p.budgets_w.size(), 0.0);
    for (int i = 0; i < d; ++i)
      if (vars[i].gain > 0.0) load[static_cast<std::size_t>(vars[i].node)] += std::expm1(qq[i]) / vars[i].gain;
    margin = std::numeric_limits<double>::infinity();
    for (double l : load) {
      if (l > 1.0 + 1e-12) return std::numeric_limits<double>::infinity();
      margin = std::min(margin, 1.0 - l);
    }
    double obj = 0.0;
    int i = 0;
    for (const auto& s : p.subflows) {
      double prev = 0.0;
      for (std::size_t k = 0; k <= s.relays.size(); ++k, ++i) {
        const double r = qq[i];
        if (k == 0) {
          const double x = std::min(r, s.cap_nats);
          if (x < s.lb_nats) return std::numeric_limits<double>::infinity();
          obj -= s.weight * x;
        } else if (r - prev < s.relays[k - 1].d_nats) {
          return std::numeric_limits<double>::infinity();
        } else {
          margin = std::min(margin, r - prev - s.relays[k - 1].d_nats);
        }
        prev = r;
      }
    }
    return obj;
  };

  for (int round = 0; round <= zoom_rounds; ++round) {
    std::vector<int> idx(d, 0);
    while (true) {
      for (int i = 0; i < d; ++i)
        q[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / static_cast<double>(points_per_dim - 1);
      double margin = 0.0;
      const double v = evaluate(q, margin);
      // Powers that only enter latency constraints leave the objective flat;
      // break ties toward the interior so the zoom box can keep following
      // the MBS powers.
      if (v < best || (v == best && margin > best_margin)) {
        best = v;
        best_q = q;
        best_margin = margin;
      }
      int c = 0;
      while (c < d && ++idx[c] == points_per_dim) idx[c++] = 0;
      if (c == d) break;
    }
    if (!std::isfinite(best)) return std::nullopt;
    for (int i = 0; i < d; ++i) {
      // Halve the box around the incumbent.
      const double half = 0.25 * (hi[i] - lo[i]);
      lo[i] = std::max(0.0, best_q[i] - half);
      hi[i] = std::min(top[i], best_q[i] + half);
    }
  }
  return best;
}

}  // namespace mmhop
