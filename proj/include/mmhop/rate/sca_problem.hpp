#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmhop/common/units.hpp"
#include "mmhop/rate/barrier_solver.hpp"

namespace mmhop {

// One relay on a subflow's path with its latency constraint
// ln(1 + p_out g_out) - ln(1 + p_in g_in) >= d_nats.
struct RelayHop {
  int node = 0;
  double gain_in = 0.0;   // effective gain per watt of the incoming edge
  double gain_out = 0.0;  // effective gain per watt of the outgoing edge
  double d_nats = 0.0;
  bool capped = false;
};

// One subflow: the MBS edge rate x and the relays whose constraints are kept.
struct SubflowBlock {
  int subflow = 0;
  int flow = 0;
  int path = 0;
  std::vector<int> hops;      // full node sequence, MBS first
  double weight = 0.0;        // virtual queue Y (bits)
  double gain0 = 0.0;         // MBS edge effective gain per watt
  double lb_nats = 0.0;
  double cap_nats = 0.0;
  std::vector<RelayHop> relays;  // relays hops[1..relays.size()], in path order
};

struct ScaProblem {
  std::vector<SubflowBlock> subflows;
  std::vector<double> budgets_w;  // per BS

  void validate() const;
  // Structural constraints of the convexified program: MBS edges, two per
  // relay hop, one budget per BS with active flows, two rate bounds per subflow.
  int num_constraints() const;
  int num_relay_hops() const;
  std::vector<int> active_bs() const;
  int num_vars() const;
};

// Variable layout: per subflow x, q_0 (MBS power / budget), then per relay
// (q_k, y_k). Powers are normalised by the transmitter's budget.
struct ScaLayout {
  std::vector<int> x;
  std::vector<std::vector<int>> q;  // [subflow][0 = MBS, k = relay k]
  std::vector<std::vector<int>> y;  // [subflow][k - 1]
  int n = 0;

  static ScaLayout of(const ScaProblem& p);
};

struct SubflowInput {
  int subflow = 0;
  int flow = 0;
  int path = 0;
  std::vector<int> hops;
  std::vector<double> edge_gains;  // effective gain per watt, one per hop
  double weight = 0.0;             // Y (bits)
  double mbs_slack_bits = 0.0;     // required MBS-edge bits this slot
  std::vector<double> relay_slack_bits;  // one per relay
  double cap_bits = 0.0;
};

struct SlotInputs {
  std::vector<SubflowInput> subflows;
  std::vector<double> budgets_w;
  units::SlotScale scale{1e9, 1e-4};
  bool enforce_slack = true;
  double cap_margin_nats = 0.01;
};

struct BuildReport {
  int capped = 0;
  int pruned_chains = 0;
};

// Converts slot state into the rate program. Without slack enforcement the
// relay constraints are dropped and the lower rate bound is zero. A chain is
// also dropped when none of its relay constraints can bind.
ScaProblem build_subproblem(const SlotInputs& in, BuildReport* report = nullptr);

// Convexified program around the linearisation point `lin` (same layout).
ConvexProgram convexify(const ScaProblem& p, const ScaLayout& lay, const Eigen::VectorXd& lin);

// Strictly feasible point built from the smallest rate chain each subflow can
// run, with a positive margin. Throws InfeasibleInstance when even that chain
// breaks a power budget.
Eigen::VectorXd interior_point(const ScaProblem& p, const ScaLayout& lay);

// Largest violation of the original (nonconvex) constraints at z, in nats for
// rate constraints and in budget fractions for power.
double original_violation(const ScaProblem& p, const ScaLayout& lay, const Eigen::VectorXd& z);

}  // namespace mmhop
