#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "mmhop/learning/path_learner.hpp"
#include "mmhop/queueing/arrivals.hpp"
#include "mmhop/queueing/delay_slack.hpp"
#include "mmhop/queueing/queues.hpp"
#include "mmhop/rate/sca.hpp"
#include "mmhop/scheduler/network.hpp"

namespace mmhop {

enum class Policy { kProposed, kBaseline1, kBaseline2, kBaseline3, kSingleHop };

std::string to_string(Policy p);
// Accepts proposed, baseline1..3 and single-hop. Throws ValidationError.
Policy parse_policy(const std::string& name);
bool uses_learning(Policy p);
bool enforces_slack(Policy p);

struct SchedulerConfig {
  Policy policy = Policy::kProposed;
  double nu = 1e12;            // bits^2 per slot^2
  long epoch_slots = 100;
  int selected_paths = 2;
  double kappa = 5.0;
  LearningSchedule schedule;
  double regret_cap = 1e6;
  double epsilon = 0.05;
  double beta_slots = 100.0;
  double slot_seconds = 1e-4;
  double packet_bits = 8.0;
  // true: latency slack on realised backlogs; false: cumulative expected
  // arrivals against offered link rates.
  bool realized_slack = true;
  double cap_margin_nats = 0.01;
  bool warm_start = true;
  bool keep_sca_records = false;
  ScaOptions sca;

  void validate() const;
};

struct NodeSample {
  int flow = 0;
  int node = 0;
  double queue_bits = 0.0;
  double delay_slots = 0.0;
  double rate_bps = 0.0;
};

// Everything decided and observed in one slot.
struct SlotDecision {
  long slot = 0;
  std::vector<std::vector<int>> active_paths;      // per flow, candidate indices
  std::vector<double> phi_bits;                    // per subflow
  std::vector<double> x_bits;                      // per subflow
  PowerVector powers;
  std::vector<NodeSample> samples;
  std::vector<double> arrived_bits;                // per flow
  std::vector<double> delivered_bits;              // per flow
  std::vector<std::vector<double>> strategies;     // per flow, set on epoch boundaries
  bool fallback = false;
  std::string event;
  int capped = 0;
  int sca_iterations = 0;
  std::optional<ScaProblem> sca_problem;
  std::optional<ScaIterate> sca_solution;
};

class Scheduler {
 public:
  // `flows[f].mean_arrival_bits` is the whole flow. Arrivals are split equally
  // into per-subflow MBS queues, one per selected path. `rate_cap_bits`
  // applies per subflow.
  Scheduler(const Network& net, std::vector<Flow> flows, SchedulerConfig cfg, std::uint64_t seed);

  SlotDecision step();

  long slot() const { return slot_; }
  // Relay backlogs keyed (flow, node); (flow, 0) holds the flow's MBS total.
  const QueueMatrix& queues() const { return q_; }
  double mbs_queue(int subflow) const { return mbs_q_.get(subflow, 0); }
  const VirtualQueues& virtual_queues() const { return y_; }
  const LearnerState& learner() const { return learner_; }
  const std::vector<Flow>& flows() const { return flows_; }
  const SchedulerConfig& config() const { return cfg_; }
  int subflows_per_flow() const { return sub_per_flow_; }
  int subflow_id(int flow, int k) const { return flow * sub_per_flow_ + k; }
  double subflow_mean_bits(int flow) const;

 private:
  struct Tx {
    int flow;
    int from;
    int to;
    int edge;
    int subflow;  // -1 for relays
  };

  void select_paths(long epoch);
  std::vector<Tx> transmissions() const;
  int next_hop(int flow, int node) const;

  const Network& net_;
  std::vector<Flow> flows_;
  SchedulerConfig cfg_;
  std::uint64_t seed_;
  int sub_per_flow_ = 1;
  ArrivalModel arrivals_;
  QueueMatrix q_;
  QueueMatrix mbs_q_;  // (subflow, 0)
  VirtualQueues y_;
  DelaySlackState slack_;
  DelaySlackState mbs_slack_;  // (subflow, 0)
  LearnerState learner_;
  std::vector<std::vector<int>> selected_;
  std::vector<std::vector<double>> epoch_utility_;  // per flow, per selected path
  long epoch_len_used_ = 0;
  long slot_ = 0;
  std::map<std::pair<int, int>, int> next_;  // (flow, node) -> next hop
  std::vector<int> bs_order_;
  std::vector<double> gains_;
  std::optional<Eigen::VectorXd> warm_;
  std::vector<int> warm_key_;
};

}  // namespace mmhop
