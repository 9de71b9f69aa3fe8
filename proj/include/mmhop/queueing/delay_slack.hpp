#pragma once

#include <map>
#include <utility>

namespace mmhop {

// Running sums of realized service per (flow, node), used in place of the
// expected-service sums of the deterministic latency constraints.
class DelaySlackState {
 public:
  // epsilon: target violation probability; beta_slots: delay bound.
  DelaySlackState(double epsilon, double beta_slots);

  double epsilon() const { return epsilon_; }
  double beta_slots() const { return beta_; }

  // Adds one slot of realized service.
  void record(int flow, int node, double served_bits, double received_bits);

  double served_total(int flow, int node) const;
  double received_total(int flow, int node) const;

  // Required current-slot service (MBS, node 0) or net drain (relay) in bits,
  // given slots are numbered from t = 1 and history covers slots 1..t-1.
  // Negative values mean the constraint is inactive.
  double slack(int flow, int node, double mean_arrival_bits, long t) const;
  // Same constraint on the realised backlog: the expected arrivals t * mean
  // are replaced by the recorded arrivals (the MBS's `received`) plus one
  // expected slot. Does not drift with the arrival random walk.
  double realized_slack(int flow, int node, double mean_arrival_bits) const;

 private:
  struct Sums {
    double served = 0.0;
    double received = 0.0;
  };
  double epsilon_;
  double beta_;
  std::map<std::pair<int, int>, Sums> sums_;
};

}  // namespace mmhop
