#include "mmhop/queueing/delay_slack.hpp"

#include "mmhop/common/error.hpp"

namespace mmhop {

DelaySlackState::DelaySlackState(double epsilon, double beta_slots)
    : epsilon_(epsilon), beta_(beta_slots) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("delay slack: epsilon must lie in (0, 1)");
  if (!(beta_slots > 0.0)) throw ValidationError("delay slack: beta must be > 0");
}

void DelaySlackState::record(int flow, int node, double served_bits, double received_bits) {
  if (served_bits < 0.0 || received_bits < 0.0)
    throw ValidationError("delay slack: negative service");
  auto& s = sums_[{flow, node}];
  s.served += served_bits;
  s.received += received_bits;
}

double DelaySlackState::served_total(int flow, int node) const {
  auto it = sums_.find({flow, node});
  return it == sums_.end() ? 0.0 : it->second.served;
}

double DelaySlackState::received_total(int flow, int node) const {
  auto it = sums_.find({flow, node});
  return it == sums_.end() ? 0.0 : it->second.received;
}

double DelaySlackState::slack(int flow, int node, double mean_arrival_bits, long t) const {
  if (t < 1) throw ValidationError("delay slack: slots are numbered from 1");
  const double budget = mean_arrival_bits * epsilon_ * beta_;
  if (node == 0)
    return mean_arrival_bits * static_cast<double>(t) - budget - served_total(flow, 0);
  return -budget + received_total(flow, node) - served_total(flow, node);
}

double DelaySlackState::realized_slack(int flow, int node, double mean_arrival_bits) const {
  const double backlog = received_total(flow, node) - served_total(flow, node);
  const double budget = mean_arrival_bits * epsilon_ * beta_;
  return node == 0 ? backlog + mean_arrival_bits - budget : backlog - budget;
}

}  // namespace mmhop
