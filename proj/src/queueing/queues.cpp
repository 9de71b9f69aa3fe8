#include "mmhop/queueing/queues.hpp"

#include <algorithm>

#include "mmhop/common/error.hpp"

namespace mmhop {

double step_mbs_queue(double q, double served, double arrived) {
  return std::max(q - served, 0.0) + arrived;
}

double step_scbs_queue(double q, double served, double received) {
  return std::max(q - served, 0.0) + received;
}

double step_virtual_queue(double y, double phi, double x) {
  return std::max(y + phi - x, 0.0);
}

double little_delay(double q_bits, double mean_arrival_bits) {
  if (!(mean_arrival_bits > 0.0)) throw ValidationError("little_delay: mean arrival must be > 0");
  return q_bits / mean_arrival_bits;
}

double QueueMatrix::get(int flow, int node) const {
  auto it = q_.find({flow, node});
  return it == q_.end() ? 0.0 : it->second;
}

void QueueMatrix::set(int flow, int node, double bits) {
  if (!(bits >= 0.0)) throw ValidationError("queue: negative backlog");
  q_[{flow, node}] = bits;
}

double QueueMatrix::total() const {
  double s = 0.0;
  for (const auto& [k, v] : q_) s += v;
  return s;
}

double VirtualQueues::get(int key) const {
  auto it = y_.find(key);
  return it == y_.end() ? 0.0 : it->second;
}

void VirtualQueues::set(int key, double bits) {
  if (!(bits >= 0.0)) throw ValidationError("virtual queue: negative backlog");
  y_[key] = bits;
}

}  // namespace mmhop
