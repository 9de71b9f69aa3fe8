#pragma once

#include <map>
#include <utility>

namespace mmhop {

// Q(t+1) = max(Q - served, 0) + arrived.
double step_mbs_queue(double q, double served, double arrived);
// All received bits are enqueued (worst case of the relay inequality).
double step_scbs_queue(double q, double served, double received);
// Y(t+1) = max(Y + phi - x, 0).
double step_virtual_queue(double y, double phi, double x);

// Little's-law delay in slots. Throws ValidationError when mean_arrival <= 0.
double little_delay(double q_bits, double mean_arrival_bits);

// Backlogs Q_f^i keyed by (flow, node). Missing entries read as zero.
class QueueMatrix {
 public:
  using Key = std::pair<int, int>;

  double get(int flow, int node) const;
  void set(int flow, int node, double bits);
  void erase(int flow, int node) { q_.erase({flow, node}); }
  const std::map<Key, double>& entries() const { return q_; }
  double total() const;

 private:
  std::map<Key, double> q_;
};

// Y_s keyed by subflow id.
class VirtualQueues {
 public:
  double get(int key) const;
  void set(int key, double bits);
  const std::map<int, double>& entries() const { return y_; }

 private:
  std::map<int, double> y_;
};

}  // namespace mmhop
