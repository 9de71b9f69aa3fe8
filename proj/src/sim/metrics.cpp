#include "mmhop/sim/metrics.hpp"

#include <algorithm>

#include "mmhop/common/error.hpp"

namespace mmhop {

void MetricsLog::merge(const MetricsLog& other) {
  for (const auto& t : other.totals)
    for (const auto& mine : totals)
      if (mine.seed == t.seed) throw ValidationError("metrics: seed merged twice");
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  events.insert(events.end(), other.events.begin(), other.events.end());
  strategies.insert(strategies.end(), other.strategies.begin(), other.strategies.end());
  totals.insert(totals.end(), other.totals.begin(), other.totals.end());
  for (const auto& [k, h] : other.hop_of) hop_of.emplace(k, h);
}

std::vector<double> ccdf(const std::vector<double>& samples, const std::vector<double>& thresholds) {
  if (samples.empty()) throw ValidationError("ccdf: samples must be nonempty");
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(thresholds.size());
  const double n = static_cast<double>(sorted.size());
  for (double th : thresholds) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), th);
    out.push_back(static_cast<double>(above) / n);
  }
  return out;
}

Summary summarize(const MetricsLog& log, const std::vector<double>& thresholds_ms, double beta_ms) {
  if (log.rows.empty()) throw ValidationError("summarize: log has no samples");
  const double slot_ms = log.slot_seconds * 1e3;
  Summary s;
  s.policy = log.policy;
  s.arrival_gbps = log.arrival_gbps;
  s.seeds = log.totals.size();
  s.slots = log.totals.empty() ? 0 : log.totals.front().slots;
  s.samples = log.rows.size();
  s.beta_ms = beta_ms;
  s.ccdf_thresholds_ms = thresholds_ms;

  std::vector<double> delays_ms;
  delays_ms.reserve(log.rows.size());
  double sum = 0.0;
  // Per-hop means per flow, then summed along the hops.
  std::map<std::pair<int, int>, std::pair<double, long>> per_hop;
  for (const auto& r : log.rows) {
    const double d = r.delay_slots * slot_ms;
    delays_ms.push_back(d);
    sum += d;
    auto it = log.hop_of.find({r.flow, r.node});
    const int hop = it == log.hop_of.end() ? 0 : it->second;
    auto& acc = per_hop[{r.flow, hop}];
    acc.first += d;
    acc.second += 1;
  }
  s.mean_one_hop_delay_ms = sum / static_cast<double>(log.rows.size());
  std::map<int, double> e2e;
  for (const auto& [k, acc] : per_hop) e2e[k.first] += acc.first / static_cast<double>(acc.second);
  double e2e_sum = 0.0;
  for (const auto& [f, v] : e2e) e2e_sum += v;
  s.end_to_end_delay_ms = e2e.empty() ? 0.0 : e2e_sum / static_cast<double>(e2e.size());

  s.ccdf_values = ccdf(delays_ms, thresholds_ms);
  s.violation_frequency = ccdf(delays_ms, {beta_ms}).front();

  double delivered = 0.0;
  double subflow_slots = 0.0;
  for (const auto& t : log.totals) {
    for (double b : t.delivered_bits) delivered += b;
    subflow_slots += static_cast<double>(t.slots) * static_cast<double>(t.delivered_bits.size()) *
                     log.subflows_per_flow;
  }
  s.throughput_gbps_per_subflow =
      subflow_slots > 0.0 ? delivered / (subflow_slots * log.slot_seconds) / 1e9 : 0.0;

  for (const auto& e : log.events) {
    if (e.text.rfind("slack_capped", 0) == 0) ++s.cap_events;
    else ++s.fallback_events;
  }
  return s;
}

}  // namespace mmhop
