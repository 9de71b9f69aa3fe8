#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mmhop {

struct SampleRow {
  long slot = 0;
  std::uint64_t seed = 0;
  int flow = 0;
  int node = 0;
  double queue_bits = 0.0;
  double delay_slots = 0.0;
  double rate_bps = 0.0;
};

struct EventRecord {
  long slot = 0;
  std::uint64_t seed = 0;
  std::string text;
};

struct StrategyRecord {
  long slot = 0;
  std::uint64_t seed = 0;
  int flow = 0;
  std::vector<double> pi;
};

// Per-seed flow totals for throughput and conservation checks.
struct SeedTotals {
  std::uint64_t seed = 0;
  long slots = 0;
  std::vector<double> arrived_bits;    // per flow
  std::vector<double> delivered_bits;  // per flow
};

// Everything one policy produced at one load point, possibly over many seeds.
struct MetricsLog {
  std::string policy;
  double arrival_gbps = 0.0;
  double slot_seconds = 1e-4;
  int subflows_per_flow = 1;           // nominal split used for throughput
  std::vector<SampleRow> rows;         // append-only, (seed, slot) nondecreasing
  std::vector<EventRecord> events;
  std::vector<StrategyRecord> strategies;
  std::vector<SeedTotals> totals;
  std::map<std::pair<int, int>, int> hop_of;  // (flow, node) -> hop index along its path

  // Appends another seed's log; seeds must not overlap.
  void merge(const MetricsLog& other);
};

// Fraction of samples strictly above each threshold. Throws on empty input.
std::vector<double> ccdf(const std::vector<double>& samples, const std::vector<double>& thresholds);

struct Summary {
  std::string policy;
  double arrival_gbps = 0.0;
  std::size_t seeds = 0;
  long slots = 0;  // per seed
  std::size_t samples = 0;
  double mean_one_hop_delay_ms = 0.0;
  double end_to_end_delay_ms = 0.0;
  double throughput_gbps_per_subflow = 0.0;
  double beta_ms = 0.0;
  double violation_frequency = 0.0;
  std::vector<double> ccdf_thresholds_ms;
  std::vector<double> ccdf_values;
  std::size_t fallback_events = 0;
  std::size_t cap_events = 0;
};

// Throws ValidationError when the log holds no samples.
Summary summarize(const MetricsLog& log, const std::vector<double>& thresholds_ms, double beta_ms);

}  // namespace mmhop
