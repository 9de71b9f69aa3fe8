#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmhop/model/topology.hpp"
#include "mmhop/scheduler/network.hpp"
#include "mmhop/scheduler/scheduler.hpp"

namespace mmhop {

struct TopologySpec {
  int num_scbs = 8;
  int relays_per_path = 2;
  double distance_min_m = 50.0;
  double distance_max_m = 100.0;
  double single_hop_distance_m = 45.0;   // direct MBS-UE link of the single-hop scheme
};

struct FlowSpec {
  int count = 2;
  int candidate_paths = 4;
  int selected_paths = 2;
  std::vector<double> arrival_gbps{4.5};  // per subflow; a list is a sweep
  double rate_cap_gbps = 10.0;            // per subflow
  double packet_bits = 12000.0;
};

struct RunSpec {
  long slots = 100000;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double slot_ms = 0.1;
  std::vector<double> ccdf_thresholds_ms{1, 2, 5, 10, 15, 20, 25, 50};
  int threads = 0;  // 0 = hardware concurrency
  bool dump_sca = false;
};

struct ScenarioConfig {
  TopologySpec topology;
  FlowSpec flows;
  RadioParams radio;
  BlockageParams blockage;  // applied to the single-hop scheme only
  double beta_ms = 10.0;
  double epsilon = 0.05;
  double kappa = 5.0;
  LearningSchedule schedule;
  long epoch_slots = 100;
  double regret_cap = 1e6;
  double nu = 1e12;
  Policy policy = Policy::kProposed;
  bool warm_start = true;
  double cap_margin_nats = 0.01;
  RunSpec run;

  // Field-level ValidationError on the first problem found.
  void validate() const;
  double slot_seconds() const { return run.slot_ms * 1e-3; }
  double beta_slots() const { return beta_ms / run.slot_ms; }
  // Mean arrival of a whole flow in bits per slot for a per-subflow rate.
  double flow_mean_bits(double subflow_gbps) const;
  SchedulerConfig scheduler_config(Policy p) const;
};

// Parses the nested JSON scenario format; unknown keys are rejected.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& cfg);

// A built scenario instance for one seed.
struct Scenario {
  Topology topology;
  std::vector<Flow> flows;  // mean arrivals filled for one sweep point
};

// Relay chains of `relays_per_path` SCBSs fed by the MBS; every chain tail
// reaches every UE. Per-hop distances are drawn per seed.
Scenario build_multihop(const ScenarioConfig& cfg, std::uint64_t seed, double subflow_gbps);
// Direct MBS-UE edges only.
Scenario build_single_hop(const ScenarioConfig& cfg, double subflow_gbps);

}  // namespace mmhop
