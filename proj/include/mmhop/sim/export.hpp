#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mmhop/rate/dump.hpp"
#include "mmhop/sim/metrics.hpp"
#include "mmhop/sim/scenario_config.hpp"

namespace mmhop {

inline constexpr const char* kCsvHeader = "slot,seed,policy,flow,node,queue_bits,delay_slots,rate_bps";

// Doubles are written in shortest round-trip form so re-parsing is exact.
void write_samples_csv(const std::vector<MetricsLog>& logs, const std::string& path);
// Appends parsed rows to the log whose policy matches the row.
void read_samples_csv(const std::string& path, std::vector<MetricsLog>& logs);

nlohmann::json to_json(const Summary& s);
Summary summary_from_json(const nlohmann::json& j);

// Writes samples.csv, summary.json, manifest.json, strategies.csv and
// events.csv into `dir` (created if missing).
void export_run(const std::string& dir, const ScenarioConfig& cfg, const std::vector<MetricsLog>& logs,
                const std::vector<Summary>& summaries);

// Rebuilds the logs of a run directory from its manifest and CSV.
struct LoadedRun {
  ScenarioConfig config;
  std::vector<MetricsLog> logs;
};
LoadedRun load_run(const std::string& dir);

void write_dump(const std::string& path, const std::vector<ScaRecord>& records);

}  // namespace mmhop
