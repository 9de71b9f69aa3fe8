#pragma once

#include <cstdint>
#include <vector>

#include "mmhop/rate/dump.hpp"
#include "mmhop/sim/metrics.hpp"
#include "mmhop/sim/scenario_config.hpp"

namespace mmhop {

// One policy, one load point, one seed. SCA records are appended to `dump`
// when it is non-null and the config asks for them.
MetricsLog run_one(const ScenarioConfig& cfg, Policy policy, double subflow_gbps, std::uint64_t seed,
                   std::vector<ScaRecord>* dump = nullptr);

// Seeds run concurrently (cfg.run.threads workers) and merge in seed order, so
// the result does not depend on scheduling.
MetricsLog run_seeds(const ScenarioConfig& cfg, Policy policy, double subflow_gbps,
                     const std::vector<std::uint64_t>& seeds, std::vector<ScaRecord>* dump = nullptr);

}  // namespace mmhop
