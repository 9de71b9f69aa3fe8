#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmhop/rate/sca.hpp"

namespace mmhop {

// One slot's rate program and its solution, serialised as a single JSON line.
struct ScaRecord {
  long slot = 0;
  std::uint64_t seed = 0;
  std::string policy;
  ScaProblem problem;
  double objective = 0.0;
  std::vector<double> x_nats;
  std::vector<std::vector<double>> power_w;
  int iterations = 0;
};

std::string to_json_line(const ScaRecord& rec);
// Throws IoError on malformed input.
ScaRecord parse_json_line(const std::string& line);
std::vector<ScaRecord> read_dump(const std::string& path);

}  // namespace mmhop
