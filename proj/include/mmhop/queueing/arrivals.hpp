#pragma once

#include <cstdint>
#include <vector>

namespace mmhop {

// Poisson packet arrivals of fixed size; mean in bits per slot per flow.
struct ArrivalModel {
  std::vector<double> mean_bits;
  double packet_bits = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  // Deterministic in (seed, t, flow).
  double sample(std::uint64_t t, int flow) const;
  std::vector<double> sample_all(std::uint64_t t) const;
};

}  // namespace mmhop
