#include "mmhop/queueing/arrivals.hpp"

#include <random>

#include "mmhop/common/error.hpp"
#include "mmhop/common/rng.hpp"

namespace mmhop {

void ArrivalModel::validate() const {
  if (!(packet_bits > 0.0)) throw ValidationError("arrivals: packet size must be > 0");
  for (double m : mean_bits)
    if (!(m >= 0.0)) throw ValidationError("arrivals: mean must be >= 0");
}

double ArrivalModel::sample(std::uint64_t t, int flow) const {
  const double mean = mean_bits.at(static_cast<std::size_t>(flow));
  if (mean <= 0.0) return 0.0;
  auto rng = make_stream(seed, Stream::kArrivals, {t, static_cast<std::uint64_t>(flow)});
  std::poisson_distribution<std::int64_t> packets(mean / packet_bits);
  return static_cast<double>(packets(rng)) * packet_bits;
}

std::vector<double> ArrivalModel::sample_all(std::uint64_t t) const {
  std::vector<double> out(mean_bits.size());
  for (std::size_t f = 0; f < out.size(); ++f) out[f] = sample(t, static_cast<int>(f));
  return out;
}

}  // namespace mmhop
