#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace mmhop {

// SplitMix64 generator. Satisfies UniformRandomBitGenerator so it can drive the
// <random> distributions. Cheap to construct, which lets every (seed, slot,
// entity) tuple own an independent stream without sequential coupling.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Stream identifiers keep independent consumers of the same seed apart.
enum class Stream : std::uint64_t {
  kArrivals = 1,
  kFading = 2,
  kBlockage = 3,
  kPathSampling = 4,
  kTopology = 5,
  kMonteCarlo = 6,
  kTest = 99,
};

// Derives a generator for a (seed, stream, keys...) tuple.
inline SplitMix64 make_stream(std::uint64_t seed, Stream stream,
                              std::initializer_list<std::uint64_t> keys = {}) {
  SplitMix64 mix(seed ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL));
  std::uint64_t h = mix();
  for (std::uint64_t k : keys) {
    SplitMix64 step(h ^ (k + 0x632be59bd9b4e019ULL));
    h = step();
  }
  return SplitMix64(h);
}

}  // namespace mmhop
