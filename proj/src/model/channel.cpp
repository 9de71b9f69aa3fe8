#include "mmhop/model/channel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "mmhop/common/error.hpp"
#include "mmhop/common/units.hpp"
#include "mmhop/model/antenna.hpp"

namespace mmhop {

void LinkChannel::validate() const {
  if (!(distance_m >= 1.0)) throw ValidationError("link: distance must be >= 1 m");
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (double th : {tx_beamwidth_rad, rx_beamwidth_rad}) {
    if (!(th > 0.0 && th < kTwoPi))
      throw ValidationError("link: beamwidth must lie in (0, 2pi)");
  }
  if (!(sidelobe_gain > 0.0 && sidelobe_gain < 1.0))
    throw ValidationError("link: side-lobe gain must lie in (0, 1)");
  if (!(element_gain > 0.0)) throw ValidationError("link: element gain must be > 0");
  if (!(max_interference >= 0.0))
    throw ValidationError("link: max interference must be >= 0");
  if (!(noise_power_w > 0.0)) throw ValidationError("link: noise power must be > 0");
  if (!(bandwidth_hz > 0.0)) throw ValidationError("link: bandwidth must be > 0");
  if (antennas < 1) throw ValidationError("link: need at least one antenna");
  if (!(csi_error >= 0.0 && csi_error <= 1.0))
    throw ValidationError("link: csi error must lie in [0, 1]");
}

double LinkChannel::large_scale_gain() const {
  const double g_tx = antenna_gain(tx_misalignment_rad, tx_beamwidth_rad, sidelobe_gain);
  const double g_rx = antenna_gain(rx_misalignment_rad, rx_beamwidth_rad, sidelobe_gain);
  const double loss_db = pathloss_los_db(distance_m) + extra_loss_db;
  return g_tx * g_rx * element_gain * units::db_to_linear(-loss_db) / noise_power_w;
}

double sample_array_gain(int antennas, double csi_error, SplitMix64& rng) {
  // Entries of sqrt(N) w are CN(0, 1): real and imaginary parts N(0, 1/2).
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  const double keep = std::sqrt(1.0 - csi_error * csi_error);
  std::complex<double> inner{0.0, 0.0};
  double est_norm2 = 0.0;
  thread_local std::vector<std::complex<double>> h;
  h.resize(static_cast<std::size_t>(antennas));
  for (auto& hk : h) hk = {half(rng), half(rng)};
  for (const auto& hk : h) {
    const std::complex<double> noise{half(rng), half(rng)};
    const std::complex<double> est = keep * hk + csi_error * noise;
    inner += std::conj(hk) * est;
    est_norm2 += std::norm(est);
  }
  if (est_norm2 <= 0.0) return 0.0;
  return std::norm(inner) / est_norm2;
}

double mean_array_gain_mc(int antennas, double csi_error, std::uint64_t samples,
                          std::uint64_t seed) {
  if (samples == 0) throw ValidationError("mean_array_gain_mc: samples must be >= 1");
  auto rng = make_stream(seed, Stream::kMonteCarlo);
  double acc = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) acc += sample_array_gain(antennas, csi_error, rng);
  return acc / static_cast<double>(samples);
}

double ergodic_rate_mc(const LinkChannel& link, double power_w,
                       std::span<const Interferer> interferers,
                       std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw ValidationError("ergodic_rate_mc: samples must be >= 1");
  link.validate();
  if (power_w < 0.0) throw ValidationError("ergodic_rate_mc: power must be >= 0");
  if (power_w == 0.0) return 0.0;

  const double signal_scale = power_w * link.large_scale_gain();
  auto rng = make_stream(seed, Stream::kMonteCarlo);
  double acc = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const double signal = signal_scale * sample_array_gain(link.antennas, link.csi_error, rng);
    double interference = 0.0;
    for (const auto& itf : interferers) {
      interference += itf.power_w * itf.large_scale_gain *
                      sample_array_gain(link.antennas, 1.0, rng);
    }
    // Gains are noise-normalised, so the noise term is 1.
    acc += std::log2(1.0 + signal / (interference + 1.0));
  }
  return link.bandwidth_hz * acc / static_cast<double>(samples);
}

}  // namespace mmhop
