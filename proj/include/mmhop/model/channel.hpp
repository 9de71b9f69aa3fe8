#pragma once

#include <cstdint>
#include <span>

#include "mmhop/common/rng.hpp"

namespace mmhop {

// Static description of one directed mmWave link. Spatial correlation is taken
// as the identity, so small-scale fading enters only through the array gain
// |h^H v|^2 drawn per slot.
struct LinkChannel {
  double distance_m = 50.0;
  double tx_beamwidth_rad = 0.5235987755982988;  // 30 degrees
  double rx_beamwidth_rad = 0.5235987755982988;
  double tx_misalignment_rad = 0.0;
  double rx_misalignment_rad = 0.0;
  double sidelobe_gain = 0.1;
  // Fixed element gains of both ends, linear (e.g. 5 dBi SCBS panels).
  double element_gain = 1.0;
  // Interference margin I^max relative to the noise floor, linear.
  double max_interference = 0.0;
  double noise_power_w = 1e-12;
  double bandwidth_hz = 1e9;
  int antennas = 8;
  // CSI estimation error tau in [0, 1]; 0 is perfect CSI.
  double csi_error = 0.0;
  // Additional loss applied on top of LOS path loss (blockage), dB.
  double extra_loss_db = 0.0;

  void validate() const;

  // Received power per transmitted watt per unit array gain, normalised by the
  // noise power: analog beam gains x element gains x path loss / noise.
  double large_scale_gain() const;

  // g~ for a given small-scale array gain draw.
  double normalized_gain(double array_gain) const {
    return large_scale_gain() * array_gain;
  }

  // g = g~ / (1 + I^max).
  double effective_gain(double array_gain) const {
    return normalized_gain(array_gain) / (1.0 + max_interference);
  }
};

// Draws |h^H v|^2 for h = sqrt(N) w, w ~ CN(0, I/N), with a unit-norm conjugate
// precoder v built from the estimate sqrt(N)(sqrt(1 - tau^2) w + tau w_hat).
double sample_array_gain(int antennas, double csi_error, SplitMix64& rng);

// Monte Carlo mean of sample_array_gain.
double mean_array_gain_mc(int antennas, double csi_error, std::uint64_t samples,
                          std::uint64_t seed);

struct Interferer {
  double power_w = 0.0;
  // Large-scale gain of the interfering path, normalised by the victim's noise.
  double large_scale_gain = 0.0;
};

// Monte Carlo estimate of the ergodic rate (bit/s) on `link` with transmit
// power `power_w` and a set of co-channel interferers. Interferers' precoders
// are matched to other receivers, so their array gain is drawn with tau = 1.
double ergodic_rate_mc(const LinkChannel& link, double power_w,
                       std::span<const Interferer> interferers,
                       std::uint64_t samples, std::uint64_t seed);

}  // namespace mmhop
