#pragma once

#include <cmath>
#include <numbers>

namespace mmhop::units {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return db_to_linear(dbm - 30.0); }

// Thermal noise over `bandwidth_hz` at 290 K plus a receiver noise figure.
inline double noise_power_watts(double bandwidth_hz, double noise_figure_db) {
  return dbm_to_watts(-174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

// Converts between bits carried in one slot and the spectral efficiency in
// nats per channel use that the rate-allocation program works with.
struct SlotScale {
  double bandwidth_hz;
  double slot_seconds;

  double channel_uses() const { return bandwidth_hz * slot_seconds; }
  double bits_to_nats(double bits) const {
    return bits * std::numbers::ln2 / channel_uses();
  }
  double nats_to_bits(double nats) const {
    return nats * channel_uses() / std::numbers::ln2;
  }
};

}  // namespace mmhop::units
