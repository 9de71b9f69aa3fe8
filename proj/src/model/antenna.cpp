#include "mmhop/model/antenna.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mmhop/common/error.hpp"

namespace mmhop {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLosInterceptDb = 61.4;
constexpr double kLosSlopeDb = 20.0;
}  // namespace

double antenna_gain(double misalignment_rad, double beamwidth_rad,
                    double sidelobe_gain) {
  if (!(beamwidth_rad > 0.0) || !(beamwidth_rad < kTwoPi)) {
    std::ostringstream os;
    os << "antenna_gain: beamwidth " << beamwidth_rad << " rad outside (0, 2pi)";
    throw ValidationError(os.str());
  }
  if (!(sidelobe_gain > 0.0) || sidelobe_gain > 1.0) {
    std::ostringstream os;
    os << "antenna_gain: side-lobe gain " << sidelobe_gain << " outside (0, 1]";
    throw ValidationError(os.str());
  }
  if (std::abs(misalignment_rad) <= beamwidth_rad / 2.0) {
    return (kTwoPi - (kTwoPi - beamwidth_rad) * sidelobe_gain) / beamwidth_rad;
  }
  return sidelobe_gain;
}

double pathloss_los_db(double distance_m) {
  if (!(distance_m >= 1.0)) {
    std::ostringstream os;
    os << "pathloss_los_db: distance " << distance_m
       << " m is below the 1 m reference distance";
    throw ValidationError(os.str());
  }
  return kLosInterceptDb + kLosSlopeDb * std::log10(distance_m);
}

double link_rate_bps(double power_w, double effective_gain, double bandwidth_hz) {
  if (power_w < 0.0 || effective_gain < 0.0 || !(bandwidth_hz > 0.0)) {
    throw ValidationError("link_rate_bps: requires p >= 0, g >= 0, W > 0");
  }
  return bandwidth_hz * std::log2(1.0 + power_w * effective_gain);
}

}  // namespace mmhop
