#pragma once

namespace mmhop {

// Sectored radiation pattern: flat main lobe of width `beamwidth_rad`, constant
// side lobe `sidelobe_gain` elsewhere. The main-lobe level is chosen so the
// pattern integrates to 2*pi over the circle.
//
// Note: `sidelobe_gain` is the side-lobe level only. Receiver thermal noise is
// a separate LinkChannel field even though both are often written as eta.
double antenna_gain(double misalignment_rad, double beamwidth_rad,
                    double sidelobe_gain);

// Urban line-of-sight path loss at 28 GHz, PL(d) = 61.4 + 20 log10(d) dB.
// Valid from the 1 m reference distance.
double pathloss_los_db(double distance_m);

// Shannon rate W log2(1 + p g) in bit/s for an effective (noise-normalised)
// gain g.
double link_rate_bps(double power_w, double effective_gain, double bandwidth_hz);

}  // namespace mmhop
