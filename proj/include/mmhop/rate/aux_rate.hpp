#pragma once

namespace mmhop {

// Auxiliary-rate optimum under logarithmic utility: min(max(nu / Y, 0), a_max),
// and a_max when Y = 0.
double aux_optimum(double y, double nu, double a_max);

}  // namespace mmhop
