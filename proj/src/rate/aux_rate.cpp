#include "mmhop/rate/aux_rate.hpp"

#include <algorithm>

#include "mmhop/common/error.hpp"

namespace mmhop {

double aux_optimum(double y, double nu, double a_max) {
  if (!(y >= 0.0) || !(nu >= 0.0)) throw ValidationError("aux_optimum: Y and nu must be >= 0");
  if (y == 0.0) return a_max;
  return std::min(std::max(nu / y, 0.0), a_max);
}

}  // namespace mmhop
