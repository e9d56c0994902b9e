#pragma once

#include <cmath>

#include "gsimg/covariance.hpp"

namespace gsimg::detail {

inline double pixel_center(int index) noexcept { return static_cast<double>(index) + 0.5; }

// Shared by the binned and the reference rasterizers so both evaluate the
// exponent with the same operation order.
inline double footprint(const Sym2& conic, double dx, double dy) noexcept {
  const double q = conic.xx * dx * dx + 2.0 * conic.xy * dx * dy + conic.yy * dy * dy;
  return std::exp(-0.5 * q);
}

}  // namespace gsimg::detail
