#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "gsimg/densifier.hpp"
#include "gsimg/gaussian_cloud.hpp"
#include "gsimg/image.hpp"

namespace gsimg::test {

inline double rel_err(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Cloud of well-conditioned primitives: covariance parameters drawn so that
// every variant materializes a positive definite matrix of a few pixels.
inline GaussianCloud random_cloud(CovarianceVariant variant, std::size_t n, ImageDims dims,
                                  Rng& rng, double filter_variance = 0.3,
                                  std::size_t budget = 0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GaussianCloud cloud(variant, std::max(n, budget));
  for (std::size_t i = 0; i < n; ++i) {
    CovParams p{};
    switch (variant) {
      case CovarianceVariant::Direct: {
        const double a = 1.0 + 4.0 * u(rng), b = 1.0 + 4.0 * u(rng);
        p = {a, (u(rng) - 0.5) * std::sqrt(a * b), b};
        break;
      }
      case CovarianceVariant::Cholesky:
        p = {0.8 + 1.5 * u(rng), 2.0 * u(rng) - 1.0, 0.8 + 1.5 * u(rng)};
        break;
      case CovarianceVariant::RotScale:
        p = {6.283185307179586 * u(rng), 0.8 + 1.5 * u(rng), 0.8 + 1.5 * u(rng)};
        break;
    }
    cloud.append({{u(rng) * dims.width, u(rng) * dims.height},
                  p,
                  {2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0},
                  filter_variance});
  }
  return cloud;
}

inline ImagePlane random_image(ImageDims dims, Rng& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ImagePlane img(dims);
  for (double& v : img.data()) v = u(rng);
  return img;
}

inline double max_abs_diff(const ImagePlane& a, const ImagePlane& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace gsimg::test
