#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "gsimg/caf.hpp"
#include "gsimg/gaussian_cloud.hpp"
#include "gsimg/image.hpp"

namespace gsimg {

using Rng = std::mt19937_64;

struct PixelCoord {
  int row = 0;
  int col = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Per-pixel L1 distortion, averaged over the three channels.
class DistortionMap {
 public:
  /// Throws std::invalid_argument on mismatched dimensions.
  static DistortionMap between(const ImagePlane& gt, const ImagePlane& rendered);

  ImageDims dims() const noexcept { return dims_; }
  double at(int row, int col) const noexcept {
    return values_[static_cast<std::size_t>(row) * static_cast<std::size_t>(dims_.width) +
                   static_cast<std::size_t>(col)];
  }
  std::span<const double> values() const noexcept { return values_; }

  /// The k most distorted pixels, largest first; equal values are ordered by
  /// ascending row-major index. k is clamped to the pixel count.
  std::vector<PixelCoord> top_k(std::size_t k) const;

 private:
  ImageDims dims_{};
  std::vector<double> values_;
};

/// Raw covariance parameters drawn like the initial primitives:
///   Direct:   xx, yy ~ U[0.5, 1), xy ~ U[0, 1)
///   Cholesky: l11, l22 ~ U[0.5, 1), l21 ~ U[0, 1)
///   RotScale: theta ~ U[0, 2pi), s1, s2 ~ U[0.5, 1)
CovParams sample_covariance_params(CovarianceVariant variant, Rng& rng);

/// `count` primitives with uniform positions over the image, sampled
/// covariances, zero colors and the policy's filter variance for `count`.
GaussianCloud random_init(std::size_t count, std::size_t max_budget, ImageDims dims,
                          CovarianceVariant variant, const CafPolicy& caf, Rng& rng);

/// random_init with floor(M/2) primitives. Throws on M < 2.
GaussianCloud sparse_init(std::size_t max_budget, ImageDims dims, CovarianceVariant variant,
                          const CafPolicy& caf, Rng& rng);

/// Number of primitives to add at a growth event: floor((M - N) / 2).
std::size_t growth_count(std::size_t count, std::size_t max_budget);

/// Appends growth_count primitives at the most distorted pixel centers with
/// the ground-truth colors there. Returns the number added.
std::size_t grow(GaussianCloud& cloud, const ImagePlane& gt, const ImagePlane& rendered,
                 const CafPolicy& caf, Rng& rng);

struct PruneResult {
  std::size_t removed = 0;
  std::vector<std::size_t> kept;  // surviving original indices, ascending
};

/// Drops primitives whose filtered covariance fails is_psd or is singular.
PruneResult prune(GaussianCloud& cloud);

}  // namespace gsimg
