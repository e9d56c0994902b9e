#pragma once

#include <cstddef>

#include "gsimg/config.hpp"
#include "gsimg/gaussian_cloud.hpp"
#include "gsimg/image.hpp"

namespace gsimg {

/// Filter variance for primitives created when the cloud holds `count`
/// primitives: s = H*W / (alpha * count). Throws on count == 0 or alpha <= 0.
double filter_variance_for_new(ImageDims dims, std::size_t count, double alpha);

/// Content-aware filter policy. Enabled: each primitive keeps the variance
/// assigned at its creation. Disabled: every primitive uses one constant.
struct CafPolicy {
  bool enabled = true;
  double alpha = 32.0;
  double constant_variance = 0.5;

  static CafPolicy from_config(const TrainConfig& cfg) {
    return {cfg.enable_caf, cfg.caf_alpha, cfg.constant_filter_variance};
  }

  /// Variance assigned to primitives created when the count reaches `count`.
  double variance_for_new(ImageDims dims, std::size_t count) const {
    return enabled ? filter_variance_for_new(dims, count, alpha) : constant_variance;
  }
};

/// Disabled policy: overwrite every s_i with the constant. Enabled: no-op,
/// creation-time values are kept.
void apply_caf_policy(GaussianCloud& cloud, const CafPolicy& policy);

/// Fraction of pixels whose total footprint weight is below `threshold`.
double hole_fraction(const GaussianCloud& cloud, ImageDims dims, double threshold,
                     double cutoff_sigmas = kDefaultCutoffSigmas);

}  // namespace gsimg
