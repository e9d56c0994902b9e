#pragma once

#include <cstddef>
#include <vector>

#include "gsimg/config.hpp"
#include "gsimg/gaussian_cloud.hpp"
#include "gsimg/image.hpp"

namespace gsimg {

/// Gradients of <d_loss, render(cloud)> with respect to each primitive.
/// d_covariance is taken w.r.t. the filtered covariance entries, in the
/// SymGrad convention (off-diagonal doubled); see covariance_param_gradient.
struct RenderGradients {
  std::vector<Vec2> d_position;
  std::vector<SymGrad> d_covariance;
  std::vector<Rgb> d_color;

  explicit RenderGradients(std::size_t n = 0) : d_position(n), d_covariance(n), d_color(n) {}
  std::size_t size() const noexcept { return d_position.size(); }
};

// Accumulated-sum rendering. Pixel (row, col) is sampled at (col + 0.5, row + 0.5):
//
//   C(x) = sum_i c_i exp(-1/2 d^T (Sigma_i + s_i I)^-1 d),  d = x - mu_i
//
// Primitives whose filtered covariance is not PSD or is singular contribute
// nothing. Each primitive is evaluated only inside an axis-aligned box of
// cutoff_sigmas standard deviations per axis; pass kNoCutoff to disable.
// Output is not clamped. Parallel over row bands; the per-pixel summation
// order is always ascending primitive index, so the result does not depend
// on the worker count.
ImagePlane render(const GaussianCloud& cloud, ImageDims dims,
                  double cutoff_sigmas = kDefaultCutoffSigmas);

// Analytic backward pass of render() contracted with d_loss (same shape as
// the image). Uses the same cutoff boxes as the forward call. Parallel over
// primitives; each primitive's sums are reduced per row in a fixed order, so
// results are identical for any worker count.
RenderGradients render_backward(const GaussianCloud& cloud, ImageDims dims, const ImagePlane& d_loss,
                                double cutoff_sigmas = kDefaultCutoffSigmas);

/// Per-pixel total footprint weight sum_i g_i(x) (colors ignored), row-major.
std::vector<double> render_weight(const GaussianCloud& cloud, ImageDims dims,
                                  double cutoff_sigmas = kDefaultCutoffSigmas);

// Serial reference implementations: every pixel against every primitive, no
// cutoff, no binning, no threads. Kept as test oracles and benchmark baselines.
ImagePlane render_naive(const GaussianCloud& cloud, ImageDims dims);
RenderGradients render_backward_naive(const GaussianCloud& cloud, ImageDims dims,
                                      const ImagePlane& d_loss);

/// Chain-rules d_covariance of `grads` into the cloud's covariance parameters.
std::vector<CovParams> covariance_param_gradients(const GaussianCloud& cloud,
                                                  const RenderGradients& grads);

}  // namespace gsimg
