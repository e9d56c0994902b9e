#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsimg/config.hpp"
#include "gsimg/image.hpp"

namespace gsimg {

/// PSNR reported for identical images.
inline constexpr double kIdenticalPsnr = std::numeric_limits<double>::infinity();

/// Mean squared error over all H*W*3 entries. Throws on dimension mismatch.
double mse(const ImagePlane& a, const ImagePlane& b);

/// 10 log10(1 / MSE) for [0,1] images; kIdenticalPsnr when MSE is zero.
double psnr(const ImagePlane& a, const ImagePlane& b);

/// Number of dyadic scales ms_ssim uses for an image of this size: up to
/// five, while the coarsest scale still holds the 11x11 window. 0 if even
/// the full-resolution image is too small.
int ms_ssim_scales(ImageDims dims);

// Multi-scale SSIM, averaged over channels. 11x11 Gaussian window
// (sigma 1.5, valid region only), K1 = 0.01, K2 = 0.03, data range 1.
// Contrast-structure terms at every scale, luminance only at the coarsest;
// 2x2 average pooling between scales; scale weights
// (0.0448, 0.2856, 0.3001, 0.2363, 0.1333), renormalized when fewer than
// five scales fit. Negative per-scale terms are clamped to zero, so the
// result lies in [0,1]. Throws std::invalid_argument when the image is
// smaller than 11x11 or dimensions differ.
double ms_ssim(const ImagePlane& a, const ImagePlane& b);

struct QualityReport {
  double psnr = 0.0;
  double ms_ssim = 0.0;
  std::optional<double> bpp;
  double encode_seconds = 0.0;
  double decode_fps = 0.0;
};

struct DecodeTiming {
  std::vector<double> seconds;  // one entry per repeat
  double median_seconds = 0.0;
  double fps = 0.0;
  ImagePlane first_render;  // unclamped render of the first repeat
};

/// Times decode + render of a .g2gs stream `repeats` times; FPS is taken
/// from the median wall time. Bitstream errors propagate.
DecodeTiming time_decode(std::span<const std::uint8_t> bytes, int repeats,
                         double cutoff_sigmas = kDefaultCutoffSigmas);

/// One row of the results CSV.
struct ResultRow {
  std::string image_id;
  std::size_t max_gaussians = 0;
  long iterations = 0;
  std::string variant;
  std::string flags;
  double psnr = 0.0;
  double ms_ssim = 0.0;
  std::optional<double> bpp;
  double encode_seconds = 0.0;
  std::optional<double> decode_fps;
};

std::string result_csv_header();
std::string to_csv(const ResultRow& row);

}  // namespace gsimg
