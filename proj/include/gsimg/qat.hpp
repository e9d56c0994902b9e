#pragma once

#include <array>
#include <vector>

#include "gsimg/config.hpp"
#include "gsimg/gaussian_cloud.hpp"
#include "gsimg/image.hpp"
#include "gsimg/quantizer.hpp"
#include "gsimg/trainer.hpp"

namespace gsimg {

using ChannelValues = std::array<double, kChannelCount>;

/// Stored attributes of primitive i in bank channel order: position,
/// filtered covariance entries, color.
ChannelValues channel_values(const GaussianCloud& cloud, std::size_t i);

/// Bank with the given bit depths, each channel min/max-calibrated on the
/// cloud. Throws if the cloud is empty or holds a non-positive variance.
QuantizerBank calibrate_bank(const GaussianCloud& cloud, const BitProfile& profile);

/// Quantize then dequantize every channel. The result is a Direct-variant
/// cloud holding the dequantized filtered covariances with s_i = 0, i.e.
/// exactly what a decoder reconstructs.
GaussianCloud fake_quantized_cloud(const GaussianCloud& cloud, const QuantizerBank& bank);

struct QatResult {
  GaussianCloud cloud;
  QuantizerBank bank;
  std::vector<IterationRecord> history;
  double psnr_after_calibration = 0.0;
  double final_psnr = 0.0;  // of the fake-quantized cloud
  double seconds = 0.0;
};

// Quantization-aware fine-tuning for iterations warmup_iterations + 1 ..
// total_iterations. Every iteration renders the fake-quantized cloud and
// back-propagates through the straight-through quantizers into both the
// attributes (Adam, attribute lr schedule) and the quantizer scales and
// offsets (Adam, quantizer lr schedule). Pruning of primitives whose
// dequantized covariance is not renderable continues every prune_interval
// iterations; no growth. Primitives that are not renderable before QAT are
// pruned up front.
QatResult qat_finetune(const ImagePlane& gt, GaussianCloud cloud, QuantizerBank bank,
                       const TrainConfig& cfg, const ProgressFn& progress = {});

}  // namespace gsimg
