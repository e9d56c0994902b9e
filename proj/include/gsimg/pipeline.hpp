#pragma once

#include <cstdint>
#include <vector>

#include "gsimg/config.hpp"
#include "gsimg/image.hpp"
#include "gsimg/qat.hpp"
#include "gsimg/quantizer.hpp"
#include "gsimg/trainer.hpp"

namespace gsimg {

struct CompressionResult {
  std::vector<std::uint8_t> stream;
  GaussianCloud cloud;           // trained attributes after QAT
  QuantizerBank bank;            // as stored (float32-rounded)
  ImagePlane fake_quant_render;  // unclamped render of the dequantized cloud
  std::vector<IterationRecord> history;  // warm-up followed by QAT records
  double warmup_psnr = 0.0;      // unquantized, at the end of warm-up
  double calibrated_psnr = 0.0;  // fake-quantized, before QAT
  double psnr = 0.0;             // fake-quantized, after QAT
  double ms_ssim = 0.0;
  double bpp = 0.0;
  double encode_seconds = 0.0;
};

// Warm-up fitting for cfg.warmup_iterations (growth and pruning on the usual
// schedule), min/max calibration of the bank on the warm cloud, QAT up to
// cfg.total_iterations, then serialization.
CompressionResult compress(const ImagePlane& gt, const TrainConfig& cfg,
                           const BitProfile& profile = {}, const ProgressFn& progress = {});

}  // namespace gsimg
