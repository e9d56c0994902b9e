#include "gsimg/pipeline.hpp"

#include <chrono>

#include "gsimg/bitstream.hpp"
#include "gsimg/densifier.hpp"
#include "gsimg/metrics.hpp"
#include "gsimg/rasterizer.hpp"

namespace gsimg {

CompressionResult compress(const ImagePlane& gt, const TrainConfig& cfg, const BitProfile& profile,
                           const ProgressFn& progress) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  CompressionResult out;

  Trainer trainer(gt, cfg);
  trainer.run_until(cfg.warmup_iterations, progress);
  out.history = trainer.history();
  out.warmup_psnr = psnr_of_cloud(trainer.cloud(), gt, cfg.cutoff_sigmas);

  GaussianCloud warm = trainer.cloud();
  prune(warm);
  const QuantizerBank bank = calibrate_bank(warm, profile);
  QatResult qat = qat_finetune(gt, std::move(warm), bank, cfg, progress);
  out.calibrated_psnr = qat.psnr_after_calibration;
  out.history.insert(out.history.end(), qat.history.begin(), qat.history.end());

  out.bank = qat.bank.rounded_to_float();
  out.cloud = std::move(qat.cloud);
  out.stream = encode(out.cloud, out.bank, gt.dims());
  out.encode_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  out.fake_quant_render = render(fake_quantized_cloud(out.cloud, out.bank), gt.dims(), cfg.cutoff_sigmas);
  const ImagePlane shown = clamped(out.fake_quant_render);
  out.psnr = psnr(shown, gt);
  out.ms_ssim = ms_ssim(shown, gt);
  out.bpp = bpp(out.stream.size(), gt.dims());
  return out;
}

}  // namespace gsimg
