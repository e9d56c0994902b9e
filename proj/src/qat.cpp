#include "gsimg/qat.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gsimg/densifier.hpp"
#include "gsimg/metrics.hpp"
#include "gsimg/rasterizer.hpp"
#include "scalar_view.hpp"

namespace gsimg {

ChannelValues channel_values(const GaussianCloud& cloud, std::size_t i) {
  const Vec2 mu = cloud.positions()[i];
  const Sym2 cov = cloud.filtered_covariance(i);
  const Rgb& c = cloud.colors()[i];
  return {mu.x, mu.y, cov.xx, cov.xy, cov.yy, c[0], c[1], c[2]};
}

QuantizerBank calibrate_bank(const GaussianCloud& cloud, const BitProfile& profile) {
  if (cloud.empty()) throw std::invalid_argument("calibrate_bank: empty cloud");
  QuantizerBank bank = QuantizerBank::with_profile(profile);
  std::vector<double> values(cloud.size());
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    for (std::size_t i = 0; i < cloud.size(); ++i) values[i] = channel_values(cloud, i)[c];
    calibrate(bank[c], values);
  }
  return bank;
}

GaussianCloud fake_quantized_cloud(const GaussianCloud& cloud, const QuantizerBank& bank) {
  std::vector<Vec2> positions(cloud.size());
  std::vector<Sym2> covariances(cloud.size());
  std::vector<Rgb> colors(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const ChannelValues v = channel_values(cloud, i);
    ChannelValues q{};
    for (std::size_t c = 0; c < kChannelCount; ++c) q[c] = fake_quantize(bank[c], v[c]);
    positions[i] = {q[kMeanX], q[kMeanY]};
    covariances[i] = {q[kCovXX], q[kCovXY], q[kCovYY]};
    colors[i] = {q[kRed], q[kGreen], q[kBlue]};
  }
  return make_direct_cloud(positions, covariances, colors, cloud.max_budget());
}

namespace {

// Quantizer parameters flattened as (scale, offset) pairs for Adam.
std::array<double, 2 * kChannelCount> bank_params(const QuantizerBank& bank) {
  std::array<double, 2 * kChannelCount> p{};
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    p[2 * c] = bank[c].scale;
    p[2 * c + 1] = bank[c].offset;
  }
  return p;
}

void set_bank_params(QuantizerBank& bank, const std::array<double, 2 * kChannelCount>& p) {
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    bank[c].scale = std::max(p[2 * c], kMinQuantScale);
    bank[c].offset = p[2 * c + 1];
  }
}

void retain_both(GaussianCloud& cloud, AdamState& adam, const std::vector<std::size_t>& kept) {
  if (kept.size() == cloud.size()) return;
  cloud.retain(kept);
  adam.retain(kept);
}

// Log-domain channels need strictly positive stored variances.
std::vector<std::size_t> with_positive_variances(const GaussianCloud& cloud) {
  std::vector<std::size_t> kept;
  kept.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Sym2 c = cloud.filtered_covariance(i);
    if (c.xx > 0.0 && c.yy > 0.0) kept.push_back(i);
  }
  return kept;
}

}  // namespace

QatResult qat_finetune(const ImagePlane& gt, GaussianCloud cloud, QuantizerBank bank,
                       const TrainConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const ImageDims dims = gt.dims();

  prune(cloud);
  AdamState adam;
  adam.resize(cloud.size());
  AdamMoments quant_moments(2);
  quant_moments.resize(kChannelCount);
  long quant_step = 0;

  QatResult result;
  result.psnr_after_calibration =
      psnr(clamped(render(fake_quantized_cloud(cloud, bank), dims, cfg.cutoff_sigmas)), gt);

  for (long t = cfg.warmup_iterations + 1; t <= cfg.total_iterations; ++t) {
    const GaussianCloud fq = fake_quantized_cloud(cloud, bank);
    const ImagePlane rendered = render(fq, dims, cfg.cutoff_sigmas);
    const L2Loss loss = l2_loss(rendered, gt);
    if (t % cfg.log_interval == 0 || t == cfg.total_iterations) {
      IterationRecord rec{t, loss.loss, psnr(clamped(rendered), gt), cloud.size()};
      result.history.push_back(rec);
      if (progress) progress(rec);
    }

    const RenderGradients grads = render_backward(fq, dims, loss.gradient, cfg.cutoff_sigmas);
    const std::size_t n = cloud.size();
    std::vector<Vec2> d_position(n);
    std::vector<CovParams> d_covariance(n);
    std::vector<Rgb> d_color(n);
    std::array<double, 2 * kChannelCount> d_bank{};
    const auto cov_params = cloud.covariances();
    for (std::size_t i = 0; i < n; ++i) {
      const ChannelValues v = channel_values(cloud, i);
      const ChannelValues upstream = {grads.d_position[i].x,  grads.d_position[i].y,
                                      grads.d_covariance[i][0], grads.d_covariance[i][1],
                                      grads.d_covariance[i][2], grads.d_color[i][0],
                                      grads.d_color[i][1],    grads.d_color[i][2]};
      ChannelValues dv{};
      for (std::size_t c = 0; c < kChannelCount; ++c) {
        const FakeQuantGrad g = fake_quant_backward(bank[c], v[c], upstream[c]);
        dv[c] = g.d_value;
        d_bank[2 * c] += g.d_scale;
        d_bank[2 * c + 1] += g.d_offset;
      }
      d_position[i] = {dv[kMeanX], dv[kMeanY]};
      // Sigma' = Sigma + s I, so the filtered-entry gradient is the raw one.
      d_covariance[i] = covariance_param_gradient(cloud.variant(), cov_params[i],
                                                  {dv[kCovXX], dv[kCovXY], dv[kCovYY]});
      d_color[i] = {dv[kRed], dv[kGreen], dv[kBlue]};
    }
    if (cfg.quantizer_grad_scaling && n > 0) {
      for (std::size_t c = 0; c < kChannelCount; ++c) {
        const double s = 1.0 / std::sqrt(static_cast<double>(n) * bank[c].max_code());
        d_bank[2 * c] *= s;
        d_bank[2 * c + 1] *= s;
      }
    }

    const double lr_scale = cfg.attribute_lr_scale(t);
    ++adam.step;
    adam.position.update(scalar_view(cloud.positions()), scalar_view(std::span(d_position)),
                         cfg.lr.position * lr_scale, adam.step, adam.hyper);
    adam.covariance.update(scalar_view(cloud.covariances()), scalar_view(std::span(d_covariance)),
                           cfg.lr.covariance * lr_scale, adam.step, adam.hyper);
    adam.color.update(scalar_view(cloud.colors()), scalar_view(std::span(d_color)),
                      cfg.lr.color * lr_scale, adam.step, adam.hyper);
    auto params = bank_params(bank);
    quant_moments.update(params, d_bank, cfg.quantizer_lr_at(t), ++quant_step, adam.hyper);
    set_bank_params(bank, params);

    retain_both(cloud, adam, with_positive_variances(cloud));
    if (cfg.is_prune_iteration(t)) {
      const GaussianCloud dequantized = fake_quantized_cloud(cloud, bank);
      std::vector<std::size_t> kept;
      for (std::size_t i = 0; i < dequantized.size(); ++i) {
        if (is_renderable(dequantized.filtered_covariance(i))) kept.push_back(i);
      }
      retain_both(cloud, adam, kept);
    }
  }

  result.final_psnr =
      psnr(clamped(render(fake_quantized_cloud(cloud, bank), dims, cfg.cutoff_sigmas)), gt);
  result.cloud = std::move(cloud);
  result.bank = bank;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace gsimg
