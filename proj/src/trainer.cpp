#include "gsimg/trainer.hpp"

#include <chrono>
#include <stdexcept>

#include "gsimg/metrics.hpp"
#include "gsimg/rasterizer.hpp"
#include "scalar_view.hpp"

namespace gsimg {

L2Loss l2_loss(const ImagePlane& rendered, const ImagePlane& gt) {
  if (rendered.dims() != gt.dims()) throw std::invalid_argument("l2_loss: dimension mismatch");
  L2Loss out{0.0, ImagePlane(gt.dims())};
  const auto r = rendered.data();
  const auto g = gt.data();
  auto d = out.gradient.data();
  const double n = static_cast<double>(r.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double diff = r[i] - g[i];
    sum += diff * diff;
    d[i] = 2.0 * diff / n;
  }
  out.loss = sum / n;
  return out;
}

double psnr_of_cloud(const GaussianCloud& cloud, const ImagePlane& gt, double cutoff_sigmas) {
  return psnr(clamped(render(cloud, gt.dims(), cutoff_sigmas)), gt);
}

Trainer::Trainer(const ImagePlane& gt, const TrainConfig& cfg)
    : gt_(gt), cfg_(cfg), caf_(CafPolicy::from_config(cfg)), rng_(cfg.seed) {
  cfg_.validate();
  if (gt.empty()) throw std::invalid_argument("Trainer: empty ground-truth image");
  const auto start = std::chrono::steady_clock::now();
  cloud_ = cfg_.enable_densification
               ? sparse_init(cfg_.max_gaussians, gt.dims(), cfg_.variant, caf_, rng_)
               : random_init(cfg_.max_gaussians, cfg_.max_gaussians, gt.dims(), cfg_.variant, caf_,
                             rng_);
  apply_caf_policy(cloud_, caf_);
  adam_.resize(cloud_.size());
  elapsed_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void Trainer::record(long t, double loss, const ImagePlane& rendered, const ProgressFn& progress) {
  IterationRecord rec{t, loss, psnr(clamped(rendered), gt_), cloud_.size()};
  history_.push_back(rec);
  if (progress) progress(rec);
}

void Trainer::run_until(long iteration, const ProgressFn& progress) {
  const long stop = std::min(iteration, cfg_.total_iterations);
  const auto start = std::chrono::steady_clock::now();
  if (history_.empty() && stop <= 0) {
    const ImagePlane rendered = render(cloud_, gt_.dims(), cfg_.cutoff_sigmas);
    record(0, l2_loss(rendered, gt_).loss, rendered, progress);
  }
  while (t_ < stop) step(progress);
  elapsed_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void Trainer::step(const ProgressFn& progress) {
  const ImageDims dims = gt_.dims();
  const ImagePlane rendered = render(cloud_, dims, cfg_.cutoff_sigmas);
  const L2Loss loss = l2_loss(rendered, gt_);
  if (t_ == 0) record(0, loss.loss, rendered, progress);
  ++t_;
  const long t = t_;
  if (t % cfg_.log_interval == 0 || t == cfg_.total_iterations) {
    record(t, loss.loss, rendered, progress);
  }

  const RenderGradients grads = render_backward(cloud_, dims, loss.gradient, cfg_.cutoff_sigmas);
  const auto cov_grads = covariance_param_gradients(cloud_, grads);
  const double lr_scale = cfg_.attribute_lr_scale(t);
  ++adam_.step;
  adam_.position.update(scalar_view(cloud_.positions()), scalar_view(std::span(grads.d_position)),
                        cfg_.lr.position * lr_scale, adam_.step, adam_.hyper);
  adam_.covariance.update(scalar_view(cloud_.covariances()), scalar_view(std::span(cov_grads)),
                          cfg_.lr.covariance * lr_scale, adam_.step, adam_.hyper);
  adam_.color.update(scalar_view(cloud_.colors()), scalar_view(std::span(grads.d_color)),
                     cfg_.lr.color * lr_scale, adam_.step, adam_.hyper);

  if (cfg_.is_prune_iteration(t)) {
    const PruneResult pruned = prune(cloud_);
    if (pruned.removed > 0) adam_.retain(pruned.kept);
  }
  if (cfg_.is_growth_iteration(t)) {
    const ImagePlane current = render(cloud_, dims, cfg_.cutoff_sigmas);
    adam_.append(grow(cloud_, gt_, current, caf_, rng_));
  }
}

FitReport Trainer::report() const {
  FitReport r;
  r.history = history_;
  r.encode_seconds = elapsed_;
  r.final_psnr = psnr_of_cloud(cloud_, gt_, cfg_.cutoff_sigmas);
  r.cloud = cloud_;
  return r;
}

FitReport fit(const ImagePlane& gt, const TrainConfig& cfg, const ProgressFn& progress) {
  Trainer trainer(gt, cfg);
  trainer.run_until(cfg.total_iterations, progress);
  return trainer.report();
}

}  // namespace gsimg
