#pragma once

#include <functional>
#include <vector>

#include "gsimg/adam.hpp"
#include "gsimg/caf.hpp"
#include "gsimg/config.hpp"
#include "gsimg/densifier.hpp"
#include "gsimg/gaussian_cloud.hpp"
#include "gsimg/image.hpp"

namespace gsimg {

struct L2Loss {
  double loss = 0.0;
  ImagePlane gradient;  // d loss / d rendered
};

/// Mean of squared differences over all H*W*3 entries and its gradient
/// 2 (rendered - gt) / (H*W*3). Throws on dimension mismatch.
L2Loss l2_loss(const ImagePlane& rendered, const ImagePlane& gt);

struct IterationRecord {
  long iteration = 0;
  double loss = 0.0;
  double psnr = 0.0;  // of the clamped render
  std::size_t count = 0;
  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

using ProgressFn = std::function<void(const IterationRecord&)>;

struct FitReport {
  std::vector<IterationRecord> history;
  double encode_seconds = 0.0;
  double final_psnr = 0.0;
  GaussianCloud cloud;
};

/// PSNR of the cloud's render, clamped to [0,1], against gt.
double psnr_of_cloud(const GaussianCloud& cloud, const ImagePlane& gt,
                     double cutoff_sigmas = kDefaultCutoffSigmas);

// Representation fitting: Adam on positions, covariance parameters and
// colors under L2 loss. With densification enabled the cloud starts at M/2
// primitives, is pruned every prune_interval iterations and grows on the
// growth schedule; otherwise it starts with all M primitives and is never
// pruned or grown. Iteration t renders the parameters left by step t - 1;
// records are logged at t = 0, every log_interval iterations and at the end.
class Trainer {
 public:
  Trainer(const ImagePlane& gt, const TrainConfig& cfg);

  /// Runs iterations until `iteration` (capped at total_iterations).
  void run_until(long iteration, const ProgressFn& progress = {});

  long iteration() const noexcept { return t_; }
  const GaussianCloud& cloud() const noexcept { return cloud_; }
  const AdamState& adam() const noexcept { return adam_; }
  const std::vector<IterationRecord>& history() const noexcept { return history_; }
  double elapsed_seconds() const noexcept { return elapsed_; }

  FitReport report() const;

 private:
  void step(const ProgressFn& progress);
  void record(long t, double loss, const ImagePlane& rendered, const ProgressFn& progress);

  const ImagePlane& gt_;
  TrainConfig cfg_;
  CafPolicy caf_;
  Rng rng_;
  GaussianCloud cloud_;
  AdamState adam_;
  long t_ = 0;
  double elapsed_ = 0.0;
  std::vector<IterationRecord> history_;
};

FitReport fit(const ImagePlane& gt, const TrainConfig& cfg, const ProgressFn& progress = {});

}  // namespace gsimg
