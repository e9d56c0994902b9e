#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

#include "gsimg/covariance.hpp"

namespace gsimg {

inline constexpr double kDefaultCutoffSigmas = 6.0;
inline constexpr double kNoCutoff = std::numeric_limits<double>::infinity();

struct LearningRates {
  double position = 0.18;
  double covariance = 0.18;
  double color = 0.18;
  friend bool operator==(const LearningRates&, const LearningRates&) = default;
};

struct TrainConfig {
  std::size_t max_gaussians = 10'000;
  long total_iterations = 50'000;
  long grow_interval = 5'000;
  long prune_interval = 100;
  long grow_start = 5'000;
  long grow_stop = 45'000;

  LearningRates lr;
  long lr_decay_iteration = 20'000;
  double lr_decay_factor = 0.5;

  double quantizer_lr = 0.001;
  long quantizer_lr_decay_iteration = 20'000;
  double quantizer_lr_decay_factor = 0.5;
  bool quantizer_grad_scaling = true;

  long warmup_iterations = 6'000;

  double caf_alpha = 32.0;
  double constant_filter_variance = 0.5;

  std::uint64_t seed = 0;
  CovarianceVariant variant = CovarianceVariant::Direct;
  bool enable_densification = true;
  bool enable_caf = true;

  double cutoff_sigmas = kDefaultCutoffSigmas;
  long log_interval = 100;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  /// Same config with every iteration milestone (growth window and interval,
  /// lr decay points, warm-up) rescaled from the default 50k-iteration
  /// timeline to `iterations`. The prune interval is left unchanged.
  TrainConfig with_scaled_schedule(long iterations) const;

  bool is_growth_iteration(long t) const noexcept {
    return enable_densification && t >= grow_start && t <= grow_stop &&
           (t - grow_start) % grow_interval == 0;
  }
  bool is_prune_iteration(long t) const noexcept {
    return enable_densification && t % prune_interval == 0;
  }
  double attribute_lr_scale(long t) const noexcept {
    return t >= lr_decay_iteration ? lr_decay_factor : 1.0;
  }
  double quantizer_lr_at(long t) const noexcept {
    return t >= quantizer_lr_decay_iteration ? quantizer_lr * quantizer_lr_decay_factor
                                             : quantizer_lr;
  }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

}  // namespace gsimg
