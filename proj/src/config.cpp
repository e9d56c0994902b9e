#include "gsimg/config.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gsimg {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
}

}  // namespace

void TrainConfig::validate() const {
  require(max_gaussians >= 2, "max_gaussians must be >= 2");
  require(total_iterations >= 0, "total_iterations must be >= 0");
  require(grow_interval > 0, "grow_interval must be positive");
  require(prune_interval > 0, "prune_interval must be positive");
  require(grow_start >= 0 && grow_start <= grow_stop, "grow_start must not exceed grow_stop");
  require(grow_stop <= total_iterations || !enable_densification,
          "grow_stop must not exceed total_iterations");
  require(lr.position >= 0 && lr.covariance >= 0 && lr.color >= 0, "learning rates must be >= 0");
  require(quantizer_lr >= 0, "quantizer_lr must be >= 0");
  require(warmup_iterations >= 0, "warmup_iterations must be >= 0");
  require(caf_alpha > 0, "caf_alpha must be positive");
  require(constant_filter_variance >= 0, "constant_filter_variance must be >= 0");
  require(cutoff_sigmas > 0, "cutoff_sigmas must be positive");
  require(log_interval > 0, "log_interval must be positive");
}

TrainConfig TrainConfig::with_scaled_schedule(long iterations) const {
  constexpr double kReference = 50'000.0;
  const double f = static_cast<double>(iterations) / kReference;
  auto scale = [f](long v) { return std::max<long>(1, std::lround(static_cast<double>(v) * f)); };
  TrainConfig out = *this;
  out.total_iterations = iterations;
  out.grow_start = scale(grow_start);
  out.grow_interval = scale(grow_interval);
  out.grow_stop = std::min(scale(grow_stop), iterations);
  out.grow_start = std::min(out.grow_start, out.grow_stop);
  out.lr_decay_iteration = scale(lr_decay_iteration);
  out.quantizer_lr_decay_iteration = scale(quantizer_lr_decay_iteration);
  out.warmup_iterations = std::min(scale(warmup_iterations), iterations);
  return out;
}

}  // namespace gsimg
