#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gsimg {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moments for one attribute array of `stride` scalars per
/// primitive. Resized in lockstep with the cloud.
class AdamMoments {
 public:
  explicit AdamMoments(std::size_t stride = 1) : stride_(stride) {}

  std::size_t stride() const noexcept { return stride_; }
  std::size_t primitives() const noexcept { return m_.size() / stride_; }

  void resize(std::size_t primitives);
  /// Same index convention as GaussianCloud::retain.
  void retain(std::span<const std::size_t> kept);
  /// Zero-initialized moments for `count` new primitives.
  void append(std::size_t count) { resize(primitives() + count); }

  /// One bias-corrected Adam update; `step` is the 1-based global step count.
  void update(std::span<double> params, std::span<const double> grads, double lr, long step,
              const AdamHyper& hyper);

  friend bool operator==(const AdamMoments&, const AdamMoments&) = default;

 private:
  std::size_t stride_;
  std::vector<double> m_;
  std::vector<double> v_;
};

/// Adam state for a Gaussian cloud: positions (2), covariance params (3), colors (3).
struct AdamState {
  AdamHyper hyper;
  long step = 0;
  AdamMoments position{2};
  AdamMoments covariance{3};
  AdamMoments color{3};

  void resize(std::size_t primitives) {
    position.resize(primitives);
    covariance.resize(primitives);
    color.resize(primitives);
  }
  void retain(std::span<const std::size_t> kept) {
    position.retain(kept);
    covariance.retain(kept);
    color.retain(kept);
  }
  void append(std::size_t count) {
    position.append(count);
    covariance.append(count);
    color.append(count);
  }
};

}  // namespace gsimg
