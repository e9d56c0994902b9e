#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "gsimg/covariance.hpp"

namespace gsimg {

/// Continuous pixel coordinates: x along columns, y along rows. The center of
/// pixel (row, col) sits at (col + 0.5, row + 0.5).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

using Rgb = std::array<double, 3>;

struct Primitive {
  Vec2 position;
  CovParams covariance{};
  Rgb color{};
  double filter_variance = 0.0;
};

/// Budgeted structure-of-arrays store of 2D Gaussian primitives. Every
/// primitive shares the cloud's covariance variant. Colors are unconstrained.
class GaussianCloud {
 public:
  GaussianCloud() = default;
  GaussianCloud(CovarianceVariant variant, std::size_t max_budget);

  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }
  std::size_t max_budget() const noexcept { return max_budget_; }
  CovarianceVariant variant() const noexcept { return variant_; }

  /// Throws std::length_error when the budget is exhausted and
  /// std::invalid_argument on a negative filter variance.
  void append(const Primitive& p);
  Primitive primitive(std::size_t i) const;

  /// Keeps the listed primitives (strictly ascending indices) in order.
  void retain(std::span<const std::size_t> kept);

  std::span<Vec2> positions() noexcept { return positions_; }
  std::span<const Vec2> positions() const noexcept { return positions_; }
  std::span<CovParams> covariances() noexcept { return covariances_; }
  std::span<const CovParams> covariances() const noexcept { return covariances_; }
  std::span<Rgb> colors() noexcept { return colors_; }
  std::span<const Rgb> colors() const noexcept { return colors_; }
  std::span<double> filter_variances() noexcept { return filter_variances_; }
  std::span<const double> filter_variances() const noexcept { return filter_variances_; }

  Sym2 covariance(std::size_t i) const noexcept {
    return materialize_covariance(variant_, covariances_[i]);
  }
  /// Sigma_i + s_i I, the matrix that is actually rendered and stored.
  Sym2 filtered_covariance(std::size_t i) const noexcept {
    return covariance(i).plus_isotropic(filter_variances_[i]);
  }

  friend bool operator==(const GaussianCloud&, const GaussianCloud&) = default;

 private:
  CovarianceVariant variant_ = CovarianceVariant::Direct;
  std::size_t max_budget_ = 0;
  std::vector<Vec2> positions_;
  std::vector<CovParams> covariances_;
  std::vector<Rgb> colors_;
  std::vector<double> filter_variances_;
};

/// Builds a Direct-variant cloud from filtered covariance matrices with the
/// filter baked in (s_i = 0); the shape a decoded stream takes.
GaussianCloud make_direct_cloud(std::span<const Vec2> positions, std::span<const Sym2> covariances,
                                std::span<const Rgb> colors, std::size_t max_budget);

}  // namespace gsimg
