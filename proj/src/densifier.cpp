#include "gsimg/densifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace gsimg {

DistortionMap DistortionMap::between(const ImagePlane& gt, const ImagePlane& rendered) {
  if (gt.dims() != rendered.dims()) throw std::invalid_argument("distortion: dimension mismatch");
  DistortionMap map;
  map.dims_ = gt.dims();
  map.values_.resize(gt.dims().pixel_count());
  const auto a = gt.data();
  const auto b = rendered.data();
  for (std::size_t p = 0; p < map.values_.size(); ++p) {
    const std::size_t o = p * 3;
    map.values_[p] =
        (std::abs(a[o] - b[o]) + std::abs(a[o + 1] - b[o + 1]) + std::abs(a[o + 2] - b[o + 2])) / 3.0;
  }
  return map;
}

std::vector<PixelCoord> DistortionMap::top_k(std::size_t k) const {
  k = std::min(k, values_.size());
  std::vector<std::size_t> order(values_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [this](std::size_t a, std::size_t b) {
                      if (values_[a] != values_[b]) return values_[a] > values_[b];
                      return a < b;
                    });
  std::vector<PixelCoord> out(k);
  const auto width = static_cast<std::size_t>(dims_.width);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = {static_cast<int>(order[i] / width), static_cast<int>(order[i] % width)};
  }
  return out;
}

CovParams sample_covariance_params(CovarianceVariant variant, Rng& rng) {
  std::uniform_real_distribution<double> diag(0.5, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (variant) {
    case CovarianceVariant::Direct: {
      const double xx = diag(rng);
      const double xy = unit(rng);
      const double yy = diag(rng);
      return {xx, xy, yy};
    }
    case CovarianceVariant::Cholesky: {
      const double l11 = diag(rng);
      const double l21 = unit(rng);
      const double l22 = diag(rng);
      return {l11, l21, l22};
    }
    case CovarianceVariant::RotScale: {
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      const double theta = angle(rng);
      const double s1 = diag(rng);
      const double s2 = diag(rng);
      return {theta, s1, s2};
    }
  }
  return {};
}

GaussianCloud random_init(std::size_t count, std::size_t max_budget, ImageDims dims,
                          CovarianceVariant variant, const CafPolicy& caf, Rng& rng) {
  GaussianCloud cloud(variant, max_budget);
  if (count == 0) return cloud;
  const double s = caf.variance_for_new(dims, count);
  std::uniform_real_distribution<double> ux(0.0, dims.width);
  std::uniform_real_distribution<double> uy(0.0, dims.height);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    cloud.append({{x, y}, sample_covariance_params(variant, rng), {0.0, 0.0, 0.0}, s});
  }
  return cloud;
}

GaussianCloud sparse_init(std::size_t max_budget, ImageDims dims, CovarianceVariant variant,
                          const CafPolicy& caf, Rng& rng) {
  if (max_budget < 2) throw std::invalid_argument("sparse_init needs a budget of at least 2");
  return random_init(max_budget / 2, max_budget, dims, variant, caf, rng);
}

std::size_t growth_count(std::size_t count, std::size_t max_budget) {
  return count >= max_budget ? 0 : (max_budget - count) / 2;
}

std::size_t grow(GaussianCloud& cloud, const ImagePlane& gt, const ImagePlane& rendered,
                 const CafPolicy& caf, Rng& rng) {
  const std::size_t k = std::min(growth_count(cloud.size(), cloud.max_budget()),
                                 gt.dims().pixel_count());
  if (k == 0) return 0;
  const auto pixels = DistortionMap::between(gt, rendered).top_k(k);
  const double s = caf.variance_for_new(gt.dims(), cloud.size() + k);
  for (const PixelCoord& p : pixels) {
    const double* c = gt.pixel(p.row, p.col);
    cloud.append({{p.col + 0.5, p.row + 0.5},
                  sample_covariance_params(cloud.variant(), rng),
                  {c[0], c[1], c[2]},
                  s});
  }
  return k;
}

PruneResult prune(GaussianCloud& cloud) {
  PruneResult result;
  result.kept.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (is_renderable(cloud.filtered_covariance(i))) result.kept.push_back(i);
  }
  result.removed = cloud.size() - result.kept.size();
  if (result.removed > 0) cloud.retain(result.kept);
  return result;
}

}  // namespace gsimg
