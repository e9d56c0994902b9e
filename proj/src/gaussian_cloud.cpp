#include "gsimg/gaussian_cloud.hpp"

#include <stdexcept>

namespace gsimg {

GaussianCloud::GaussianCloud(CovarianceVariant variant, std::size_t max_budget)
    : variant_(variant), max_budget_(max_budget) {
  if (max_budget == 0) throw std::invalid_argument("max budget must be positive");
}

void GaussianCloud::append(const Primitive& p) {
  if (size() >= max_budget_) throw std::length_error("Gaussian budget exhausted");
  if (!(p.filter_variance >= 0.0)) throw std::invalid_argument("filter variance must be >= 0");
  positions_.push_back(p.position);
  covariances_.push_back(p.covariance);
  colors_.push_back(p.color);
  filter_variances_.push_back(p.filter_variance);
}

Primitive GaussianCloud::primitive(std::size_t i) const {
  return {positions_.at(i), covariances_.at(i), colors_.at(i), filter_variances_.at(i)};
}

namespace {

template <typename T>
void compact(std::vector<T>& v, std::span<const std::size_t> kept) {
  std::size_t out = 0;
  for (std::size_t idx : kept) v[out++] = v[idx];
  v.resize(out);
}

}  // namespace

void GaussianCloud::retain(std::span<const std::size_t> kept) {
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] >= size() || (i > 0 && kept[i] <= kept[i - 1])) {
      throw std::invalid_argument("retain expects strictly ascending in-range indices");
    }
  }
  compact(positions_, kept);
  compact(covariances_, kept);
  compact(colors_, kept);
  compact(filter_variances_, kept);
}

GaussianCloud make_direct_cloud(std::span<const Vec2> positions, std::span<const Sym2> covariances,
                                std::span<const Rgb> colors, std::size_t max_budget) {
  if (positions.size() != covariances.size() || positions.size() != colors.size()) {
    throw std::invalid_argument("attribute arrays differ in length");
  }
  GaussianCloud cloud(CovarianceVariant::Direct, max_budget);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Sym2& c = covariances[i];
    cloud.append({positions[i], {c.xx, c.xy, c.yy}, colors[i], 0.0});
  }
  return cloud;
}

}  // namespace gsimg
