#include "gsimg/caf.hpp"

#include <algorithm>
#include <stdexcept>

#include "gsimg/rasterizer.hpp"

namespace gsimg {

double filter_variance_for_new(ImageDims dims, std::size_t count, double alpha) {
  if (count == 0) throw std::invalid_argument("filter variance needs a non-empty cloud");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return static_cast<double>(dims.pixel_count()) / (alpha * static_cast<double>(count));
}

void apply_caf_policy(GaussianCloud& cloud, const CafPolicy& policy) {
  if (policy.enabled) return;
  auto s = cloud.filter_variances();
  std::fill(s.begin(), s.end(), policy.constant_variance);
}

double hole_fraction(const GaussianCloud& cloud, ImageDims dims, double threshold,
                     double cutoff_sigmas) {
  const auto weight = render_weight(cloud, dims, cutoff_sigmas);
  const auto holes = std::count_if(weight.begin(), weight.end(),
                                   [threshold](double w) { return w < threshold; });
  return static_cast<double>(holes) / static_cast<double>(weight.size());
}

}  // namespace gsimg
