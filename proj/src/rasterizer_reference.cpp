#include <stdexcept>

#include "footprint.hpp"
#include "gsimg/rasterizer.hpp"

namespace gsimg {

ImagePlane render_naive(const GaussianCloud& cloud, ImageDims dims) {
  ImagePlane out(dims);
  const auto positions = cloud.positions();
  const auto colors = cloud.colors();
  for (int row = 0; row < dims.height; ++row) {
    for (int col = 0; col < dims.width; ++col) {
      double* px = out.pixel(row, col);
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Sym2 cov = cloud.filtered_covariance(i);
        if (!is_renderable(cov)) continue;
        const double g = detail::footprint(cov.inverse(), detail::pixel_center(col) - positions[i].x,
                                           detail::pixel_center(row) - positions[i].y);
        px[0] += colors[i][0] * g;
        px[1] += colors[i][1] * g;
        px[2] += colors[i][2] * g;
      }
    }
  }
  return out;
}

RenderGradients render_backward_naive(const GaussianCloud& cloud, ImageDims dims,
                                      const ImagePlane& d_loss) {
  if (d_loss.dims() != dims) throw std::invalid_argument("d_loss dimensions mismatch");
  RenderGradients grads(cloud.size());
  const auto positions = cloud.positions();
  const auto colors = cloud.colors();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Sym2 cov = cloud.filtered_covariance(i);
    if (!is_renderable(cov)) continue;
    const Sym2 a = cov.inverse();
    for (int row = 0; row < dims.height; ++row) {
      for (int col = 0; col < dims.width; ++col) {
        const double dx = detail::pixel_center(col) - positions[i].x;
        const double dy = detail::pixel_center(row) - positions[i].y;
        const double g = detail::footprint(a, dx, dy);
        const double* dl = d_loss.pixel(row, col);
        for (int c = 0; c < 3; ++c) grads.d_color[i][c] += dl[c] * g;
        const double w = (dl[0] * colors[i][0] + dl[1] * colors[i][1] + dl[2] * colors[i][2]) * g;
        const double ax = a.xx * dx + a.xy * dy;
        const double ay = a.xy * dx + a.yy * dy;
        grads.d_position[i].x += w * ax;
        grads.d_position[i].y += w * ay;
        grads.d_covariance[i][0] += 0.5 * w * ax * ax;
        grads.d_covariance[i][1] += w * ax * ay;
        grads.d_covariance[i][2] += 0.5 * w * ay * ay;
      }
    }
  }
  return grads;
}

}  // namespace gsimg
