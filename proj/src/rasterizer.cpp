#include "gsimg/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "footprint.hpp"

// glibc's libmvec provides vector variants of exp; declaring them lets the
// omp simd row loops below call them. Accuracy is within a few ulp of the
// scalar exp used by the reference rasterizer.
extern "C" {
#pragma omp declare simd notinbranch
double exp(double) noexcept;
}

namespace gsimg {

namespace {

constexpr int kBandRows = 16;

struct Splat {
  std::size_t index;  // position in the cloud
  Vec2 mean;
  Sym2 conic;  // inverse filtered covariance
  Rgb color;
  int row0, row1, col0, col1;  // inclusive pixel box
};

// Inclusive pixel range whose centers lie within [center - extent, center + extent].
bool pixel_range(double center, double extent, int limit, int& lo, int& hi) {
  if (!std::isfinite(extent)) {
    lo = 0;
    hi = limit - 1;
    return true;
  }
  const double first = std::ceil(center - extent - 0.5);
  const double last = std::floor(center + extent - 0.5);
  if (last < 0.0 || first > limit - 1.0) return false;
  lo = static_cast<int>(std::max(first, 0.0));
  hi = static_cast<int>(std::min(last, limit - 1.0));
  return lo <= hi;
}

std::vector<Splat> prepare_splats(const GaussianCloud& cloud, ImageDims dims, double cutoff_sigmas) {
  if (!(cutoff_sigmas > 0.0)) throw std::invalid_argument("cutoff_sigmas must be positive");
  std::vector<Splat> splats;
  splats.reserve(cloud.size());
  const auto positions = cloud.positions();
  const auto colors = cloud.colors();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Sym2 cov = cloud.filtered_covariance(i);
    const Vec2 mu = positions[i];
    if (!is_renderable(cov) || !std::isfinite(mu.x) || !std::isfinite(mu.y)) continue;
    Splat s{i, mu, cov.inverse(), colors[i], 0, 0, 0, 0};
    if (!pixel_range(mu.x, cutoff_sigmas * std::sqrt(cov.xx), dims.width, s.col0, s.col1)) continue;
    if (!pixel_range(mu.y, cutoff_sigmas * std::sqrt(cov.yy), dims.height, s.row0, s.row1)) continue;
    splats.push_back(s);
  }
  return splats;
}

// Splat ids per row band, ascending within each band (CSR layout).
struct BandBins {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> ids;
};

BandBins bin_by_band(const std::vector<Splat>& splats, int height) {
  const int bands = (height + kBandRows - 1) / kBandRows;
  BandBins bins;
  bins.offsets.assign(static_cast<std::size_t>(bands) + 1, 0);
  for (const Splat& s : splats) {
    for (int b = s.row0 / kBandRows; b <= s.row1 / kBandRows; ++b) ++bins.offsets[b + 1];
  }
  for (int b = 0; b < bands; ++b) bins.offsets[b + 1] += bins.offsets[b];
  bins.ids.resize(bins.offsets.back());
  std::vector<std::size_t> cursor(bins.offsets.begin(), bins.offsets.end() - 1);
  for (std::size_t k = 0; k < splats.size(); ++k) {
    const Splat& s = splats[k];
    for (int b = s.row0 / kBandRows; b <= s.row1 / kBandRows; ++b) {
      bins.ids[cursor[b]++] = static_cast<std::uint32_t>(k);
    }
  }
  return bins;
}

// Calls row_fn(row, splat) for every row of every splat in band order; the
// per-pixel order is ascending splat (and thus cloud) index.
template <typename RowFn>
void for_each_band(const std::vector<Splat>& splats, ImageDims dims, RowFn&& row_fn) {
  const BandBins bins = bin_by_band(splats, dims.height);
  const int bands = static_cast<int>(bins.offsets.size()) - 1;
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < bands; ++b) {
    const int band_row0 = b * kBandRows;
    const int band_row1 = std::min(dims.height, band_row0 + kBandRows) - 1;
    for (std::size_t k = bins.offsets[b]; k < bins.offsets[b + 1]; ++k) {
      const Splat& s = splats[bins.ids[k]];
      const int r0 = std::max(s.row0, band_row0);
      const int r1 = std::min(s.row1, band_row1);
      for (int row = r0; row <= r1; ++row) row_fn(row, s);
    }
  }
}

}  // namespace

ImagePlane render(const GaussianCloud& cloud, ImageDims dims, double cutoff_sigmas) {
  ImagePlane out(dims);
  const auto splats = prepare_splats(cloud, dims, cutoff_sigmas);
  for_each_band(splats, dims, [&out](int row, const Splat& s) {
    const double dy = detail::pixel_center(row) - s.mean.y;
    const double c0 = s.color[0], c1 = s.color[1], c2 = s.color[2];
    double* px = out.pixel(row, 0);
#pragma omp simd
    for (int col = s.col0; col <= s.col1; ++col) {
      const double g = detail::footprint(s.conic, detail::pixel_center(col) - s.mean.x, dy);
      px[3 * col] += c0 * g;
      px[3 * col + 1] += c1 * g;
      px[3 * col + 2] += c2 * g;
    }
  });
  return out;
}

std::vector<double> render_weight(const GaussianCloud& cloud, ImageDims dims, double cutoff_sigmas) {
  std::vector<double> weight(dims.pixel_count(), 0.0);
  const auto splats = prepare_splats(cloud, dims, cutoff_sigmas);
  const auto width = static_cast<std::size_t>(dims.width);
  for_each_band(splats, dims, [&weight, width](int row, const Splat& s) {
    const double dy = detail::pixel_center(row) - s.mean.y;
    double* w = weight.data() + static_cast<std::size_t>(row) * width;
#pragma omp simd
    for (int col = s.col0; col <= s.col1; ++col) {
      w[col] += detail::footprint(s.conic, detail::pixel_center(col) - s.mean.x, dy);
    }
  });
  return weight;
}

RenderGradients render_backward(const GaussianCloud& cloud, ImageDims dims, const ImagePlane& d_loss,
                                double cutoff_sigmas) {
  if (d_loss.dims() != dims) throw std::invalid_argument("d_loss dimensions mismatch");
  RenderGradients grads(cloud.size());
  const auto splats = prepare_splats(cloud, dims, cutoff_sigmas);
  const auto count = static_cast<std::ptrdiff_t>(splats.size());
  // Planar copy of d_loss so the row loops read contiguous memory.
  const std::size_t plane = dims.pixel_count();
  std::vector<double> planar(3 * plane);
  {
    const auto src = d_loss.data();
    for (std::size_t p = 0; p < plane; ++p) {
      planar[p] = src[3 * p];
      planar[plane + p] = src[3 * p + 1];
      planar[2 * plane + p] = src[3 * p + 2];
    }
  }

#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const Splat& s = splats[static_cast<std::size_t>(k)];
    const Sym2& a = s.conic;
    double d_col[3] = {0.0, 0.0, 0.0};
    double d_mx = 0.0, d_my = 0.0;
    double d_xx = 0.0, d_xy = 0.0, d_yy = 0.0;
    for (int row = s.row0; row <= s.row1; ++row) {
      const double dy = detail::pixel_center(row) - s.mean.y;
      const std::size_t row_offset = static_cast<std::size_t>(row) * static_cast<std::size_t>(dims.width);
      const double* dl0 = planar.data() + row_offset;
      const double* dl1 = dl0 + plane;
      const double* dl2 = dl1 + plane;
      double c0 = 0.0, c1 = 0.0, c2 = 0.0, mx = 0.0, my = 0.0, xx = 0.0, xy = 0.0, yy = 0.0;
#pragma omp simd reduction(+ : c0, c1, c2, mx, my, xx, xy, yy)
      for (int col = s.col0; col <= s.col1; ++col) {
        const double dx = detail::pixel_center(col) - s.mean.x;
        const double g = detail::footprint(a, dx, dy);
        const double l0 = dl0[col], l1 = dl1[col], l2 = dl2[col];
        c0 += l0 * g;
        c1 += l1 * g;
        c2 += l2 * g;
        const double w = (l0 * s.color[0] + l1 * s.color[1] + l2 * s.color[2]) * g;
        const double ax = a.xx * dx + a.xy * dy;
        const double ay = a.xy * dx + a.yy * dy;
        mx += w * ax;
        my += w * ay;
        xx += w * ax * ax;
        xy += w * ax * ay;
        yy += w * ay * ay;
      }
      d_col[0] += c0;
      d_col[1] += c1;
      d_col[2] += c2;
      d_mx += mx;
      d_my += my;
      d_xx += xx;
      d_xy += xy;
      d_yy += yy;
    }
    grads.d_color[s.index] = {d_col[0], d_col[1], d_col[2]};
    grads.d_position[s.index] = {d_mx, d_my};
    // dG/dSigma = G/2 (A d)(A d)^T; the shared off-diagonal counts twice.
    grads.d_covariance[s.index] = {0.5 * d_xx, d_xy, 0.5 * d_yy};
  }
  return grads;
}

std::vector<CovParams> covariance_param_gradients(const GaussianCloud& cloud,
                                                  const RenderGradients& grads) {
  if (grads.size() != cloud.size()) throw std::invalid_argument("gradient count mismatch");
  std::vector<CovParams> out(cloud.size());
  const auto params = cloud.covariances();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out[i] = covariance_param_gradient(cloud.variant(), params[i], grads.d_covariance[i]);
  }
  return out;
}

}  // namespace gsimg
