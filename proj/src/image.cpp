#include "gsimg/image.hpp"

#include <algorithm>
#include <stdexcept>

namespace gsimg {

ImagePlane::ImagePlane(int height, int width) : dims_{height, width} {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  data_.assign(dims_.pixel_count() * kChannels, 0.0);
}

void ImagePlane::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

ImagePlane clamped(const ImagePlane& image) {
  ImagePlane out = image;
  for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

ImagePlane crop(const ImagePlane& image, int row0, int col0, int height, int width) {
  if (row0 < 0 || col0 < 0 || height < 1 || width < 1 || row0 + height > image.height() ||
      col0 + width > image.width()) {
    throw std::out_of_range("crop window outside image");
  }
  ImagePlane out(height, width);
  for (int r = 0; r < height; ++r) {
    const double* src = image.pixel(row0 + r, col0);
    std::copy(src, src + static_cast<std::ptrdiff_t>(width) * ImagePlane::kChannels, out.pixel(r, 0));
  }
  return out;
}

}  // namespace gsimg
