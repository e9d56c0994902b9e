#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gsimg {

struct ImageDims {
  int height = 0;
  int width = 0;

  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

/// Interleaved H x W x 3 image of doubles. Values are nominally in [0,1] but
/// rendered planes are not clamped.
class ImagePlane {
 public:
  static constexpr int kChannels = 3;

  ImagePlane() = default;
  ImagePlane(int height, int width);
  explicit ImagePlane(ImageDims dims) : ImagePlane(dims.height, dims.width) {}

  int height() const noexcept { return dims_.height; }
  int width() const noexcept { return dims_.width; }
  ImageDims dims() const noexcept { return dims_; }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int row, int col, int channel) noexcept {
    return data_[index(row, col) + static_cast<std::size_t>(channel)];
  }
  double at(int row, int col, int channel) const noexcept {
    return data_[index(row, col) + static_cast<std::size_t>(channel)];
  }
  double* pixel(int row, int col) noexcept { return data_.data() + index(row, col); }
  const double* pixel(int row, int col) const noexcept { return data_.data() + index(row, col); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  void fill(double value);

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(dims_.width) +
            static_cast<std::size_t>(col)) * kChannels;
  }

  ImageDims dims_{};
  std::vector<double> data_;
};

/// Copy with every channel clamped to [0,1].
ImagePlane clamped(const ImagePlane& image);

/// Rectangular sub-image; throws std::out_of_range when the window leaves the image.
ImagePlane crop(const ImagePlane& image, int row0, int col0, int height, int width);

}  // namespace gsimg
