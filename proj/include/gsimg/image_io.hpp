#pragma once

#include <filesystem>
#include <stdexcept>

#include "gsimg/image.hpp"

namespace gsimg {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 8-bit RGB PNG or binary PPM (P6, maxval 255). Values are scaled by 1/255.
// Grayscale PNGs are expanded to RGB; PNGs with an alpha channel are rejected.
ImagePlane read_image(const std::filesystem::path& path);

// Output is clamped to [0,1] and rounded to 8 bits. Format follows the
// extension: ".ppm" writes P6, anything else writes PNG.
void write_image(const std::filesystem::path& path, const ImagePlane& image);

void write_png(const std::filesystem::path& path, const ImagePlane& image);
void write_ppm(const std::filesystem::path& path, const ImagePlane& image);

/// The image exactly as write_image would store it, re-read as doubles.
ImagePlane quantized_to_8bit(const ImagePlane& image);

}  // namespace gsimg
