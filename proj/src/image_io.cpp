#include "gsimg/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace gsimg {

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::vector<std::uint8_t> to_bytes(const ImagePlane& image) {
  std::vector<std::uint8_t> out(image.data().size());
  std::transform(image.data().begin(), image.data().end(), out.begin(), to_byte);
  return out;
}

ImagePlane from_bytes(int height, int width, const std::uint8_t* bytes) {
  ImagePlane out(height, width);
  auto data = out.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = bytes[i] / 255.0;
  return out;
}

bool has_png_signature(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint8_t sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), sizeof(sig));
  return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

ImagePlane read_png(const std::filesystem::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw ImageIoError("cannot read PNG " + path.string() + ": " + img.message);
  }
  if (img.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&img);
    throw ImageIoError("PNG " + path.string() + " has an alpha channel; only RGB is supported");
  }
  img.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw ImageIoError("cannot decode PNG " + path.string() + ": " + msg);
  }
  return from_bytes(static_cast<int>(img.height), static_cast<int>(img.width), buffer.data());
}

// Reads one whitespace/comment separated header token of a PNM file.
std::string next_pnm_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!token.empty()) break;
    } else {
      token.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return token;
}

ImagePlane read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  if (next_pnm_token(in) != "P6") throw ImageIoError(path.string() + ": not a binary PPM (P6)");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_pnm_token(in));
    height = std::stoi(next_pnm_token(in));
    maxval = std::stoi(next_pnm_token(in));
  } catch (const std::exception&) {
    throw ImageIoError(path.string() + ": malformed PPM header");
  }
  if (width < 1 || height < 1 || maxval != 255) {
    throw ImageIoError(path.string() + ": unsupported PPM geometry or maxval");
  }
  std::vector<std::uint8_t> buffer(static_cast<std::size_t>(width) * height * 3);
  in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
  if (static_cast<std::size_t>(in.gcount()) != buffer.size()) {
    throw ImageIoError(path.string() + ": truncated PPM payload");
  }
  return from_bytes(height, width, buffer.data());
}

}  // namespace

ImagePlane read_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ImageIoError("no such file: " + path.string());
  return has_png_signature(path) ? read_png(path) : read_ppm(path);
}

void write_png(const std::filesystem::path& path, const ImagePlane& image) {
  const auto bytes = to_bytes(image);
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw ImageIoError("cannot write PNG " + path.string() + ": " + img.message);
  }
}

void write_ppm(const std::filesystem::path& path, const ImagePlane& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError("cannot open " + path.string() + " for writing");
  out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
  const auto bytes = to_bytes(image);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageIoError("write failed: " + path.string());
}

void write_image(const std::filesystem::path& path, const ImagePlane& image) {
  if (path.extension() == ".ppm") {
    write_ppm(path, image);
  } else {
    write_png(path, image);
  }
}

ImagePlane quantized_to_8bit(const ImagePlane& image) {
  const auto bytes = to_bytes(image);
  return from_bytes(image.height(), image.width(), bytes.data());
}

}  // namespace gsimg
