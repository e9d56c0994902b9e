#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "gsimg/gaussian_cloud.hpp"

namespace gsimg {

/// A file could not be opened, read or written.
class FileIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Full-precision native dump of a cloud (not a compression format):
// "GSCL", version u8 = 1, variant u8, 2 reserved bytes, budget u64, count u64,
// then per primitive 9 little-endian doubles: x y p0 p1 p2 r g b s.
std::vector<std::uint8_t> serialize_cloud(const GaussianCloud& cloud);
/// Throws std::runtime_error on malformed or truncated input.
GaussianCloud deserialize_cloud(std::span<const std::uint8_t> bytes);

void save_cloud(const std::filesystem::path& path, const GaussianCloud& cloud);
GaussianCloud load_cloud(const std::filesystem::path& path);

/// Throws FileIoError.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace gsimg
