#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gsimg/gaussian_cloud.hpp"
#include "gsimg/image.hpp"
#include "gsimg/quantizer.hpp"

namespace gsimg {

// .g2gs container, all multi-byte fields little-endian:
//
//   offset  size  field
//   0       4     magic "G2GS"
//   4       1     version (1)
//   5       1     profile: 0 = default 12/10/6 bit depths, 1 = custom
//   6       4     height (u32)
//   10      4     width (u32)
//   14      4     primitive count N (u32)
//   18      3     bit depths: position, covariance, color
//   21      64    8 x (scale f32, offset f32), channel order
//                 mu_x mu_y cov_xx cov_xy cov_yy r g b
//   85      ...   N primitives, primitive-major, same channel order, each
//                 code MSB-first in one continuous bit buffer, last byte
//                 zero-padded
//
// The filtered covariance Sigma + sI is stored; filter variances are not.
inline constexpr std::array<std::uint8_t, 4> kStreamMagic = {'G', '2', 'G', 'S'};
inline constexpr std::uint8_t kStreamVersion = 1;
inline constexpr std::size_t kFixedHeaderBytes = 21;
inline constexpr std::size_t kQuantTableBytes = 8 * kChannelCount;
inline constexpr std::size_t kStreamHeaderBytes = kFixedHeaderBytes + kQuantTableBytes;

class BitstreamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BadMagicError : public BitstreamError {
 public:
  using BitstreamError::BitstreamError;
};
class UnsupportedVersionError : public BitstreamError {
 public:
  using BitstreamError::BitstreamError;
};
class TruncatedStreamError : public BitstreamError {
 public:
  using BitstreamError::BitstreamError;
};
class MalformedStreamError : public BitstreamError {
 public:
  using BitstreamError::BitstreamError;
};

using PrimitiveCodes = std::array<std::uint32_t, kChannelCount>;

std::size_t payload_bits(std::size_t count, const BitProfile& profile) noexcept;
std::size_t payload_bytes(std::size_t count, const BitProfile& profile) noexcept;

/// Quantizes every primitive with `bank` rounded to float32 (the precision
/// stored in the stream) and serializes. Throws std::invalid_argument on
/// non-finite attributes or dimensions/counts that do not fit 32 bits, and
/// std::domain_error on a non-positive variance.
std::vector<std::uint8_t> encode(const GaussianCloud& cloud, const QuantizerBank& bank,
                                 ImageDims dims);

struct DecodedStream {
  ImageDims dims;
  QuantizerBank bank;
  std::vector<PrimitiveCodes> codes;
  GaussianCloud cloud;  // Direct variant, dequantized, s_i = 0
};

/// Throws one of the BitstreamError subclasses; nothing is returned on error.
DecodedStream decode(std::span<const std::uint8_t> bytes);

/// 8 * byte_len / (H * W).
double bpp(std::size_t byte_len, ImageDims dims);

}  // namespace gsimg
