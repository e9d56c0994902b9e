#include "gsimg/bitstream.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "gsimg/qat.hpp"

namespace gsimg {

namespace {

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void put(std::uint32_t value, int bits) {
    for (int b = bits - 1; b >= 0; --b) {
      acc_ = static_cast<std::uint8_t>((acc_ << 1) | ((value >> b) & 1u));
      if (++filled_ == 8) {
        out_.push_back(acc_);
        acc_ = 0;
        filled_ = 0;
      }
    }
  }

  void flush() {
    if (filled_ > 0) out_.push_back(static_cast<std::uint8_t>(acc_ << (8 - filled_)));
    acc_ = 0;
    filled_ = 0;
  }

 private:
  std::vector<std::uint8_t>& out_;
  std::uint8_t acc_ = 0;
  int filled_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint32_t get(int bits) {
    std::uint32_t v = 0;
    for (int b = 0; b < bits; ++b) {
      const std::uint8_t byte = in_[pos_ >> 3];
      v = (v << 1) | ((byte >> (7 - (pos_ & 7))) & 1u);
      ++pos_;
    }
    return v;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

float get_f32(std::span<const std::uint8_t> in, std::size_t at) {
  return std::bit_cast<float>(get_u32(in, at));
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument(std::string(what) + " exceeds the 32-bit range");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::size_t payload_bits(std::size_t count, const BitProfile& profile) noexcept {
  return count * static_cast<std::size_t>(profile.bits_per_primitive());
}

std::size_t payload_bytes(std::size_t count, const BitProfile& profile) noexcept {
  return (payload_bits(count, profile) + 7) / 8;
}

std::vector<std::uint8_t> encode(const GaussianCloud& cloud, const QuantizerBank& bank,
                                 ImageDims dims) {
  if (dims.height < 1 || dims.width < 1) throw std::invalid_argument("encode: invalid dimensions");
  const QuantizerBank stored = bank.rounded_to_float();
  const BitProfile profile = stored.profile();
  // Rejects bit depths outside [1, 16].
  (void)QuantizerBank::with_profile(profile);

  std::vector<std::uint8_t> out;
  out.reserve(kStreamHeaderBytes + payload_bytes(cloud.size(), profile));
  out.insert(out.end(), kStreamMagic.begin(), kStreamMagic.end());
  out.push_back(kStreamVersion);
  out.push_back(profile.is_default() ? 0 : 1);
  put_u32(out, checked_u32(static_cast<std::size_t>(dims.height), "height"));
  put_u32(out, checked_u32(static_cast<std::size_t>(dims.width), "width"));
  put_u32(out, checked_u32(cloud.size(), "primitive count"));
  out.push_back(static_cast<std::uint8_t>(profile.position));
  out.push_back(static_cast<std::uint8_t>(profile.covariance));
  out.push_back(static_cast<std::uint8_t>(profile.color));
  for (const auto& q : stored.channels) {
    put_f32(out, q.scale);
    put_f32(out, q.offset);
  }

  BitWriter writer(out);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const ChannelValues v = channel_values(cloud, i);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      if (!std::isfinite(v[c])) throw std::invalid_argument("encode: non-finite attribute");
      writer.put(quantize(stored[c], v[c]), stored[c].bits);
    }
  }
  writer.flush();
  return out;
}

DecodedStream decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kStreamMagic.size()) throw TruncatedStreamError("stream shorter than magic");
  if (!std::equal(kStreamMagic.begin(), kStreamMagic.end(), bytes.begin())) {
    throw BadMagicError("not a .g2gs stream (bad magic)");
  }
  if (bytes.size() < 5) throw TruncatedStreamError("stream ends before version byte");
  if (bytes[4] != kStreamVersion) {
    throw UnsupportedVersionError("unsupported .g2gs version " + std::to_string(bytes[4]));
  }
  if (bytes.size() < kStreamHeaderBytes) throw TruncatedStreamError("truncated header");

  const std::uint8_t profile_byte = bytes[5];
  const std::uint32_t height = get_u32(bytes, 6);
  const std::uint32_t width = get_u32(bytes, 10);
  const std::uint32_t count = get_u32(bytes, 14);
  const BitProfile profile{bytes[18], bytes[19], bytes[20]};
  if (profile_byte > 1 || (profile_byte == 0) != profile.is_default()) {
    throw MalformedStreamError("profile byte disagrees with bit depths");
  }
  if (height == 0 || width == 0 || height > std::numeric_limits<int>::max() ||
      width > std::numeric_limits<int>::max()) {
    throw MalformedStreamError("invalid image dimensions");
  }

  DecodedStream out;
  out.dims = {static_cast<int>(height), static_cast<int>(width)};
  try {
    out.bank = QuantizerBank::with_profile(profile);
  } catch (const std::invalid_argument&) {
    throw MalformedStreamError("bit depth outside [1, 16]");
  }
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const float scale = get_f32(bytes, kFixedHeaderBytes + 8 * c);
    const float offset = get_f32(bytes, kFixedHeaderBytes + 8 * c + 4);
    if (!std::isfinite(scale) || !(scale > 0.0f) || !std::isfinite(offset)) {
      throw MalformedStreamError("invalid quantizer parameters");
    }
    out.bank[c].scale = scale;
    out.bank[c].offset = offset;
  }

  const std::size_t needed = payload_bytes(count, profile);
  const std::size_t available = bytes.size() - kStreamHeaderBytes;
  if (available < needed) throw TruncatedStreamError("truncated payload");
  if (available > needed) throw MalformedStreamError("trailing bytes after payload");

  BitReader reader(bytes.subspan(kStreamHeaderBytes));
  out.codes.resize(count);
  std::vector<Vec2> positions(count);
  std::vector<Sym2> covariances(count);
  std::vector<Rgb> colors(count);
  for (std::size_t i = 0; i < count; ++i) {
    ChannelValues v{};
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      out.codes[i][c] = reader.get(out.bank[c].bits);
      v[c] = dequantize(out.bank[c], out.codes[i][c]);
    }
    positions[i] = {v[kMeanX], v[kMeanY]};
    covariances[i] = {v[kCovXX], v[kCovXY], v[kCovYY]};
    colors[i] = {v[kRed], v[kGreen], v[kBlue]};
  }
  out.cloud = make_direct_cloud(positions, covariances, colors, std::max<std::size_t>(count, 1));
  return out;
}

double bpp(std::size_t byte_len, ImageDims dims) {
  if (dims.pixel_count() == 0) throw std::invalid_argument("bpp: empty image");
  return 8.0 * static_cast<double>(byte_len) / static_cast<double>(dims.pixel_count());
}

}  // namespace gsimg
