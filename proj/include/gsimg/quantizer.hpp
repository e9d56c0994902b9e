#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace gsimg {

enum class QuantDomain : std::uint8_t { Linear = 0, Log = 1 };

inline constexpr double kMinQuantScale = 1e-8;

// Learnable uniform scalar quantizer with scale and offset:
//
//   u = (v' - offset) / scale,  v' = v (linear) or ln v (log)
//   code = round_half_even(clip(u, 0, 2^bits - 1))
//   v_hat = code * scale + offset   (log: exp of that)
struct LsqChannelQuantizer {
  int bits = 8;
  double scale = 1.0;
  double offset = 0.0;
  QuantDomain domain = QuantDomain::Linear;

  std::uint32_t max_code() const noexcept { return (std::uint32_t{1} << bits) - 1; }
  /// v' for this domain; throws std::domain_error for v <= 0 in the log domain.
  double to_working(double v) const;

  friend bool operator==(const LsqChannelQuantizer&, const LsqChannelQuantizer&) = default;
};

std::uint32_t quantize(const LsqChannelQuantizer& q, double v);
/// Throws std::out_of_range for code > max_code().
double dequantize(const LsqChannelQuantizer& q, std::uint32_t code);
inline double fake_quantize(const LsqChannelQuantizer& q, double v) {
  return dequantize(q, quantize(q, v));
}

struct FakeQuantGrad {
  double d_value = 0.0;
  double d_scale = 0.0;
  double d_offset = 0.0;
};

// Straight-through backward of fake_quantize given upstream = dL/dv_hat.
// Inside the clip range the rounding is treated as identity for v, and
// d v_hat / d scale = round(u) - u, d v_hat / d offset = 0. Below the range
// only the offset receives gradient; above it the scale gets (2^bits - 1)
// and the offset 1. In the log domain the same rules act on the working
// value, chained through exp on the way in and ln on the way out.
FakeQuantGrad fake_quant_backward(const LsqChannelQuantizer& q, double v, double upstream);

/// Min/max initialization: offset = min v', scale = (max v' - min v') / (2^bits - 1),
/// floored at kMinQuantScale. Throws on empty input.
void calibrate(LsqChannelQuantizer& q, std::span<const double> values);

/// Channel order of the quantizer bank and of the bitstream payload.
enum Channel : std::size_t {
  kMeanX = 0,
  kMeanY,
  kCovXX,
  kCovXY,
  kCovYY,
  kRed,
  kGreen,
  kBlue,
  kChannelCount
};

std::string_view channel_name(std::size_t channel) noexcept;

struct BitProfile {
  int position = 12;
  int covariance = 10;
  int color = 6;

  int bits_per_primitive() const noexcept { return 2 * position + 3 * covariance + 3 * color; }
  bool is_default() const noexcept { return *this == BitProfile{}; }
  friend bool operator==(const BitProfile&, const BitProfile&) = default;
};

/// One quantizer per channel. The two variances are quantized in the log
/// domain, everything else linearly.
struct QuantizerBank {
  std::array<LsqChannelQuantizer, kChannelCount> channels{};

  static QuantizerBank with_profile(const BitProfile& profile);
  BitProfile profile() const noexcept;
  /// Scales and offsets rounded to float32, as stored in a bitstream.
  QuantizerBank rounded_to_float() const;

  LsqChannelQuantizer& operator[](std::size_t c) { return channels[c]; }
  const LsqChannelQuantizer& operator[](std::size_t c) const { return channels[c]; }

  friend bool operator==(const QuantizerBank&, const QuantizerBank&) = default;
};

}  // namespace gsimg
