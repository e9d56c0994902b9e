#include "gsimg/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gsimg {

double LsqChannelQuantizer::to_working(double v) const {
  if (domain == QuantDomain::Linear) return v;
  if (!(v > 0.0)) throw std::domain_error("log-domain quantizer needs a positive value");
  return std::log(v);
}

std::uint32_t quantize(const LsqChannelQuantizer& q, double v) {
  const double u = (q.to_working(v) - q.offset) / q.scale;
  // nearbyint rounds half to even under the default rounding mode.
  return static_cast<std::uint32_t>(
      std::nearbyint(std::clamp(u, 0.0, static_cast<double>(q.max_code()))));
}

double dequantize(const LsqChannelQuantizer& q, std::uint32_t code) {
  if (code > q.max_code()) throw std::out_of_range("quantizer code out of range");
  const double w = static_cast<double>(code) * q.scale + q.offset;
  return q.domain == QuantDomain::Log ? std::exp(w) : w;
}

FakeQuantGrad fake_quant_backward(const LsqChannelQuantizer& q, double v, double upstream) {
  const double w = q.to_working(v);
  const double u = (w - q.offset) / q.scale;
  const double q_max = q.max_code();
  // Gradient w.r.t. the dequantized working value.
  double g = upstream;
  if (q.domain == QuantDomain::Log) {
    g *= std::exp(std::nearbyint(std::clamp(u, 0.0, q_max)) * q.scale + q.offset);
  }
  const double dw_dv = q.domain == QuantDomain::Log ? 1.0 / v : 1.0;
  if (u < 0.0) return {0.0, 0.0, g};
  if (u > q_max) return {0.0, g * q_max, g};
  return {g * dw_dv, g * (std::nearbyint(u) - u), 0.0};
}

void calibrate(LsqChannelQuantizer& q, std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("calibrate: no values");
  double lo = q.to_working(values[0]);
  double hi = lo;
  for (double v : values) {
    const double w = q.to_working(v);
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  q.offset = lo;
  q.scale = std::max((hi - lo) / static_cast<double>(q.max_code()), kMinQuantScale);
}

std::string_view channel_name(std::size_t channel) noexcept {
  static constexpr std::string_view kNames[kChannelCount] = {"mu_x",   "mu_y",   "cov_xx",
                                                             "cov_xy", "cov_yy", "red",
                                                             "green",  "blue"};
  return channel < kChannelCount ? kNames[channel] : "unknown";
}

QuantizerBank QuantizerBank::with_profile(const BitProfile& p) {
  if (p.position < 1 || p.position > 16 || p.covariance < 1 || p.covariance > 16 || p.color < 1 ||
      p.color > 16) {
    throw std::invalid_argument("bit depths must lie in [1, 16]");
  }
  QuantizerBank bank;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    LsqChannelQuantizer& q = bank.channels[c];
    if (c <= kMeanY) {
      q.bits = p.position;
    } else if (c <= kCovYY) {
      q.bits = p.covariance;
    } else {
      q.bits = p.color;
    }
    q.domain = (c == kCovXX || c == kCovYY) ? QuantDomain::Log : QuantDomain::Linear;
  }
  return bank;
}

BitProfile QuantizerBank::profile() const noexcept {
  return {channels[kMeanX].bits, channels[kCovXX].bits, channels[kRed].bits};
}

QuantizerBank QuantizerBank::rounded_to_float() const {
  QuantizerBank out = *this;
  for (auto& q : out.channels) {
    q.scale = std::max(static_cast<double>(static_cast<float>(q.scale)),
                       static_cast<double>(static_cast<float>(kMinQuantScale)));
    q.offset = static_cast<double>(static_cast<float>(q.offset));
  }
  return out;
}

}  // namespace gsimg
