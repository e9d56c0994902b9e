#include "gsimg/metrics.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "gsimg/bitstream.hpp"
#include "gsimg/rasterizer.hpp"

namespace gsimg {

namespace {

void require_same_dims(const ImagePlane& a, const ImagePlane& b) {
  if (a.dims() != b.dims()) throw std::invalid_argument("image dimensions differ");
}

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;
constexpr std::array<double, 5> kScaleWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> w{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    w[i] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Single-channel plane, row-major.
struct Plane {
  int height = 0;
  int width = 0;
  std::vector<double> v;

  Plane(int h, int w) : height(h), width(w), v(static_cast<std::size_t>(h) * w, 0.0) {}
  double& operator()(int r, int c) { return v[static_cast<std::size_t>(r) * width + c]; }
  double operator()(int r, int c) const { return v[static_cast<std::size_t>(r) * width + c]; }
};

Plane channel_of(const ImagePlane& img, int channel) {
  Plane p(img.height(), img.width());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) p(r, c) = img.at(r, c, channel);
  }
  return p;
}

// Valid-region separable Gaussian filter.
Plane filter_valid(const Plane& in, const std::array<double, kWindow>& w) {
  Plane horiz(in.height, in.width - kWindow + 1);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < horiz.height; ++r) {
    for (int c = 0; c < horiz.width; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += w[k] * in(r, c + k);
      horiz(r, c) = acc;
    }
  }
  Plane out(in.height - kWindow + 1, horiz.width);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < out.height; ++r) {
    for (int c = 0; c < out.width; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += w[k] * horiz(r + k, c);
      out(r, c) = acc;
    }
  }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane out(a.height, a.width);
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

Plane downsample2(const Plane& in) {
  Plane out(in.height / 2, in.width / 2);
  for (int r = 0; r < out.height; ++r) {
    for (int c = 0; c < out.width; ++c) {
      out(r, c) = 0.25 * (in(2 * r, 2 * c) + in(2 * r, 2 * c + 1) + in(2 * r + 1, 2 * c) +
                          in(2 * r + 1, 2 * c + 1));
    }
  }
  return out;
}

struct SsimTerms {
  double cs = 0.0;    // mean contrast-structure term
  double ssim = 0.0;  // mean luminance * contrast-structure
};

SsimTerms ssim_terms(const Plane& x, const Plane& y, const std::array<double, kWindow>& w) {
  const Plane mx = filter_valid(x, w);
  const Plane my = filter_valid(y, w);
  const Plane exx = filter_valid(product(x, x), w);
  const Plane eyy = filter_valid(product(y, y), w);
  const Plane exy = filter_valid(product(x, y), w);
  double cs_sum = 0.0, ssim_sum = 0.0;
  for (std::size_t i = 0; i < mx.v.size(); ++i) {
    const double mux = mx.v[i], muy = my.v[i];
    const double sxx = exx.v[i] - mux * mux;
    const double syy = eyy.v[i] - muy * muy;
    const double sxy = exy.v[i] - mux * muy;
    const double cs = (2.0 * sxy + kC2) / (sxx + syy + kC2);
    const double lum = (2.0 * mux * muy + kC1) / (mux * mux + muy * muy + kC1);
    cs_sum += cs;
    ssim_sum += lum * cs;
  }
  const auto n = static_cast<double>(mx.v.size());
  return {cs_sum / n, ssim_sum / n};
}

}  // namespace

double mse(const ImagePlane& a, const ImagePlane& b) {
  require_same_dims(a, b);
  const auto x = a.data();
  const auto y = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return sum / static_cast<double>(x.size());
}

double psnr(const ImagePlane& a, const ImagePlane& b) {
  const double e = mse(a, b);
  if (e == 0.0) return kIdenticalPsnr;
  return 10.0 * std::log10(1.0 / e);
}

int ms_ssim_scales(ImageDims dims) {
  int h = dims.height, w = dims.width, scales = 0;
  while (scales < static_cast<int>(kScaleWeights.size()) && std::min(h, w) >= kWindow) {
    ++scales;
    h /= 2;
    w /= 2;
  }
  return scales;
}

double ms_ssim(const ImagePlane& a, const ImagePlane& b) {
  require_same_dims(a, b);
  const int scales = ms_ssim_scales(a.dims());
  if (scales == 0) throw std::invalid_argument("ms_ssim: image smaller than the 11x11 window");
  double weight_sum = 0.0;
  for (int j = 0; j < scales; ++j) weight_sum += kScaleWeights[j];

  const auto window = gaussian_window();
  double total = 0.0;
  for (int ch = 0; ch < ImagePlane::kChannels; ++ch) {
    Plane x = channel_of(a, ch);
    Plane y = channel_of(b, ch);
    double value = 1.0;
    for (int j = 0; j < scales; ++j) {
      const SsimTerms t = ssim_terms(x, y, window);
      const double term = (j + 1 < scales) ? t.cs : t.ssim;
      value *= std::pow(std::max(term, 0.0), kScaleWeights[j] / weight_sum);
      if (j + 1 < scales) {
        x = downsample2(x);
        y = downsample2(y);
      }
    }
    total += value;
  }
  return std::clamp(total / ImagePlane::kChannels, 0.0, 1.0);
}

DecodeTiming time_decode(std::span<const std::uint8_t> bytes, int repeats, double cutoff_sigmas) {
  if (repeats < 1) throw std::invalid_argument("time_decode: repeats must be >= 1");
  DecodeTiming timing;
  timing.seconds.reserve(static_cast<std::size_t>(repeats));
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const DecodedStream decoded = decode(bytes);
    ImagePlane image = render(decoded.cloud, decoded.dims, cutoff_sigmas);
    const auto stop = std::chrono::steady_clock::now();
    timing.seconds.push_back(std::chrono::duration<double>(stop - start).count());
    if (i == 0) timing.first_render = std::move(image);
  }
  std::vector<double> sorted = timing.seconds;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  timing.median_seconds = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  timing.fps = 1.0 / timing.median_seconds;
  return timing;
}

std::string result_csv_header() {
  return "image_id,M,iterations,variant,flags,psnr,ms_ssim,bpp,encode_s,decode_fps";
}

std::string to_csv(const ResultRow& row) {
  std::ostringstream out;
  out << std::setprecision(10) << row.image_id << ',' << row.max_gaussians << ',' << row.iterations
      << ',' << row.variant << ',' << row.flags << ',' << row.psnr << ',' << row.ms_ssim << ',';
  if (row.bpp) out << *row.bpp;
  out << ',' << row.encode_seconds << ',';
  if (row.decode_fps) out << *row.decode_fps;
  return out.str();
}

}  // namespace gsimg
