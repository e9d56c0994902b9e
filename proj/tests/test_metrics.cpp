#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gsimg/bitstream.hpp"
#include "gsimg/metrics.hpp"
#include "gsimg/qat.hpp"
#include "helpers.hpp"

using namespace gsimg;

namespace {

// Direct transcription with a full 2D window and two-pass moments; shares
// no code with the library's separable implementation.
double ms_ssim_oracle(const ImagePlane& a, const ImagePlane& b) {
  const double weights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  double win[11][11];
  double wsum = 0.0;
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      win[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / 4.5);
      wsum += win[i][j];
    }
  }
  for (auto& row : win) {
    for (double& v : row) v /= wsum;
  }
  const double c1 = 1e-4, c2 = 9e-4;

  int scales = 0;
  for (int h = a.height(), w = a.width(); scales < 5 && std::min(h, w) >= 11; h /= 2, w /= 2) ++scales;
  double used = 0.0;
  for (int j = 0; j < scales; ++j) used += weights[j];

  double total = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    int h = a.height(), w = a.width();
    std::vector<double> x(static_cast<std::size_t>(h * w)), y(x.size());
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        x[static_cast<std::size_t>(r * w + c)] = a.at(r, c, ch);
        y[static_cast<std::size_t>(r * w + c)] = b.at(r, c, ch);
      }
    }
    double value = 1.0;
    for (int s = 0; s < scales; ++s) {
      double cs_sum = 0.0, ssim_sum = 0.0;
      int count = 0;
      for (int r = 0; r + 11 <= h; ++r) {
        for (int c = 0; c + 11 <= w; ++c) {
          double mx = 0.0, my = 0.0;
          for (int i = 0; i < 11; ++i) {
            for (int j = 0; j < 11; ++j) {
              mx += win[i][j] * x[static_cast<std::size_t>((r + i) * w + c + j)];
              my += win[i][j] * y[static_cast<std::size_t>((r + i) * w + c + j)];
            }
          }
          double vx = 0.0, vy = 0.0, cxy = 0.0;
          for (int i = 0; i < 11; ++i) {
            for (int j = 0; j < 11; ++j) {
              const double dx = x[static_cast<std::size_t>((r + i) * w + c + j)] - mx;
              const double dy = y[static_cast<std::size_t>((r + i) * w + c + j)] - my;
              vx += win[i][j] * dx * dx;
              vy += win[i][j] * dy * dy;
              cxy += win[i][j] * dx * dy;
            }
          }
          const double cs = (2 * cxy + c2) / (vx + vy + c2);
          cs_sum += cs;
          ssim_sum += cs * (2 * mx * my + c1) / (mx * mx + my * my + c1);
          ++count;
        }
      }
      const double term = (s + 1 < scales ? cs_sum : ssim_sum) / count;
      value *= std::pow(std::max(term, 0.0), weights[s] / used);
      const int h2 = h / 2, w2 = w / 2;
      std::vector<double> nx(static_cast<std::size_t>(h2 * w2)), ny(nx.size());
      for (int r = 0; r < h2; ++r) {
        for (int c = 0; c < w2; ++c) {
          auto at = [&](const std::vector<double>& p, int rr, int cc) {
            return p[static_cast<std::size_t>(rr * w + cc)];
          };
          nx[static_cast<std::size_t>(r * w2 + c)] =
              (at(x, 2 * r, 2 * c) + at(x, 2 * r, 2 * c + 1) + at(x, 2 * r + 1, 2 * c) + at(x, 2 * r + 1, 2 * c + 1)) / 4;
          ny[static_cast<std::size_t>(r * w2 + c)] =
              (at(y, 2 * r, 2 * c) + at(y, 2 * r, 2 * c + 1) + at(y, 2 * r + 1, 2 * c) + at(y, 2 * r + 1, 2 * c + 1)) / 4;
        }
      }
      x.swap(nx);
      y.swap(ny);
      h = h2;
      w = w2;
    }
    total += value;
  }
  return total / 3.0;
}

ImagePlane add_noise(const ImagePlane& img, double sigma, Rng& rng) {
  std::normal_distribution<double> n(0.0, sigma);
  ImagePlane out = img;
  for (double& v : out.data()) v = std::clamp(v + n(rng), 0.0, 1.0);
  return out;
}

}  // namespace

TEST_CASE("psnr of a uniform 0.1 error is 20 dB") {
  ImagePlane a(8, 9), b(8, 9);
  b.fill(0.1);
  CHECK(mse(a, b) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(psnr(a, a) == kIdenticalPsnr);
  CHECK_THROWS_AS(psnr(a, ImagePlane(9, 8)), std::invalid_argument);
}

TEST_CASE("psnr degrades monotonically with growing noise") {
  Rng rng(1);
  const ImagePlane img = test::random_image({32, 32}, rng, 0.2, 0.8);
  double last = kIdenticalPsnr;
  for (double sigma : {0.005, 0.01, 0.02, 0.05, 0.1, 0.2}) {
    const double p = psnr(img, add_noise(img, sigma, rng));
    CHECK(p < last);
    last = p;
  }
}

TEST_CASE("ms-ssim scale count") {
  CHECK(ms_ssim_scales({10, 100}) == 0);
  CHECK(ms_ssim_scales({11, 11}) == 1);
  CHECK(ms_ssim_scales({22, 22}) == 2);
  CHECK(ms_ssim_scales({176, 176}) == 5);
  CHECK(ms_ssim_scales({512, 768}) == 5);
}

TEST_CASE("ms-ssim matches a direct 2D-window oracle") {
  Rng rng(2);
  for (ImageDims dims : {ImageDims{11, 11}, ImageDims{23, 30}, ImageDims{50, 47}, ImageDims{180, 190}}) {
    const ImagePlane a = test::random_image(dims, rng, 0.0, 1.0);
    const ImagePlane b = add_noise(a, 0.1, rng);
    CHECK(ms_ssim(a, b) == doctest::Approx(ms_ssim_oracle(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("ms-ssim identity, symmetry and range") {
  Rng rng(3);
  const ImagePlane a = test::random_image({64, 64}, rng, 0.0, 1.0);
  const ImagePlane b = add_noise(a, 0.15, rng);
  CHECK(ms_ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(ms_ssim(a, b) - ms_ssim(b, a)) < 1e-12);
  const double v = ms_ssim(a, b);
  CHECK(v > 0.0);
  CHECK(v < 1.0);
  CHECK(ms_ssim(a, add_noise(a, 0.3, rng)) < v);
  CHECK_THROWS_AS(ms_ssim(ImagePlane(10, 10), ImagePlane(10, 10)), std::invalid_argument);
}

TEST_CASE("decode timing reports a median and the first render") {
  Rng rng(4);
  const ImageDims dims{32, 32};
  const auto cloud = test::random_cloud(CovarianceVariant::Direct, 30, dims, rng);
  const auto bytes = encode(cloud, calibrate_bank(cloud, {}), dims);
  const DecodeTiming t = time_decode(bytes, 5);
  CHECK(t.seconds.size() == 5);
  CHECK(t.fps == doctest::Approx(1.0 / t.median_seconds));
  CHECK(t.first_render.dims() == dims);
  CHECK_THROWS_AS(time_decode(bytes, 0), std::invalid_argument);
  auto bad = bytes;
  bad[0] = 0;
  CHECK_THROWS_AS(time_decode(bad, 1), BadMagicError);
}

TEST_CASE("csv rows") {
  ResultRow row;
  row.image_id = "kodim01";
  row.max_gaussians = 5000;
  row.iterations = 50000;
  row.variant = "direct";
  row.flags = "d3+caf";
  row.psnr = 31.5;
  const std::string line = to_csv(row);
  CHECK(line.rfind("kodim01,5000,50000,direct,d3+caf,", 0) == 0);
  const std::string header = result_csv_header();
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(line.begin(), line.end(), ','));
}
