#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "gsimg/image_io.hpp"
#include "gsimg/parallel.hpp"
#include "gsimg/rasterizer.hpp"
#include "gsimg/trainer.hpp"
#include "helpers.hpp"

using namespace gsimg;

namespace {

ImagePlane small_image() {
  return crop(read_image(GSIMG_TEST_DATA "/chelsea_128.png"), 40, 40, 32, 32);
}

TrainConfig small_config(long iterations) {
  TrainConfig cfg;
  cfg.max_gaussians = 200;
  cfg = cfg.with_scaled_schedule(iterations);
  cfg.log_interval = 10;
  return cfg;
}

}  // namespace

TEST_CASE("l2 loss and gradient") {
  ImagePlane a(1, 2), b(1, 2);
  a.at(0, 0, 0) = 0.5;
  b.at(0, 1, 2) = 0.25;
  const L2Loss l = l2_loss(a, b);
  CHECK(l.loss == doctest::Approx((0.25 + 0.0625) / 6.0));
  CHECK(l.gradient.at(0, 0, 0) == doctest::Approx(2.0 * 0.5 / 6.0));
  CHECK(l.gradient.at(0, 1, 2) == doctest::Approx(-2.0 * 0.25 / 6.0));
  CHECK_THROWS_AS(l2_loss(a, ImagePlane(2, 1)), std::invalid_argument);
}

TEST_CASE("schedule scaling maps milestones proportionally") {
  const TrainConfig cfg = TrainConfig{}.with_scaled_schedule(10'000);
  CHECK(cfg.total_iterations == 10'000);
  CHECK(cfg.grow_start == 1'000);
  CHECK(cfg.grow_interval == 1'000);
  CHECK(cfg.grow_stop == 9'000);
  CHECK(cfg.lr_decay_iteration == 4'000);
  CHECK(cfg.warmup_iterations == 1'200);
  CHECK(cfg.prune_interval == 100);
  CHECK(TrainConfig{}.with_scaled_schedule(50'000) == TrainConfig{});
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("schedule predicates") {
  const TrainConfig cfg;
  CHECK_FALSE(cfg.is_growth_iteration(4'999));
  CHECK(cfg.is_growth_iteration(5'000));
  CHECK(cfg.is_growth_iteration(45'000));
  CHECK_FALSE(cfg.is_growth_iteration(50'000));
  CHECK_FALSE(cfg.is_growth_iteration(7'500));
  CHECK(cfg.is_prune_iteration(100));
  CHECK_FALSE(cfg.is_prune_iteration(150));
  CHECK(cfg.attribute_lr_scale(19'999) == 1.0);
  CHECK(cfg.attribute_lr_scale(20'000) == 0.5);
  CHECK(cfg.quantizer_lr_at(20'000) == doctest::Approx(0.0005));
  TrainConfig off = cfg;
  off.enable_densification = false;
  CHECK_FALSE(off.is_growth_iteration(5'000));
  CHECK_FALSE(off.is_prune_iteration(100));
}

TEST_CASE("config validation names the violated constraint") {
  TrainConfig cfg;
  cfg.total_iterations = 1'000;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("grow_stop"), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.prune_interval = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.max_gaussians = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("zero iterations leaves the initialization") {
  const ImagePlane gt = small_image();
  const FitReport r = fit(gt, small_config(0));
  CHECK(r.cloud.size() == 100);
  REQUIRE(r.history.size() == 1);
  CHECK(r.history[0].iteration == 0);
  CHECK(r.history[0].count == 100);
}

TEST_CASE("training improves PSNR and respects the budget") {
  const ImagePlane gt = small_image();
  const TrainConfig cfg = small_config(300);
  std::size_t max_seen = 0;
  const FitReport r = fit(gt, cfg, [&](const IterationRecord& rec) { max_seen = std::max(max_seen, rec.count); });
  REQUIRE(r.history.size() >= 2);
  CHECK(r.final_psnr > r.history.front().psnr + 5.0);
  CHECK(max_seen <= cfg.max_gaussians);
  CHECK(r.cloud.size() <= cfg.max_gaussians);
  CHECK(r.history.back().iteration == 300);
  for (std::size_t i = 0; i < r.cloud.size(); ++i) CHECK(is_renderable(r.cloud.filtered_covariance(i)));
}

TEST_CASE("without densification the cloud keeps all M primitives") {
  const ImagePlane gt = small_image();
  TrainConfig cfg = small_config(100);
  cfg.enable_densification = false;
  cfg.enable_caf = false;
  Trainer tr(gt, cfg);
  CHECK(tr.cloud().size() == 200);
  tr.run_until(100);
  CHECK(tr.cloud().size() == 200);
  CHECK(tr.adam().position.primitives() == 200);
  for (double s : tr.cloud().filter_variances()) CHECK(s == 0.5);
}

TEST_CASE("adam state tracks every grow and prune event") {
  const ImagePlane gt = small_image();
  Trainer tr(gt, small_config(200));
  for (long t = 5; t <= 200; t += 5) {
    tr.run_until(t);
    CHECK(tr.adam().position.primitives() == tr.cloud().size());
    CHECK(tr.adam().covariance.primitives() == tr.cloud().size());
    CHECK(tr.adam().color.primitives() == tr.cloud().size());
  }
}

TEST_CASE("a small Adam step does not increase the loss of a one-pixel problem") {
  ImagePlane gt(1, 1);
  gt.at(0, 0, 0) = 0.8;
  gt.at(0, 0, 1) = 0.3;
  gt.at(0, 0, 2) = 0.5;
  TrainConfig cfg;
  cfg.max_gaussians = 2;
  cfg.enable_densification = false;
  cfg = cfg.with_scaled_schedule(1);
  cfg.lr = {1e-3, 1e-3, 1e-3};
  Trainer tr(gt, cfg);
  tr.run_until(1);
  const double before = tr.history().front().loss;
  const double after = l2_loss(render(tr.cloud(), gt.dims()), gt).loss;
  CHECK(after <= before);
}

TEST_CASE("fixed seed and one worker give bit-identical reports") {
  const ImagePlane gt = small_image();
  set_worker_count(1);
  const FitReport a = fit(gt, small_config(150));
  const FitReport b = fit(gt, small_config(150));
  set_worker_count(0);
  CHECK(a.cloud == b.cloud);
  CHECK(a.history == b.history);
  CHECK(a.final_psnr == b.final_psnr);
}

TEST_CASE("different seeds give different clouds") {
  const ImagePlane gt = small_image();
  TrainConfig c1 = small_config(0), c2 = small_config(0);
  c2.seed = 1;
  CHECK_FALSE(fit(gt, c1).cloud == fit(gt, c2).cloud);
}
