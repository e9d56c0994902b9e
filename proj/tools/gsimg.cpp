// gsimg: fit, encode, decode, evaluate and ablate 2D Gaussian image representations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gsimg/bitstream.hpp"
#include "gsimg/cloud_io.hpp"
#include "gsimg/image_io.hpp"
#include "gsimg/manifest.hpp"
#include "gsimg/metrics.hpp"
#include "gsimg/parallel.hpp"
#include "gsimg/pipeline.hpp"
#include "gsimg/rasterizer.hpp"
#include "gsimg/trainer.hpp"

namespace fs = std::filesystem;
using namespace gsimg;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kIoError = 3,
  kConfigError = 4,
  kSelfCheckFailed = 5,
  kBadMagic = 10,
  kUnsupportedVersion = 11,
  kTruncated = 12,
  kMalformed = 13,
};

struct CommonOptions {
  int workers = 0;
};

struct TrainOptions {
  std::string input;
  std::size_t max_gaussians = TrainConfig{}.max_gaussians;
  long iterations = TrainConfig{}.total_iterations;
  std::string param = "direct";
  double alpha = TrainConfig{}.caf_alpha;
  bool no_densify = false;
  bool no_caf = false;
  std::uint64_t seed = 0;
  double cutoff = kDefaultCutoffSigmas;
  std::optional<long> warmup;
  std::string from_manifest;
  std::string log;
  std::string manifest;
  bool quiet = false;
};

void add_train_options(CLI::App* cmd, TrainOptions& o) {
  cmd->add_option("-i,--input", o.input, "PNG or PPM image");
  cmd->add_option("-m,--max-gaussians", o.max_gaussians, "primitive budget M");
  cmd->add_option("-t,--iterations", o.iterations,
                  "total iterations; milestones scale from the 50000-iteration default");
  cmd->add_option("-p,--param", o.param, "covariance parameterization")
      ->check(CLI::IsMember({"direct", "cholesky", "rs"}));
  cmd->add_option("--alpha", o.alpha, "filter variance divisor");
  cmd->add_flag("--no-densify", o.no_densify, "start with all M primitives, never prune or grow");
  cmd->add_flag("--no-caf", o.no_caf, "constant filter variance 0.5");
  cmd->add_option("--seed", o.seed);
  cmd->add_option("--cutoff", o.cutoff, "footprint cutoff in standard deviations (0 disables)");
  cmd->add_option("--log", o.log, "CSV training log");
  cmd->add_option("--manifest", o.manifest, "manifest path (default: <out>.manifest.json)");
  cmd->add_option("--from-manifest", o.from_manifest,
                  "take input and configuration from an earlier manifest");
  cmd->add_flag("-q,--quiet", o.quiet);
}

TrainConfig config_from(const TrainOptions& o) {
  TrainConfig cfg;
  cfg.max_gaussians = o.max_gaussians;
  cfg.caf_alpha = o.alpha;
  cfg.enable_densification = !o.no_densify;
  cfg.enable_caf = !o.no_caf;
  cfg.seed = o.seed;
  cfg.variant = *parse_variant(o.param);
  cfg.cutoff_sigmas = o.cutoff > 0 ? o.cutoff : kNoCutoff;
  cfg = cfg.with_scaled_schedule(o.iterations);
  if (o.warmup) cfg.warmup_iterations = *o.warmup;
  cfg.validate();
  return cfg;
}

// Input path and config, either from flags or from a previous manifest.
std::pair<std::string, TrainConfig> resolve(const TrainOptions& o) {
  if (!o.from_manifest.empty()) {
    const RunManifest m = read_manifest(o.from_manifest);
    const auto it = m.inputs.find("image");
    if (it == m.inputs.end()) throw std::runtime_error("manifest has no input image");
    m.config.validate();
    return {it->second, m.config};
  }
  if (o.input.empty()) throw std::invalid_argument("--input is required");
  return {o.input, config_from(o)};
}

std::string default_manifest(const std::string& explicit_path, const std::string& out) {
  return explicit_path.empty() ? out + ".manifest.json" : explicit_path;
}

void write_log(const std::string& path, const std::vector<IterationRecord>& history) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw ImageIoError("cannot write log " + path);
  out << "iteration,loss,psnr,count\n";
  for (const auto& r : history) {
    out << r.iteration << ',' << std::setprecision(17) << r.loss << ',' << r.psnr << ','
        << r.count << '\n';
  }
}

ProgressFn progress_printer(bool quiet) {
  if (quiet) return {};
  return [](const IterationRecord& r) {
    std::fprintf(stderr, "iter %7ld  loss %.6g  psnr %7.3f  N %zu\n", r.iteration, r.loss, r.psnr,
                 r.count);
  };
}

std::string image_id(const std::string& path) { return fs::path(path).stem().string(); }

std::string flags_of(const TrainConfig& cfg) {
  std::string f;
  if (cfg.enable_densification) f = "d3";
  if (cfg.enable_caf) f += f.empty() ? "caf" : "+caf";
  return f.empty() ? "none" : f;
}

// ---- fit ------------------------------------------------------------------

struct FitOptions {
  TrainOptions train;
  std::string out;
  std::string render;
};

int run_fit(const FitOptions& o) {
  const auto [input, cfg] = resolve(o.train);
  const ImagePlane gt = read_image(input);
  const FitReport report = fit(gt, cfg, progress_printer(o.train.quiet));

  const std::string render_path = o.render.empty() ? o.out + ".png" : o.render;
  save_cloud(o.out, report.cloud);
  write_image(render_path, render(report.cloud, gt.dims(), cfg.cutoff_sigmas));
  write_log(o.train.log, report.history);

  RunManifest m{"fit", {{"image", input}}, {{"cloud", o.out}, {"render", render_path}},
                worker_count(), cfg};
  if (!o.train.log.empty()) m.outputs["log"] = o.train.log;
  write_manifest(default_manifest(o.train.manifest, o.out), m);

  std::printf("psnr %.4f dB  primitives %zu  seconds %.2f\n", report.final_psnr,
              report.cloud.size(), report.encode_seconds);
  return kOk;
}

// ---- encode ---------------------------------------------------------------

struct EncodeOptions {
  TrainOptions train;
  std::string out;
  std::string render;
  int position_bits = BitProfile{}.position;
  int covariance_bits = BitProfile{}.covariance;
  int color_bits = BitProfile{}.color;
  std::string csv;
};

int run_encode(const EncodeOptions& o) {
  const auto [input, cfg] = resolve(o.train);
  const ImagePlane gt = read_image(input);
  const BitProfile profile{o.position_bits, o.covariance_bits, o.color_bits};
  const CompressionResult result = compress(gt, cfg, profile, progress_printer(o.train.quiet));
  write_file(o.out, result.stream);

  // Self-check: the written file must decode to exactly the render the
  // encoder measured.
  const DecodedStream decoded = decode(read_file(o.out));
  const ImagePlane redecoded = render(decoded.cloud, decoded.dims, cfg.cutoff_sigmas);
  if (decoded.dims != gt.dims() || decoded.cloud.size() != result.cloud.size() ||
      redecoded != result.fake_quant_render) {
    std::fprintf(stderr, "self-check failed: decoded stream does not reproduce the encoder render\n");
    fs::remove(o.out);
    return kSelfCheckFailed;
  }

  RunManifest m{"encode", {{"image", input}}, {{"stream", o.out}}, worker_count(), cfg};
  if (!o.render.empty()) {
    write_image(o.render, result.fake_quant_render);
    m.outputs["render"] = o.render;
  }
  write_log(o.train.log, result.history);
  if (!o.train.log.empty()) m.outputs["log"] = o.train.log;
  if (!o.csv.empty()) m.outputs["csv"] = o.csv;
  write_manifest(default_manifest(o.train.manifest, o.out), m);

  const double stream_bpp = bpp(read_file(o.out).size(), gt.dims());
  if (!o.csv.empty()) {
    std::ofstream csv(o.csv);
    csv << result_csv_header() << '\n'
        << to_csv({image_id(input), cfg.max_gaussians, cfg.total_iterations,
                   std::string(to_string(cfg.variant)), flags_of(cfg) + "+qat", result.psnr,
                   result.ms_ssim, stream_bpp, result.encode_seconds, std::nullopt})
        << '\n';
  }
  std::printf(
      "bytes %zu  primitives %zu  bpp %.4f  psnr %.4f dB  ms-ssim %.5f  encode %.2f s\n"
      "warm-up psnr %.4f dB  calibrated psnr %.4f dB\n",
      result.stream.size(), result.cloud.size(), stream_bpp, result.psnr, result.ms_ssim,
      result.encode_seconds, result.warmup_psnr, result.calibrated_psnr);
  return kOk;
}

// ---- decode ---------------------------------------------------------------

struct DecodeOptions {
  std::string input;
  std::string out;
  int fps_repeats = 9;
  double cutoff = kDefaultCutoffSigmas;
  std::string manifest;
};

int run_decode(const DecodeOptions& o) {
  if (o.fps_repeats < 1) throw std::invalid_argument("--fps-repeats must be >= 1");
  const auto bytes = read_file(o.input);
  const double cutoff = o.cutoff > 0 ? o.cutoff : kNoCutoff;
  const DecodeTiming timing = time_decode(bytes, o.fps_repeats, cutoff);
  write_image(o.out, timing.first_render);

  TrainConfig cfg;
  cfg.cutoff_sigmas = cutoff;
  write_manifest(default_manifest(o.manifest, o.out),
                 {"decode", {{"stream", o.input}}, {{"image", o.out}}, worker_count(), cfg});
  std::printf("decode %.3f ms  fps %.2f  repeats %d\n", timing.median_seconds * 1e3, timing.fps,
              o.fps_repeats);
  return kOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateOptions {
  std::string input;
  std::string reference;
  std::string stream;
  std::string out;
  std::string manifest;
};

int run_evaluate(const EvaluateOptions& o) {
  const ImagePlane a = read_image(o.input);
  const ImagePlane ref = read_image(o.reference);
  ResultRow row;
  row.image_id = image_id(o.reference);
  row.psnr = psnr(a, ref);
  row.ms_ssim = ms_ssim(a, ref);
  if (!o.stream.empty()) row.bpp = bpp(read_file(o.stream).size(), ref.dims());

  const std::string line = to_csv(row);
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    if (!out) throw ImageIoError("cannot write " + o.out);
    out << result_csv_header() << '\n' << line << '\n';
    RunManifest m{"evaluate", {{"image", o.input}, {"reference", o.reference}}, {{"csv", o.out}},
                  worker_count(), TrainConfig{}};
    if (!o.stream.empty()) m.inputs["stream"] = o.stream;
    write_manifest(default_manifest(o.manifest, o.out), m);
  }
  std::printf("%s\n%s\n", result_csv_header().c_str(), line.c_str());
  return kOk;
}

// ---- ablate ---------------------------------------------------------------

struct AblateOptions {
  TrainOptions train;
  std::vector<std::size_t> budgets;
  std::vector<std::string> arms;
  std::string out;
};

struct Arm {
  CovarianceVariant variant;
  bool densify;
  bool caf;
};

// Arm syntax: <param>[:d3][:caf], e.g. "rs:d3:caf" or "direct".
Arm parse_arm(const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  std::getline(ss, part, ':');
  const auto variant = parse_variant(part);
  if (!variant) throw std::invalid_argument("unknown parameterization in arm '" + text + "'");
  Arm arm{*variant, false, false};
  while (std::getline(ss, part, ':')) {
    if (part == "d3") {
      arm.densify = true;
    } else if (part == "caf") {
      arm.caf = true;
    } else {
      throw std::invalid_argument("unknown component '" + part + "' in arm '" + text + "'");
    }
  }
  return arm;
}

std::vector<Arm> full_factorial() {
  std::vector<Arm> arms;
  for (auto v : {CovarianceVariant::Direct, CovarianceVariant::Cholesky, CovarianceVariant::RotScale}) {
    for (bool d : {true, false}) {
      for (bool c : {true, false}) arms.push_back({v, d, c});
    }
  }
  return arms;
}

int run_ablate(const AblateOptions& o) {
  if (o.train.input.empty()) throw std::invalid_argument("--input is required");
  const ImagePlane gt = read_image(o.train.input);
  std::vector<Arm> arms;
  if (o.arms.empty()) {
    arms = full_factorial();
  } else {
    for (const auto& a : o.arms) arms.push_back(parse_arm(a));
  }
  std::vector<std::size_t> budgets = o.budgets;
  if (budgets.empty()) budgets.push_back(o.train.max_gaussians);

  std::ofstream out(o.out);
  if (!out) throw ImageIoError("cannot write " + o.out);
  out << result_csv_header() << '\n';

  RunManifest m{"ablate", {{"image", o.train.input}}, {{"csv", o.out}}, worker_count(), {}};
  for (std::size_t budget : budgets) {
    for (const Arm& arm : arms) {
      TrainOptions t = o.train;
      t.max_gaussians = budget;
      t.param = std::string(to_string(arm.variant));
      t.no_densify = !arm.densify;
      t.no_caf = !arm.caf;
      const TrainConfig cfg = config_from(t);
      const FitReport report = fit(gt, cfg);
      const ImagePlane shown = clamped(render(report.cloud, gt.dims(), cfg.cutoff_sigmas));
      const ResultRow row{image_id(o.train.input), budget, cfg.total_iterations,
                          std::string(to_string(cfg.variant)), flags_of(cfg), report.final_psnr,
                          ms_ssim(shown, gt), std::nullopt, report.encode_seconds, std::nullopt};
      out << to_csv(row) << '\n' << std::flush;
      if (!o.train.quiet) std::printf("%s\n", to_csv(row).c_str());
      m.config = cfg;
    }
  }
  write_manifest(default_manifest(o.train.manifest, o.out), m);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D Gaussian splatting image representation and codec"};
  app.require_subcommand(1);
  CommonOptions common;
  app.add_option("-w,--workers", common.workers,
                 "worker threads (overrides GSIMG_WORKERS; 1 = deterministic serial)");

  FitOptions fit_opts;
  auto* fit_cmd = app.add_subcommand("fit", "fit a Gaussian cloud to an image");
  add_train_options(fit_cmd, fit_opts.train);
  fit_cmd->add_option("-o,--out", fit_opts.out, "native cloud dump")->required();
  fit_cmd->add_option("--render", fit_opts.render, "rendered image (default: <out>.png)");

  EncodeOptions enc_opts;
  auto* enc_cmd = app.add_subcommand("encode", "fit, quantization-aware fine-tune, and encode");
  add_train_options(enc_cmd, enc_opts.train);
  enc_cmd->add_option("--warmup", enc_opts.train.warmup, "unquantized warm-up iterations");
  enc_cmd->add_option("-o,--out", enc_opts.out, ".g2gs stream")->required();
  enc_cmd->add_option("--render", enc_opts.render, "write the decoder-side render");
  enc_cmd->add_option("--position-bits", enc_opts.position_bits);
  enc_cmd->add_option("--covariance-bits", enc_opts.covariance_bits);
  enc_cmd->add_option("--color-bits", enc_opts.color_bits);
  enc_cmd->add_option("--csv", enc_opts.csv, "results CSV row");

  DecodeOptions dec_opts;
  auto* dec_cmd = app.add_subcommand("decode", "decode a .g2gs stream to an image");
  dec_cmd->add_option("-i,--input", dec_opts.input)->required();
  dec_cmd->add_option("-o,--out", dec_opts.out)->required();
  dec_cmd->add_option("--fps-repeats", dec_opts.fps_repeats, "timed decode+render repeats");
  dec_cmd->add_option("--cutoff", dec_opts.cutoff, "footprint cutoff in standard deviations (0 disables)");
  dec_cmd->add_option("--manifest", dec_opts.manifest);

  EvaluateOptions eval_opts;
  auto* eval_cmd = app.add_subcommand("evaluate", "PSNR and MS-SSIM of an image against a reference");
  eval_cmd->add_option("-i,--input", eval_opts.input)->required();
  eval_cmd->add_option("-r,--reference", eval_opts.reference)->required();
  eval_cmd->add_option("--stream", eval_opts.stream, "stream whose size gives the bpp column");
  eval_cmd->add_option("-o,--out", eval_opts.out, "CSV output");
  eval_cmd->add_option("--manifest", eval_opts.manifest);

  AblateOptions abl_opts;
  auto* abl_cmd = app.add_subcommand("ablate", "parameterization x densification x filter ablation");
  add_train_options(abl_cmd, abl_opts.train);
  abl_cmd->add_option("--budgets", abl_opts.budgets, "one or more M values (default: --max-gaussians)");
  abl_cmd->add_option("--arms", abl_opts.arms,
                      "arms as <direct|cholesky|rs>[:d3][:caf] (default: all 12)");
  abl_cmd->add_option("-o,--out", abl_opts.out, "CSV report")->required();

  CLI11_PARSE(app, argc, argv);

  set_worker_count(common.workers > 0 ? common.workers : worker_count_from_env());
  try {
    if (*fit_cmd) return run_fit(fit_opts);
    if (*enc_cmd) return run_encode(enc_opts);
    if (*dec_cmd) return run_decode(dec_opts);
    if (*eval_cmd) return run_evaluate(eval_opts);
    if (*abl_cmd) return run_ablate(abl_opts);
  } catch (const BadMagicError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadMagic;
  } catch (const UnsupportedVersionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUnsupportedVersion;
  } catch (const TruncatedStreamError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kTruncated;
  } catch (const MalformedStreamError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kMalformed;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const ImageIoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoError;
  } catch (const FileIoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIoError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kFailure;
}
