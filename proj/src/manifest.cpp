#include "gsimg/manifest.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gsimg/cloud_io.hpp"
#include "json.hpp"

namespace gsimg {

using nlohmann::json;

namespace {

// JSON has no infinity; a disabled cutoff is written as the string "inf".
json cutoff_to_json(double v) { return std::isinf(v) ? json("inf") : json(v); }
double cutoff_from_json(const json& j) {
  return j.is_string() && j.get<std::string>() == "inf" ? kNoCutoff : j.get<double>();
}

json config_to_json(const TrainConfig& c) {
  return json{
      {"max_gaussians", c.max_gaussians},
      {"total_iterations", c.total_iterations},
      {"grow_interval", c.grow_interval},
      {"prune_interval", c.prune_interval},
      {"grow_start", c.grow_start},
      {"grow_stop", c.grow_stop},
      {"lr_position", c.lr.position},
      {"lr_covariance", c.lr.covariance},
      {"lr_color", c.lr.color},
      {"lr_decay_iteration", c.lr_decay_iteration},
      {"lr_decay_factor", c.lr_decay_factor},
      {"quantizer_lr", c.quantizer_lr},
      {"quantizer_lr_decay_iteration", c.quantizer_lr_decay_iteration},
      {"quantizer_lr_decay_factor", c.quantizer_lr_decay_factor},
      {"quantizer_grad_scaling", c.quantizer_grad_scaling},
      {"warmup_iterations", c.warmup_iterations},
      {"caf_alpha", c.caf_alpha},
      {"constant_filter_variance", c.constant_filter_variance},
      {"seed", c.seed},
      {"variant", std::string(to_string(c.variant))},
      {"enable_densification", c.enable_densification},
      {"enable_caf", c.enable_caf},
      {"cutoff_sigmas", cutoff_to_json(c.cutoff_sigmas)},
      {"log_interval", c.log_interval},
  };
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  j.at("max_gaussians").get_to(c.max_gaussians);
  j.at("total_iterations").get_to(c.total_iterations);
  j.at("grow_interval").get_to(c.grow_interval);
  j.at("prune_interval").get_to(c.prune_interval);
  j.at("grow_start").get_to(c.grow_start);
  j.at("grow_stop").get_to(c.grow_stop);
  j.at("lr_position").get_to(c.lr.position);
  j.at("lr_covariance").get_to(c.lr.covariance);
  j.at("lr_color").get_to(c.lr.color);
  j.at("lr_decay_iteration").get_to(c.lr_decay_iteration);
  j.at("lr_decay_factor").get_to(c.lr_decay_factor);
  j.at("quantizer_lr").get_to(c.quantizer_lr);
  j.at("quantizer_lr_decay_iteration").get_to(c.quantizer_lr_decay_iteration);
  j.at("quantizer_lr_decay_factor").get_to(c.quantizer_lr_decay_factor);
  j.at("quantizer_grad_scaling").get_to(c.quantizer_grad_scaling);
  j.at("warmup_iterations").get_to(c.warmup_iterations);
  j.at("caf_alpha").get_to(c.caf_alpha);
  j.at("constant_filter_variance").get_to(c.constant_filter_variance);
  j.at("seed").get_to(c.seed);
  const auto variant = parse_variant(j.at("variant").get<std::string>());
  if (!variant) throw std::runtime_error("manifest: unknown covariance variant");
  c.variant = *variant;
  j.at("enable_densification").get_to(c.enable_densification);
  j.at("enable_caf").get_to(c.enable_caf);
  c.cutoff_sigmas = cutoff_from_json(j.at("cutoff_sigmas"));
  j.at("log_interval").get_to(c.log_interval);
  return c;
}

}  // namespace

std::string to_json_string(const RunManifest& m) {
  const json j{{"command", m.command},
               {"inputs", m.inputs},
               {"outputs", m.outputs},
               {"workers", m.workers},
               {"config", config_to_json(m.config)}};
  return j.dump(2);
}

RunManifest manifest_from_json_string(const std::string& text) {
  try {
    const json j = json::parse(text);
    RunManifest m;
    j.at("command").get_to(m.command);
    j.at("inputs").get_to(m.inputs);
    j.at("outputs").get_to(m.outputs);
    j.at("workers").get_to(m.workers);
    m.config = config_from_json(j.at("config"));
    return m;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw FileIoError("cannot write manifest " + path.string());
  out << to_json_string(manifest) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileIoError("cannot read manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_json_string(ss.str());
}

}  // namespace gsimg
