#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "gsimg/config.hpp"

namespace gsimg {

/// Reproducibility record written next to every command's outputs.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  int workers = 0;
  TrainConfig config;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

std::string to_json_string(const RunManifest& manifest);
/// Throws std::runtime_error on malformed JSON or missing fields; the file
/// functions throw FileIoError when the path cannot be opened.
RunManifest manifest_from_json_string(const std::string& text);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace gsimg
