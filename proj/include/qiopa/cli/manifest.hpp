#pragma once

// Plain-text run manifest. Metadata lines are '#' comments and the body is
// the canonical config, so a manifest can be passed back as --config to
// reproduce the run.

#include <filesystem>
#include <string>
#include <vector>

#include "qiopa/cli/config.hpp"

namespace qiopa::cli {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  RunConfig config;
  std::vector<std::filesystem::path> outputs;
  double wall_clock_seconds = 0.0;
};

std::string render_manifest(const RunManifest& manifest);
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace qiopa::cli
