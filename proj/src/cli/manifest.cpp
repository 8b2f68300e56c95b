#include "qiopa/cli/manifest.hpp"

#include <array>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace qiopa::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path.string());
  }
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) {
    hex += fmt::format("{:02x}", digest[k]);
  }
  return hex;
}

std::string render_manifest(const RunManifest& m) {
  std::string out;
  out += "# qiopa run manifest\n";
  out += fmt::format("# schema_version: {}\n", kSchemaVersion);
  out += fmt::format("# artifact_version: {}\n", kArtifactVersion);
  out += fmt::format("# command: {}\n", m.command);
  out += fmt::format("# seed: {}\n", m.config.experiment.seed);
  for (const auto& p : m.outputs) {
    out += fmt::format("# output: {} sha256:{}\n", p.filename().string(), sha256_file(p));
  }
  out += fmt::format("# wall_clock_seconds: {:.3f}\n", m.wall_clock_seconds);
  out += serialize_config(m.config);
  return out;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  const std::string text = render_manifest(manifest);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) {
    throw std::runtime_error("cannot write manifest " + path.string());
  }
}

}  // namespace qiopa::cli
