#pragma once

// Flat key = value run configuration. One dotted key per line, '#' starts a
// comment, unknown or repeated keys are errors. Defaults are the reference
// preset (g = 4.34); `preset = stress` switches to the g = 5.7 settings and is
// applied before any other key regardless of its position.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qiopa/detection.hpp"
#include "qiopa/fock.hpp"

namespace qiopa::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ExperimentConfig experiment = reference_preset();
  std::vector<double> gain_list{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.34};
  std::vector<double> q_list{0,   20,  40,  60,  80,  100, 120, 140,
                             160, 180, 200, 220, 240, 260, 280, 300};
  double distribution_g = 1.6;
  DistributionKind distribution_kind = DistributionKind::PhiPlus;
  std::size_t distribution_max_rows = 50'000'000;
  std::vector<double> oracle_g_list{0.0, 0.2, 0.5, 0.8, 1.0};
  std::size_t oracle_cutoff = 60;

  // Throws ConfigError.
  void validate() const;
};

RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

// Canonical text: every key, fixed order, 17 significant digits. Parsing the
// result reproduces the configuration exactly.
std::string serialize_config(const RunConfig& cfg);

// Comma-separated reals, e.g. "0, 0.5, 1".
std::vector<double> parse_real_list(const std::string& text, const std::string& what);
DistributionKind parse_distribution_kind(const std::string& text);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace qiopa::cli
