#include "qiopa/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "qiopa/error.hpp"

namespace qiopa::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (t.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ConfigError(what + ": expected a finite real, got '" + text + "'");
  }
  return value;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (t.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError(what + ": expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

std::string format_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k > 0) {
      out += ", ";
    }
    out += format_real(xs[k]);
  }
  return out;
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    auto real = [&f](const char* key, double ExperimentConfig::*member) {
      f.push_back({key,
                   [member](RunConfig& c, const std::string& v, const std::string& w) {
                     c.experiment.*member = parse_real(v, w);
                   },
                   [member](const RunConfig& c) { return format_real(c.experiment.*member); }});
    };
    auto detection = [&f](const char* key, double DetectionConfig::*member) {
      f.push_back({key,
                   [member](RunConfig& c, const std::string& v, const std::string& w) {
                     c.experiment.detection.*member = parse_real(v, w);
                   },
                   [member](const RunConfig& c) {
                     return format_real(c.experiment.detection.*member);
                   }});
    };
    real("opa.g", &ExperimentConfig::g);
    real("opa.p", &ExperimentConfig::p);
    real("opa.v_in", &ExperimentConfig::v_in);
    real("opa.phi_a", &ExperimentConfig::phi_a);
    detection("detection.eta", &DetectionConfig::eta);
    detection("detection.analog_gain", &DetectionConfig::analog_gain);
    detection("detection.noise_sigma", &DetectionConfig::noise_sigma);
    f.push_back({"scan.phi_grid",
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   c.experiment.phi_grid = parse_real_list(v, w);
                 },
                 [](const RunConfig& c) { return format_list(c.experiment.phi_grid); }});
    f.push_back({"scan.shots_per_point",
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   c.experiment.shots_per_point = parse_unsigned(v, w);
                 },
                 [](const RunConfig& c) { return std::to_string(c.experiment.shots_per_point); }});
    f.push_back({"run.seed",
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   c.experiment.seed = parse_unsigned(v, w);
                 },
                 [](const RunConfig& c) { return std::to_string(c.experiment.seed); }});
    real("fock.tail_eps", &ExperimentConfig::tail_eps);
    f.push_back({"fock.max_index",
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   c.experiment.max_index = parse_unsigned(v, w);
                 },
                 [](const RunConfig& c) { return std::to_string(c.experiment.max_index); }});
    real("filter.q", &ExperimentConfig::filter_q);
    f.push_back({"gain_sweep.g_list",
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   c.gain_list = parse_real_list(v, w);
                 },
                 [](const RunConfig& c) { return format_list(c.gain_list); }});
    f.push_back({"filter_sweep.q_list",
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   c.q_list = parse_real_list(v, w);
                 },
                 [](const RunConfig& c) { return format_list(c.q_list); }});
    f.push_back({"distribution.g",
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   c.distribution_g = parse_real(v, w);
                 },
                 [](const RunConfig& c) { return format_real(c.distribution_g); }});
    f.push_back({"distribution.kind",
                 [](RunConfig& c, const std::string& v, const std::string&) {
                   c.distribution_kind = parse_distribution_kind(v);
                 },
                 [](const RunConfig& c) { return std::string(to_string(c.distribution_kind)); }});
    f.push_back({"distribution.max_rows",
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   c.distribution_max_rows = parse_unsigned(v, w);
                 },
                 [](const RunConfig& c) { return std::to_string(c.distribution_max_rows); }});
    f.push_back({"oracle.g_list",
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   c.oracle_g_list = parse_real_list(v, w);
                 },
                 [](const RunConfig& c) { return format_list(c.oracle_g_list); }});
    f.push_back({"oracle.cutoff",
                 [](RunConfig& c, const std::string& v, const std::string& w) {
                   c.oracle_cutoff = parse_unsigned(v, w);
                 },
                 [](const RunConfig& c) { return std::to_string(c.oracle_cutoff); }});
    return f;
  }();
  return table;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_real(item, what));
  }
  if (out.empty()) {
    throw ConfigError(what + ": empty list");
  }
  return out;
}

DistributionKind parse_distribution_kind(const std::string& text) {
  const std::string t = trim(text);
  for (auto kind : {DistributionKind::PhiPlus, DistributionKind::PhiMinus,
                    DistributionKind::SqueezedVacuum, DistributionKind::SqueezedSinglePhoton}) {
    if (t == to_string(kind)) {
      return kind;
    }
  }
  throw ConfigError("unknown distribution kind '" + text +
                    "' (phi-plus, phi-minus, squeezed-vacuum, squeezed-single-photon)");
}

void RunConfig::validate() const {
  try {
    experiment.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  auto check_gains = [](const std::vector<double>& gs, const char* what) {
    if (gs.empty()) {
      throw ConfigError(std::string(what) + " must not be empty");
    }
    for (double g : gs) {
      if (!(g >= 0.0 && std::isfinite(g))) {
        throw ConfigError(std::string(what) + " entries must be finite and >= 0");
      }
    }
  };
  check_gains(gain_list, "gain_sweep.g_list");
  check_gains(q_list, "filter_sweep.q_list");
  check_gains(oracle_g_list, "oracle.g_list");
  check_gains({distribution_g}, "distribution.g");
  if (distribution_max_rows < 1) {
    throw ConfigError("distribution.max_rows must be >= 1");
  }
  if (oracle_cutoff < 2) {
    throw ConfigError("oracle.cutoff must be >= 2");
  }
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, std::pair<std::string, int>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(where + ": empty key");
    }
    if (!entries.emplace(key, std::make_pair(value, line_no)).second) {
      throw ConfigError(where + ": duplicate key '" + key + "'");
    }
  }

  RunConfig cfg;
  if (auto it = entries.find("preset"); it != entries.end()) {
    const std::string& name = it->second.first;
    if (name == "reference") {
      cfg.experiment = reference_preset();
    } else if (name == "stress") {
      cfg.experiment = stress_preset();
    } else {
      throw ConfigError(source + ":" + std::to_string(it->second.second) + ": unknown preset '" +
                        name + "' (reference, stress)");
    }
    entries.erase(it);
  }
  if (entries.count("scan.phi_points") != 0) {
    if (entries.count("scan.phi_grid") != 0) {
      throw ConfigError(source + ": scan.phi_points and scan.phi_grid are mutually exclusive");
    }
    const auto& [value, ln] = entries.at("scan.phi_points");
    const auto n =
        parse_unsigned(value, source + ":" + std::to_string(ln) + ": scan.phi_points");
    if (n < 1) {
      throw ConfigError(source + ":" + std::to_string(ln) + ": scan.phi_points must be >= 1");
    }
    cfg.experiment.phi_grid = uniform_phase_grid(n);
    entries.erase("scan.phi_points");
  }
  for (const auto& [key, entry] : entries) {
    const auto& table = fields();
    const auto field = std::find_if(table.begin(), table.end(),
                                    [&](const Field& f) { return key == f.key; });
    const std::string where = source + ":" + std::to_string(entry.second) + ": " + key;
    if (field == table.end()) {
      throw ConfigError(source + ":" + std::to_string(entry.second) + ": unknown key '" + key +
                        "'");
    }
    field->set(cfg, entry.first, where);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  return parse_config(in, path.string());
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(cfg);
    out += '\n';
  }
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

}  // namespace qiopa::cli
