#include "qiopa/detection.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "qiopa/error.hpp"
#include "qiopa/opa_model.hpp"

namespace qiopa {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) {
    throw InvalidArgument(msg);
  }
}

std::vector<double> cumulative_table(const ParitySeries& series) {
  std::vector<double> cdf;
  cdf.reserve(series.size());
  double acc = 0.0;
  for (double lp : series.log_probabilities()) {
    acc += std::exp(lp);
    cdf.push_back(acc);
  }
  return cdf;
}

}  // namespace

void DetectionConfig::validate() const {
  require(eta >= 0.0 && eta <= 1.0, "detection efficiency must lie in [0, 1]");
  require(analog_gain > 0.0 && std::isfinite(analog_gain), "analog gain must be positive");
  require(noise_sigma >= 0.0 && std::isfinite(noise_sigma), "noise sigma must be >= 0");
}

double overall_efficiency(std::span<const double> stages) {
  double eta = 1.0;
  for (double s : stages) {
    require(s >= 0.0 && s <= 1.0, "stage efficiency must lie in [0, 1]");
    eta *= s;
  }
  return eta;
}

const char* to_string(Branch branch) {
  switch (branch) {
    case Branch::StimulatedOdd:
      return "stimulated-odd";
    case Branch::StimulatedEven:
      return "stimulated-even";
    case Branch::Spontaneous:
      return "spontaneous";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  require(std::isfinite(g) && g >= 0.0, "g must be finite and >= 0");
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  require(v_in >= 0.0 && v_in <= 1.0, "v_in must lie in [0, 1]");
  require(std::isfinite(phi_a), "phi_a must be finite");
  detection.validate();
  require(!phi_grid.empty(), "phi grid must not be empty");
  for (double phi : phi_grid) {
    require(std::isfinite(phi), "phi grid entries must be finite");
  }
  require(phi_grid.size() <= std::numeric_limits<std::uint32_t>::max(), "phi grid too large");
  require(shots_per_point >= 1, "shots per point must be >= 1");
  require(shots_per_point <= std::numeric_limits<std::uint32_t>::max(),
          "shots per point must fit in 32 bits");
  require(tail_eps > 0.0 && tail_eps < 1.0, "tail_eps must lie in (0, 1)");
  require(max_index >= 1, "max_index must be >= 1");
  require(filter_q >= 0.0 && std::isfinite(filter_q), "filter q must be >= 0");
}

std::vector<double> uniform_phase_grid(std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) {
    grid[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  }
  return grid;
}

ExperimentConfig reference_preset() {
  ExperimentConfig cfg;
  cfg.phi_grid = uniform_phase_grid(12);
  return cfg;
}

ExperimentConfig stress_preset() {
  ExperimentConfig cfg = reference_preset();
  cfg.g = 5.7;
  cfg.max_index = 2'000'000;
  return cfg;
}

CountSampler::CountSampler(const GainParams& gp, double tail_eps, std::size_t max_index)
    : gp_(gp) {
  // Each marginal gets half the budget, matching the joint truncation.
  const auto vac = squeezed_series(DistributionKind::SqueezedVacuum, gp, tail_eps / 2, max_index);
  const auto one =
      squeezed_series(DistributionKind::SqueezedSinglePhoton, gp, tail_eps / 2, max_index);
  vacuum_cdf_ = cumulative_table(vac);
  single_cdf_ = cumulative_table(one);
  vacuum_mean_ = vac.mean() / vac.mass();
  single_photon_mean_ = one.mean() / one.mass();
}

std::int64_t CountSampler::draw(const std::vector<double>& cdf, int parity, CounterStream& rng) {
  const double u = rng.uniform01() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  auto k = static_cast<std::int64_t>(it - cdf.begin());
  k = std::min<std::int64_t>(k, static_cast<std::int64_t>(cdf.size()) - 1);
  return parity + 2 * k;
}

std::int64_t CountSampler::draw_vacuum(CounterStream& rng) const {
  return draw(vacuum_cdf_, 0, rng);
}

std::int64_t CountSampler::draw_single_photon(CounterStream& rng) const {
  return draw(single_cdf_, 1, rng);
}

TrueDraw sample_true_counts(double phi, double phi_a, double p, double v_in,
                            const CountSampler& sampler, CounterStream& rng) {
  if (rng.uniform01() >= p) {
    const auto a = sampler.draw_vacuum(rng);
    const auto b = sampler.draw_vacuum(rng);
    return {Branch::Spontaneous, {a, b}};
  }
  // Imperfect input visibility: the qubit is phase-flipped with probability (1 - v_in)/2.
  double phi_in = phi;
  if (rng.uniform01() >= 0.5 * (1.0 + v_in)) {
    phi_in += std::numbers::pi;
  }
  const auto w = branch_weights(phi_in, phi_a);
  if (rng.uniform01() < w.w_odd) {
    const auto a = sampler.draw_single_photon(rng);
    const auto b = sampler.draw_vacuum(rng);
    return {Branch::StimulatedOdd, {a, b}};
  }
  const auto a = sampler.draw_vacuum(rng);
  const auto b = sampler.draw_single_photon(rng);
  return {Branch::StimulatedEven, {a, b}};
}

PhotonPair apply_loss(const PhotonPair& counts, double eta, CounterStream& rng) {
  if (eta >= 1.0) {
    return counts;
  }
  if (eta <= 0.0) {
    return {0, 0};
  }
  auto thin = [&](std::int64_t n) -> std::int64_t {
    if (n == 0) {
      return 0;
    }
    std::binomial_distribution<std::int64_t> dist(n, eta);
    return dist(rng);
  };
  const auto a = thin(counts.n_plus);
  const auto b = thin(counts.n_minus);
  return {a, b};
}

Signals form_signals(const PhotonPair& detected, const DetectionConfig& cfg, CounterStream& rng) {
  Signals s{cfg.analog_gain * static_cast<double>(detected.n_plus),
            cfg.analog_gain * static_cast<double>(detected.n_minus)};
  if (cfg.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
    s.plus = std::max(0.0, s.plus + noise(rng));
    s.minus = std::max(0.0, s.minus + noise(rng));
  }
  return s;
}

Shot simulate_shot(double phi, const ExperimentConfig& cfg, const CountSampler& sampler,
                   CounterStream& rng) {
  const auto truth = sample_true_counts(phi, cfg.phi_a, cfg.p, cfg.v_in, sampler, rng);
  const auto detected = apply_loss(truth.counts, cfg.detection.eta, rng);
  return {truth.branch, truth.counts, detected, form_signals(detected, cfg.detection, rng)};
}

std::vector<PhaseRecord> run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  const CountSampler sampler(make_gain_params(cfg.g), cfg.tail_eps, cfg.max_index);
  return run_experiment(cfg, sampler, threads);
}

std::vector<PhaseRecord> run_experiment(const ExperimentConfig& cfg, const CountSampler& sampler,
                                        unsigned threads) {
  cfg.validate();
  if (sampler.gain().g() != cfg.g) {
    throw InvalidArgument("sampler gain does not match experiment gain");
  }
  const std::size_t n_phi = cfg.phi_grid.size();
  const std::size_t n_shots = cfg.shots_per_point;
  std::vector<PhaseRecord> records(n_phi);
  for (std::size_t k = 0; k < n_phi; ++k) {
    records[k].phi = cfg.phi_grid[k];
    records[k].shots.resize(n_shots);
  }

  const std::size_t total = n_phi * n_shots;
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t k = idx / n_shots;
      const std::size_t s = idx % n_shots;
      CounterStream rng(cfg.seed, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(s));
      records[k].shots[s] = simulate_shot(cfg.phi_grid[k], cfg, sampler, rng);
    }
  };

  threads = std::max(1u, threads);
  if (threads == 1 || total < 2 * threads) {
    work(0, total);
    return records;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(total, begin + chunk);
      if (begin >= end) {
        break;
      }
      pool.emplace_back([&, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return records;
}

}  // namespace qiopa
