#pragma once

// Monte Carlo generation of heralded single-shot detection records.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "qiopa/fock.hpp"
#include "qiopa/rng.hpp"

namespace qiopa {

struct DetectionConfig {
  double eta = 1.0;          // lumped channel and detector efficiency
  double analog_gain = 1.0;  // signal units per photoelectron
  double noise_sigma = 0.0;  // additive Gaussian noise, signal units

  void validate() const;
};

// Product of per-stage efficiencies (fiber coupling, filter, quantum efficiency, ...).
double overall_efficiency(std::span<const double> stages);

enum class Branch { StimulatedOdd, StimulatedEven, Spontaneous };

const char* to_string(Branch branch);

struct Signals {
  double plus = 0.0;
  double minus = 0.0;
};

struct Shot {
  Branch true_branch = Branch::Spontaneous;
  PhotonPair true_counts;
  PhotonPair detected_counts;
  Signals signals;
};

struct ExperimentConfig {
  double g = 4.34;
  double p = 0.40;       // probability the heralded photon stimulates emission
  double v_in = 0.784;   // input-qubit visibility
  double phi_a = 0.0;    // analysis-basis phase
  DetectionConfig detection{0.016, 1.0, 0.0};
  std::vector<double> phi_grid;
  std::uint64_t shots_per_point = 2500;
  std::uint64_t seed = 1;
  double tail_eps = kDefaultTailEps;
  std::size_t max_index = kDefaultMaxIndex;
  double filter_q = 0.0;

  void validate() const;
};

// n evenly spaced phases over [0, 2pi).
std::vector<double> uniform_phase_grid(std::size_t n);

ExperimentConfig reference_preset();
// Stress configuration at g = 5.7 (m ~ 2.2e4); needs a larger series limit.
ExperimentConfig stress_preset();

// Inverse-CDF sampler over the squeezed vacuum and squeezed single-photon
// series. Immutable after construction; safe to share across threads.
class CountSampler {
 public:
  CountSampler(const GainParams& gp, double tail_eps = kDefaultTailEps,
               std::size_t max_index = kDefaultMaxIndex);

  const GainParams& gain() const noexcept { return gp_; }
  std::int64_t draw_vacuum(CounterStream& rng) const;
  std::int64_t draw_single_photon(CounterStream& rng) const;

  double vacuum_mean() const noexcept { return vacuum_mean_; }
  double single_photon_mean() const noexcept { return single_photon_mean_; }

 private:
  static std::int64_t draw(const std::vector<double>& cdf, int parity, CounterStream& rng);

  GainParams gp_;
  std::vector<double> vacuum_cdf_;
  std::vector<double> single_cdf_;
  double vacuum_mean_;
  double single_photon_mean_;
};

struct TrueDraw {
  Branch branch;
  PhotonPair counts;
};

TrueDraw sample_true_counts(double phi, double phi_a, double p, double v_in,
                            const CountSampler& sampler, CounterStream& rng);

// Independent binomial thinning of each mode.
PhotonPair apply_loss(const PhotonPair& counts, double eta, CounterStream& rng);

Signals form_signals(const PhotonPair& detected, const DetectionConfig& cfg, CounterStream& rng);

// One full shot from its own stream.
Shot simulate_shot(double phi, const ExperimentConfig& cfg, const CountSampler& sampler,
                   CounterStream& rng);

struct PhaseRecord {
  double phi;
  std::vector<Shot> shots;
};

std::vector<PhaseRecord> run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);
std::vector<PhaseRecord> run_experiment(const ExperimentConfig& cfg, const CountSampler& sampler,
                                        unsigned threads = 1);

}  // namespace qiopa
