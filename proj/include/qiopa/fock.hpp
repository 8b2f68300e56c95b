#pragma once

// Photon-number amplitudes and distributions of the amplified output field.
//
// The amplifier output for a photon injected in polarization pi_+ is
//
//   |Phi+> = sum_ij gamma_ij sqrt((2i+1)! (2j)!) / (i! j!) |2i+1>_+ |2j>_-
//   gamma_ij = C^-2 (-Gamma/2)^i (Gamma/2)^j,  C = cosh g, Gamma = tanh g
//
// which factorizes into a squeezed single photon in pi_+ and a squeezed
// vacuum in pi_-. All probabilities are held as natural logarithms.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace qiopa {

inline constexpr double kDefaultTailEps = 1e-9;
inline constexpr std::size_t kDefaultMaxIndex = 200'000;

class GainParams {
 public:
  double g() const noexcept { return g_; }
  double cosh_g() const noexcept { return cosh_g_; }
  double tanh_g() const noexcept { return tanh_g_; }
  // sinh^2 g: mean spontaneous photon number per polarization mode.
  double m_bar() const noexcept { return m_bar_; }

 private:
  friend GainParams make_gain_params(double g);
  GainParams(double g, double c, double t, double m)
      : g_(g), cosh_g_(c), tanh_g_(t), m_bar_(m) {}

  double g_;
  double cosh_g_;
  double tanh_g_;
  double m_bar_;
};

// Throws InvalidArgument for negative or non-finite g.
GainParams make_gain_params(double g);

struct PhotonPair {
  std::int64_t n_plus = 0;
  std::int64_t n_minus = 0;

  friend bool operator==(const PhotonPair&, const PhotonPair&) = default;
};

enum class DistributionKind { PhiPlus, PhiMinus, SqueezedVacuum, SqueezedSinglePhoton };

const char* to_string(DistributionKind kind);

// log|a| and sign of a real amplitude.
struct LogAmplitude {
  double log_magnitude;
  int sign;
};

// Amplitude of the |2i+1>_+ |2j>_- term of |Phi+>, evaluated directly from
// the closed form in extended precision via log-gamma.
LogAmplitude log_amplitude_phi_plus(std::size_t i, std::size_t j, const GainParams& gp,
                                    std::size_t max_index = kDefaultMaxIndex);

// Probability series of one mode restricted to one parity: counts are
// parity + 2k for k = 0 .. size()-1.
class ParitySeries {
 public:
  ParitySeries(int parity, std::vector<double> log_probs, double tail_bound);

  int parity() const noexcept { return parity_; }
  std::size_t size() const noexcept { return log_probs_.size(); }
  std::int64_t count_at(std::size_t k) const noexcept {
    return parity_ + 2 * static_cast<std::int64_t>(k);
  }
  double log_probability_at(std::size_t k) const { return log_probs_.at(k); }
  // -inf for counts off the support or beyond the truncation.
  double log_probability(std::int64_t count) const;
  const std::vector<double>& log_probabilities() const noexcept { return log_probs_; }

  double tail_bound() const noexcept { return tail_bound_; }
  double mass() const;
  double mean() const;

 private:
  int parity_;
  std::vector<double> log_probs_;
  double tail_bound_;
};

// Truncated photon-number distribution with a certified bound on the mass
// left out. Joint kinds are stored factorized as (pi_+ series, pi_- series);
// entries are generated on demand, since at experimental gain the support
// holds ~10^9 pairs.
class PhotonNumberDistribution {
 public:
  static PhotonNumberDistribution marginal(DistributionKind kind, ParitySeries series);
  static PhotonNumberDistribution joint(DistributionKind kind, ParitySeries plus_series,
                                        ParitySeries minus_series);

  DistributionKind kind() const noexcept { return kind_; }
  bool is_joint() const noexcept { return series_.size() == 2; }
  double tail_mass_bound() const noexcept { return tail_mass_bound_; }

  // Marginal kinds: the single series. Joint kinds: index 0 is pi_+, 1 is pi_-.
  const ParitySeries& series(std::size_t mode = 0) const { return series_.at(mode); }

  double log_probability(const PhotonPair& pair) const;  // joint kinds
  double log_probability(std::int64_t count) const;       // marginal kinds

  std::size_t support_size() const;
  void for_each(const std::function<void(const PhotonPair&, double)>& visit) const;
  void for_each(const std::function<void(std::int64_t, double)>& visit) const;

  // Mass over the stored support.
  double total_mass() const;
  // Joint: pi_+ mean. Marginal: the mean.
  double mean_plus() const;
  double mean_minus() const;

 private:
  PhotonNumberDistribution(DistributionKind kind, std::vector<ParitySeries> series);

  DistributionKind kind_;
  std::vector<ParitySeries> series_;
  double tail_mass_bound_;
};

// Squeezed vacuum (even counts) or squeezed single photon (odd counts),
// truncated once the geometric tail bound certifies omitted mass <= tail_eps.
ParitySeries squeezed_series(DistributionKind kind, const GainParams& gp, double tail_eps,
                             std::size_t max_index = kDefaultMaxIndex);

PhotonNumberDistribution marginal_distribution(DistributionKind kind, const GainParams& gp,
                                               double tail_eps = kDefaultTailEps,
                                               std::size_t max_index = kDefaultMaxIndex);

// Each factor is truncated at tail_eps/2 so tail_mass_bound <= tail_eps.
PhotonNumberDistribution joint_distribution(DistributionKind kind, const GainParams& gp,
                                            double tail_eps = kDefaultTailEps,
                                            std::size_t max_index = kDefaultMaxIndex);

// s_z eigenvalue on the pi_+ field: +1 for odd n_plus, -1 for even.
int parity_eigenvalue(const PhotonPair& pair) noexcept;

// Pi+ / Pi- coarse-grained over the 2x2 parity cell with corner (2i, 2j).
// Pointwise the two distributions have disjoint support, so the likelihood
// ratio is only meaningful per cell.
double cell_likelihood_ratio(std::size_t i, std::size_t j, const GainParams& gp);

}  // namespace qiopa
