#pragma once

// Brute-force reference: evolution of two polarization modes (H, V) in a
// truncated Fock space under the pair-creation generator
//
//   K = a_H^dag a_V^dag - a_H a_V,   U = exp(g K),
//
// followed by passive rotation into an equatorial analysis basis. Used to
// certify the closed-form amplitudes and the branch decomposition at small
// gain; not meant for experimental gains.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Sparse>

namespace qiopa {

using Complex = std::complex<double>;

// Amplitudes over |n_H, n_V> with n_H, n_V < cutoff.
class TruncatedState {
 public:
  explicit TruncatedState(std::size_t cutoff);

  static TruncatedState vacuum(std::size_t cutoff);
  static TruncatedState fock(std::size_t cutoff, std::size_t n_h, std::size_t n_v);
  // One photon in 2^{-1/2}(|H> + e^{i phi}|V>).
  static TruncatedState equatorial_photon(std::size_t cutoff, double phi);

  std::size_t cutoff() const noexcept { return cutoff_; }
  Complex amplitude(std::size_t n_h, std::size_t n_v) const;
  void set_amplitude(std::size_t n_h, std::size_t n_v, Complex value);
  const std::vector<Complex>& amplitudes() const noexcept { return amps_; }

  double norm_squared() const;
  // Probability that escaped beyond the cutoff during evolution.
  double norm_leak() const noexcept { return norm_leak_; }

 private:
  friend TruncatedState evolve(const TruncatedState&, double, double, std::size_t);

  std::size_t cutoff_;
  std::vector<Complex> amps_;
  double norm_leak_ = 0.0;
};

// Index of |n_H, n_V> in the flattened basis is n_H * cutoff + n_V.
Eigen::SparseMatrix<double> build_hamiltonian_generator(std::size_t cutoff);

// exp(gK) applied exactly (per n_H - n_V sector, by eigendecomposition) in a
// space extended to extension * cutoff; the result is projected back and the
// probability outside the cutoff is reported as norm_leak. Throws
// CutoffTooSmall when the leak exceeds leak_tolerance.
TruncatedState evolve(const TruncatedState& state, double g, double leak_tolerance = 1e-8,
                      std::size_t extension = 2);

// Amplitudes over |m>_{phi_a} |n>_{phi_a perp}, m, n < cutoff, where
//   a_phi^dag      = 2^{-1/2}(a_H^dag + e^{i phi} a_V^dag)
//   a_{phi perp}^dag = 2^{-1/2}(-e^{-i phi} a_H^dag + a_V^dag).
// Total-photon sectors at or above the cutoff are incomplete; their error is
// bounded by the state's norm leak.
struct AnalysisAmplitudes {
  std::size_t cutoff;
  std::vector<Complex> amps;  // m * cutoff + n

  Complex at(std::size_t m, std::size_t n) const { return amps.at(m * cutoff + n); }
};

AnalysisAmplitudes rotate_to_analysis_basis(const TruncatedState& state, double phi_a);

// |amplitude|^2 on the same m * cutoff + n grid.
std::vector<double> number_distribution(const AnalysisAmplitudes& amps);

struct PhiPlusCheck {
  double max_amplitude_deviation;     // signed amplitudes, closed-form convention
  double max_probability_deviation;
  double norm_leak;
};

// Evolves a pi_+ photon and compares amplitude by amplitude with the closed
// form. The generator's phase reference differs from the closed form's by
// a_+- -> i a_+-, i.e. a factor (-1)^(i+j) on the |2i+1>|2j> term, which is
// removed before comparing.
PhiPlusCheck check_phi_plus(double g, std::size_t cutoff);

// Max deviation between number statistics of (phi photon, phi basis) and
// (phi = 0 photon, phi = 0 basis).
double check_phase_covariance(double g, std::size_t cutoff, double phi);

// Max deviation between the phi photon's number statistics in the pi_+-
// basis and the w_odd-weighted mixture of the closed-form Phi+ and Phi-.
double check_branch_mixture(double g, std::size_t cutoff, double phi);

}  // namespace qiopa
