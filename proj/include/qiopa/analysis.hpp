#pragma once

// Downstream analysis of shot records: fringe fitting, the |I+ - I-| >= q
// post-selection filter, state discrimination and fidelity verdicts.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qiopa/detection.hpp"

namespace qiopa {

// Best measure-and-resend fidelity for equatorial qubits.
inline constexpr double kClassicalEstimationFidelity = 0.75;

struct FilterConfig {
  double q = 0.0;  // threshold on |I+ - I-|, signal units
};

bool passes_filter(const Shot& shot, const FilterConfig& fc) noexcept;

struct FilterResult {
  std::vector<Shot> retained;
  double retained_fraction = 0.0;
};

FilterResult o_filter(std::span<const Shot> shots, const FilterConfig& fc);

struct PhaseMeans {
  double phi = 0.0;
  double mean_plus = 0.0;
  double se_plus = 0.0;
  double mean_minus = 0.0;
  double se_minus = 0.0;
  std::size_t n_shots = 0;
};

// Per-phase signal means and standard errors over the shots passing fc.
std::vector<PhaseMeans> phase_means(std::span<const PhaseRecord> records,
                                    const FilterConfig& fc = {});

// A cos(phi + phase0) + B fitted by weighted least squares at unit frequency.
struct FringeFit {
  double amplitude = 0.0;
  double offset = 0.0;
  double phase0 = 0.0;
  double visibility = 0.0;
  double visibility_error = 0.0;
  double chi2 = 0.0;
  std::size_t dof = 0;
};

// Needs >= 4 distinct phases (mod 2pi) not confined to an arc shorter than pi;
// throws FitFailure otherwise. Weights are 1/err^2 when every error is
// positive; otherwise the fit is unweighted and errors come from the scatter.
FringeFit fit_fringe(std::span<const double> phis, std::span<const double> means,
                     std::span<const double> errors);

// (max - min) / (max + min); cross-check for the fitted visibility.
double max_min_visibility(std::span<const double> means);

struct FringeScanResult {
  std::vector<PhaseMeans> per_phase;
  FringeFit plus_fit;   // fringe of I+
  FringeFit minus_fit;  // fringe of I-
  std::size_t retained = 0;
  std::size_t total = 0;
  double retained_fraction = 0.0;

  double visibility() const noexcept { return plus_fit.visibility; }
  double visibility_error() const noexcept { return plus_fit.visibility_error; }
};

// Filters, averages and fits. Throws InsufficientData when some phase keeps
// fewer than two shots.
FringeScanResult scan_fringe(std::span<const PhaseRecord> records, const FilterConfig& fc = {});

struct CurvePoint {
  double q = 0.0;
  std::size_t retained = 0;
  std::size_t total = 0;
  double retained_fraction = 0.0;
  std::optional<FringeScanResult> scan;  // empty when data were insufficient
  std::string status;                    // "ok" or a reason
};

std::vector<CurvePoint> filtered_visibility_curve(std::span<const PhaseRecord> records,
                                                  std::span<const double> q_list);

// f(x) = a - b ln(x + c)
struct LogCurveFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double chi2 = 0.0;
  std::size_t dof = 0;
  bool converged = false;

  double operator()(double x) const;
  double reduced_chi2() const { return dof > 0 ? chi2 / static_cast<double>(dof) : 0.0; }
};

// Needs at least four points. a and b are solved linearly for each c; c is
// found by a grid scan refined with Brent's method.
LogCurveFit fit_log_curve(std::span<const double> x, std::span<const double> y,
                          std::span<const double> errors);

// Least-squares line through (q, ln fraction).
struct ExponentialDecayFit {
  double rate = 0.0;  // fraction ~ exp(intercept - rate q)
  double intercept = 0.0;
  double r_squared = 0.0;
};

ExponentialDecayFit fit_exponential_decay(std::span<const double> q,
                                          std::span<const double> fraction);

enum class Guess { Plus, Minus, Undecided };

// Which of |Phi>^{phi_a} (Plus) or its orthogonal partner (Minus) a shot's
// branch realizes; spontaneous shots realize neither.
std::optional<Guess> realized_state(Branch branch) noexcept;

struct DiscriminationResult {
  std::vector<Guess> guesses;
  std::size_t decided = 0;
  std::size_t scored = 0;  // decided shots from a stimulated branch
  std::size_t correct = 0;
  double success_rate = 0.0;     // correct / scored
  double decided_fraction = 0.0; // decided / all shots
};

// Plus if I+ > I-, Minus if I+ < I-, Undecided on ties.
DiscriminationResult discriminate(std::span<const Shot> shots);

// Plus if the detected pi_+ count is odd. Exact only without loss.
DiscriminationResult parity_discriminate(std::span<const Shot> shots);

struct FidelityVerdict {
  double fidelity;
  bool beats_classical;
};

FidelityVerdict fidelity_verdict(double visibility);

}  // namespace qiopa
