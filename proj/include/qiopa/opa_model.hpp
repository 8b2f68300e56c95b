#pragma once

// Closed-form predictions for the quantum-injected amplifier: mean fringes,
// clone numbers, fringe visibilities, and the equatorial branch weights.

#include <optional>

#include "qiopa/fock.hpp"

namespace qiopa {

struct FringePrediction {
  double phi;
  double n_plus_mean;
  double n_minus_mean;
};

// N_+-(phi) = m + (2m+1)(1 +- cos phi)/2 for a pure injected equatorial qubit.
FringePrediction mean_fringe(double phi, const GainParams& gp);

// Mean photon numbers of the imperfect source: with probability p the
// heralded photon stimulates (input visibility v_in), otherwise only
// spontaneous emission (m per mode).
FringePrediction mixture_fringe(double phi, const GainParams& gp, double p, double v_in = 1.0);

// (2m+1)/(4m+1)
double visibility_ideal(const GainParams& gp);
// p(2m+1) / (p(2m+1) + 2m). Throws InvalidArgument for p outside [0, 1].
double visibility_effective(const GainParams& gp, double p);
// 1/(4m+1)
double visibility_no_coherence(const GainParams& gp);

// 4m+1 for pure injection; p(4m+1) + (1-p) 2m for the mixture.
double clone_number(const GainParams& gp, std::optional<double> p = std::nullopt);

struct BranchWeights {
  double w_odd;
  double w_even;
};

// In the analysis basis at phase phi_a the amplifier is two independent
// single-mode squeezers, so the injected photon's number statistics are an
// incoherent mixture of the odd (|Phi>^{phi_a}) and even branches.
BranchWeights branch_weights(double phi, double phi_a = 0.0);

// p ~ T * dnu * dk. Throws InvalidArgument for factors outside [0, 1].
double estimate_p(double transmittivity, double spectral_matching, double spatial_matching);

}  // namespace qiopa
