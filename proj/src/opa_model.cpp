#include "qiopa/opa_model.hpp"

#include <cmath>
#include <string>

#include "qiopa/error.hpp"

namespace qiopa {

namespace {

void require_unit_interval(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw InvalidArgument(std::string(name) + " must lie in [0, 1], got " + std::to_string(x));
  }
}

}  // namespace

FringePrediction mean_fringe(double phi, const GainParams& gp) {
  const double m = gp.m_bar();
  const double c = std::cos(phi);
  return {phi, m + 0.5 * (2.0 * m + 1.0) * (1.0 + c), m + 0.5 * (2.0 * m + 1.0) * (1.0 - c)};
}

FringePrediction mixture_fringe(double phi, const GainParams& gp, double p, double v_in) {
  require_unit_interval(p, "p");
  require_unit_interval(v_in, "v_in");
  const double m = gp.m_bar();
  const double c = v_in * std::cos(phi);
  const double stim_plus = m + 0.5 * (2.0 * m + 1.0) * (1.0 + c);
  const double stim_minus = m + 0.5 * (2.0 * m + 1.0) * (1.0 - c);
  return {phi, p * stim_plus + (1.0 - p) * m, p * stim_minus + (1.0 - p) * m};
}

double visibility_ideal(const GainParams& gp) {
  const double m = gp.m_bar();
  return (2.0 * m + 1.0) / (4.0 * m + 1.0);
}

double visibility_effective(const GainParams& gp, double p) {
  require_unit_interval(p, "p");
  const double m = gp.m_bar();
  const double num = p * (2.0 * m + 1.0);
  const double den = num + 2.0 * m;
  return den == 0.0 ? 0.0 : num / den;
}

double visibility_no_coherence(const GainParams& gp) { return 1.0 / (4.0 * gp.m_bar() + 1.0); }

double clone_number(const GainParams& gp, std::optional<double> p) {
  const double m = gp.m_bar();
  if (!p) {
    return 4.0 * m + 1.0;
  }
  require_unit_interval(*p, "p");
  return *p * (4.0 * m + 1.0) + (1.0 - *p) * 2.0 * m;
}

BranchWeights branch_weights(double phi, double phi_a) {
  const double c = std::cos(0.5 * (phi - phi_a));
  const double w = c * c;
  return {w, 1.0 - w};
}

double estimate_p(double transmittivity, double spectral_matching, double spatial_matching) {
  require_unit_interval(transmittivity, "transmittivity");
  require_unit_interval(spectral_matching, "spectral matching");
  require_unit_interval(spatial_matching, "spatial matching");
  return transmittivity * spectral_matching * spatial_matching;
}

}  // namespace qiopa
