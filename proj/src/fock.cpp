#include "qiopa/fock.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "qiopa/error.hpp"
#include "qiopa/summation.hpp"

namespace qiopa {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_joint_kind(DistributionKind kind) {
  return kind == DistributionKind::PhiPlus || kind == DistributionKind::PhiMinus;
}

// log of Gamma(k + 1/2) / (sqrt(pi) k!), i.e. log of C(2k, k) / 4^k.
double log_central_binomial_over_4k(std::size_t k) {
  const double kd = static_cast<double>(k);
  return std::log(boost::math::tgamma_delta_ratio(kd + 0.5, 0.5)) -
         0.5 * std::log(boost::math::constants::pi<double>());
}

}  // namespace

GainParams make_gain_params(double g) {
  if (!std::isfinite(g) || g < 0.0) {
    throw InvalidArgument("gain must be finite and non-negative, got " + std::to_string(g));
  }
  const double s = std::sinh(g);
  return GainParams(g, std::cosh(g), std::tanh(g), s * s);
}

const char* to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::PhiPlus:
      return "phi-plus";
    case DistributionKind::PhiMinus:
      return "phi-minus";
    case DistributionKind::SqueezedVacuum:
      return "squeezed-vacuum";
    case DistributionKind::SqueezedSinglePhoton:
      return "squeezed-single-photon";
  }
  return "unknown";
}

LogAmplitude log_amplitude_phi_plus(std::size_t i, std::size_t j, const GainParams& gp,
                                    std::size_t max_index) {
  if (i > max_index || j > max_index) {
    throw InvalidArgument("amplitude index beyond truncation limit");
  }
  const int sign = (i % 2 == 0) ? 1 : -1;
  const long double g = gp.g();
  if (g == 0.0L) {
    return {(i == 0 && j == 0) ? 0.0 : kNegInf, sign};
  }
  const long double li = static_cast<long double>(i);
  const long double lj = static_cast<long double>(j);
  const long double log_half_gamma = std::log(std::tanh(g) / 2.0L);
  const long double log_mag = -2.0L * std::log(std::cosh(g)) + (li + lj) * log_half_gamma +
                              0.5L * (std::lgamma(2.0L * li + 2.0L) + std::lgamma(2.0L * lj + 1.0L)) -
                              std::lgamma(li + 1.0L) - std::lgamma(lj + 1.0L);
  return {static_cast<double>(log_mag), sign};
}

ParitySeries::ParitySeries(int parity, std::vector<double> log_probs, double tail_bound)
    : parity_(parity), log_probs_(std::move(log_probs)), tail_bound_(tail_bound) {
  if (parity != 0 && parity != 1) {
    throw InvalidArgument("parity must be 0 or 1");
  }
}

double ParitySeries::log_probability(std::int64_t count) const {
  if (count < parity_ || (count - parity_) % 2 != 0) {
    return kNegInf;
  }
  const auto k = static_cast<std::size_t>((count - parity_) / 2);
  return k < log_probs_.size() ? log_probs_[k] : kNegInf;
}

double ParitySeries::mass() const {
  CompensatedSum sum;
  for (double lp : log_probs_) {
    sum.add(std::exp(lp));
  }
  return sum.value();
}

double ParitySeries::mean() const {
  CompensatedSum sum;
  for (std::size_t k = 0; k < log_probs_.size(); ++k) {
    sum.add(static_cast<double>(count_at(k)) * std::exp(log_probs_[k]));
  }
  return sum.value();
}

ParitySeries squeezed_series(DistributionKind kind, const GainParams& gp, double tail_eps,
                             std::size_t max_index) {
  if (is_joint_kind(kind)) {
    throw InvalidArgument("squeezed_series needs a single-mode kind");
  }
  if (!(tail_eps > 0.0 && tail_eps < 1.0)) {
    throw InvalidArgument("tail_eps must lie in (0, 1)");
  }
  const bool odd = kind == DistributionKind::SqueezedSinglePhoton;
  const int parity = odd ? 1 : 0;
  const double m_bar = gp.m_bar();
  if (m_bar == 0.0) {
    return ParitySeries(parity, {0.0}, 0.0);
  }

  const double log_c = 0.5 * std::log1p(m_bar);
  const double log_gamma2 = -std::log1p(1.0 / m_bar);
  const double log_norm = odd ? -3.0 * log_c : -log_c;
  const double log_m_bar = std::log(m_bar);
  const double log_eps = std::log(tail_eps);

  std::vector<double> log_probs;
  double log_tail = 0.0;
  for (std::size_t k = 0; k <= max_index; ++k) {
    const double kd = static_cast<double>(k);
    double lt = kd * log_gamma2 + log_central_binomial_over_4k(k) + log_norm;
    if (odd) {
      lt += std::log(2.0 * kd + 1.0);
    }
    log_probs.push_back(lt);

    // Successive-term ratios: even (2k+1)/(2k+2) G^2 < G^2; odd
    // (2k+3)/(2k+2) G^2, decreasing in k. Geometric tail beyond term k.
    if (odd) {
      const double denom = 2.0 * kd + 2.0 - m_bar;
      if (denom <= 0.0) {
        log_tail = 0.0;
        continue;
      }
      log_tail = lt + log_m_bar + std::log(2.0 * kd + 3.0) - std::log(denom);
    } else {
      log_tail = lt + log_m_bar;
    }
    if (log_tail <= log_eps) {
      return ParitySeries(parity, std::move(log_probs), std::exp(log_tail));
    }
  }
  const double achieved = std::exp(log_tail);
  throw TruncationFailure(std::string(to_string(kind)) + " series needs more than " +
                              std::to_string(max_index) + " terms; achieved tail bound " +
                              std::to_string(achieved),
                          achieved);
}

PhotonNumberDistribution::PhotonNumberDistribution(DistributionKind kind,
                                                   std::vector<ParitySeries> series)
    : kind_(kind), series_(std::move(series)), tail_mass_bound_(0.0) {
  for (const auto& s : series_) {
    tail_mass_bound_ += s.tail_bound();
  }
}

PhotonNumberDistribution PhotonNumberDistribution::marginal(DistributionKind kind,
                                                            ParitySeries series) {
  if (is_joint_kind(kind)) {
    throw InvalidArgument("marginal distribution needs a single-mode kind");
  }
  std::vector<ParitySeries> v;
  v.push_back(std::move(series));
  return PhotonNumberDistribution(kind, std::move(v));
}

PhotonNumberDistribution PhotonNumberDistribution::joint(DistributionKind kind,
                                                         ParitySeries plus_series,
                                                         ParitySeries minus_series) {
  if (!is_joint_kind(kind)) {
    throw InvalidArgument("joint distribution needs PhiPlus or PhiMinus");
  }
  std::vector<ParitySeries> v;
  v.push_back(std::move(plus_series));
  v.push_back(std::move(minus_series));
  return PhotonNumberDistribution(kind, std::move(v));
}

double PhotonNumberDistribution::log_probability(const PhotonPair& pair) const {
  if (!is_joint()) {
    throw InvalidArgument("pair lookup on a single-mode distribution");
  }
  return series_[0].log_probability(pair.n_plus) + series_[1].log_probability(pair.n_minus);
}

double PhotonNumberDistribution::log_probability(std::int64_t count) const {
  if (is_joint()) {
    throw InvalidArgument("single-count lookup on a joint distribution");
  }
  return series_[0].log_probability(count);
}

std::size_t PhotonNumberDistribution::support_size() const {
  std::size_t n = 1;
  for (const auto& s : series_) {
    n *= s.size();
  }
  return n;
}

void PhotonNumberDistribution::for_each(
    const std::function<void(const PhotonPair&, double)>& visit) const {
  if (!is_joint()) {
    throw InvalidArgument("pair iteration on a single-mode distribution");
  }
  const auto& plus = series_[0];
  const auto& minus = series_[1];
  for (std::size_t a = 0; a < plus.size(); ++a) {
    for (std::size_t b = 0; b < minus.size(); ++b) {
      visit(PhotonPair{plus.count_at(a), minus.count_at(b)},
            plus.log_probability_at(a) + minus.log_probability_at(b));
    }
  }
}

void PhotonNumberDistribution::for_each(
    const std::function<void(std::int64_t, double)>& visit) const {
  if (is_joint()) {
    throw InvalidArgument("count iteration on a joint distribution");
  }
  const auto& s = series_[0];
  for (std::size_t k = 0; k < s.size(); ++k) {
    visit(s.count_at(k), s.log_probability_at(k));
  }
}

double PhotonNumberDistribution::total_mass() const {
  double m = 1.0;
  for (const auto& s : series_) {
    m *= s.mass();
  }
  return m;
}

double PhotonNumberDistribution::mean_plus() const {
  return is_joint() ? series_[0].mean() * series_[1].mass() : series_[0].mean();
}

double PhotonNumberDistribution::mean_minus() const {
  return is_joint() ? series_[1].mean() * series_[0].mass() : 0.0;
}

PhotonNumberDistribution marginal_distribution(DistributionKind kind, const GainParams& gp,
                                               double tail_eps, std::size_t max_index) {
  return PhotonNumberDistribution::marginal(kind,
                                            squeezed_series(kind, gp, tail_eps, max_index));
}

PhotonNumberDistribution joint_distribution(DistributionKind kind, const GainParams& gp,
                                            double tail_eps, std::size_t max_index) {
  if (!is_joint_kind(kind)) {
    throw InvalidArgument("joint_distribution needs PhiPlus or PhiMinus");
  }
  if (!(tail_eps > 0.0 && tail_eps < 1.0)) {
    throw InvalidArgument("tail_eps must lie in (0, 1)");
  }
  auto odd = squeezed_series(DistributionKind::SqueezedSinglePhoton, gp, tail_eps / 2, max_index);
  auto even = squeezed_series(DistributionKind::SqueezedVacuum, gp, tail_eps / 2, max_index);
  if (kind == DistributionKind::PhiPlus) {
    return PhotonNumberDistribution::joint(kind, std::move(odd), std::move(even));
  }
  return PhotonNumberDistribution::joint(kind, std::move(even), std::move(odd));
}

int parity_eigenvalue(const PhotonPair& pair) noexcept {
  return (pair.n_plus % 2 != 0) ? 1 : -1;
}

double cell_likelihood_ratio(std::size_t i, std::size_t j, const GainParams& gp) {
  // Pi-(2i, 2j+1) = Pi+(2j+1, 2i) by the +/- mirror symmetry.
  const auto plus = log_amplitude_phi_plus(i, j, gp);
  const auto minus = log_amplitude_phi_plus(j, i, gp);
  return std::exp(2.0 * (plus.log_magnitude - minus.log_magnitude));
}

}  // namespace qiopa
