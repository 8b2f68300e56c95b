#include "qiopa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "qiopa/error.hpp"

namespace qiopa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct MeanStd {
  double mean = 0.0;
  double se = 0.0;
};

MeanStd mean_and_se(const std::vector<double>& xs) {
  MeanStd r;
  const auto n = xs.size();
  if (n == 0) {
    return r;
  }
  double sum = 0.0;
  for (double x : xs) {
    sum += x;
  }
  r.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double x : xs) {
      ss += (x - r.mean) * (x - r.mean);
    }
    r.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  return r;
}

// Checks that the phases pin down a unit-frequency sinusoid.
void check_phase_grid(std::span<const double> phis) {
  std::vector<double> wrapped;
  wrapped.reserve(phis.size());
  for (double phi : phis) {
    if (!std::isfinite(phi)) {
      throw FitFailure("non-finite phase");
    }
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) {
      w += kTwoPi;
    }
    wrapped.push_back(w);
  }
  std::sort(wrapped.begin(), wrapped.end());
  constexpr double tol = 1e-9;
  std::vector<double> distinct;
  for (double w : wrapped) {
    if (distinct.empty() || w - distinct.back() > tol) {
      distinct.push_back(w);
    }
  }
  if (distinct.size() > 1 && distinct.front() + kTwoPi - distinct.back() <= tol) {
    distinct.pop_back();
  }
  if (distinct.size() < 4) {
    throw FitFailure("fringe fit needs at least four distinct phases");
  }
  double max_gap = distinct.front() + kTwoPi - distinct.back();
  for (std::size_t k = 1; k < distinct.size(); ++k) {
    max_gap = std::max(max_gap, distinct[k] - distinct[k - 1]);
  }
  if (kTwoPi - max_gap < std::numbers::pi - 1e-12) {
    throw FitFailure("fringe fit needs phases spanning at least pi");
  }
}

}  // namespace

bool passes_filter(const Shot& shot, const FilterConfig& fc) noexcept {
  return std::fabs(shot.signals.plus - shot.signals.minus) >= fc.q;
}

FilterResult o_filter(std::span<const Shot> shots, const FilterConfig& fc) {
  FilterResult r;
  for (const auto& s : shots) {
    if (passes_filter(s, fc)) {
      r.retained.push_back(s);
    }
  }
  r.retained_fraction =
      shots.empty() ? 0.0
                    : static_cast<double>(r.retained.size()) / static_cast<double>(shots.size());
  return r;
}

std::vector<PhaseMeans> phase_means(std::span<const PhaseRecord> records, const FilterConfig& fc) {
  std::vector<PhaseMeans> out;
  out.reserve(records.size());
  std::vector<double> plus, minus;
  for (const auto& rec : records) {
    plus.clear();
    minus.clear();
    for (const auto& s : rec.shots) {
      if (passes_filter(s, fc)) {
        plus.push_back(s.signals.plus);
        minus.push_back(s.signals.minus);
      }
    }
    const auto p = mean_and_se(plus);
    const auto m = mean_and_se(minus);
    out.push_back({rec.phi, p.mean, p.se, m.mean, m.se, plus.size()});
  }
  return out;
}

FringeFit fit_fringe(std::span<const double> phis, std::span<const double> means,
                     std::span<const double> errors) {
  const std::size_t n = phis.size();
  if (means.size() != n || errors.size() != n) {
    throw InvalidArgument("fit_fringe: mismatched input lengths");
  }
  check_phase_grid(phis);

  const bool weighted = std::all_of(errors.begin(), errors.end(),
                                    [](double e) { return std::isfinite(e) && e > 0.0; });
  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Vector3d row(std::cos(phis[k]), std::sin(phis[k]), 1.0);
    const double w = weighted ? 1.0 / (errors[k] * errors[k]) : 1.0;
    normal += w * row * row.transpose();
    rhs += w * means[k] * row;
  }
  const Eigen::LDLT<Eigen::Matrix3d> ldlt(normal);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-12)) {
    throw FitFailure("fringe fit normal equations are singular");
  }
  const Eigen::Vector3d coef = ldlt.solve(rhs);

  FringeFit fit;
  double rss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double model = coef[0] * std::cos(phis[k]) + coef[1] * std::sin(phis[k]) + coef[2];
    const double r = means[k] - model;
    rss += weighted ? r * r / (errors[k] * errors[k]) : r * r;
  }
  fit.chi2 = rss;
  fit.dof = n - 3;

  Eigen::Matrix3d cov = ldlt.solve(Eigen::Matrix3d::Identity());
  if (!weighted) {
    cov *= fit.dof > 0 ? rss / static_cast<double>(fit.dof) : 0.0;
  }

  fit.amplitude = std::hypot(coef[0], coef[1]);
  fit.offset = coef[2];
  fit.phase0 = std::atan2(-coef[1], coef[0]);
  if (!(fit.offset > 0.0)) {
    throw FitFailure("fringe offset is not positive");
  }
  fit.visibility = fit.amplitude / fit.offset;

  Eigen::Vector3d grad;
  if (fit.amplitude > 0.0) {
    grad << coef[0] / (fit.amplitude * fit.offset), coef[1] / (fit.amplitude * fit.offset),
        -fit.amplitude / (fit.offset * fit.offset);
    fit.visibility_error = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  } else {
    fit.visibility_error = std::sqrt(std::max(0.0, 0.5 * (cov(0, 0) + cov(1, 1)))) / fit.offset;
  }
  return fit;
}

double max_min_visibility(std::span<const double> means) {
  if (means.empty()) {
    throw InvalidArgument("max_min_visibility: no data");
  }
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  const double sum = *hi + *lo;
  return sum > 0.0 ? (*hi - *lo) / sum : 0.0;
}

FringeScanResult scan_fringe(std::span<const PhaseRecord> records, const FilterConfig& fc) {
  FringeScanResult r;
  r.per_phase = phase_means(records, fc);
  for (const auto& rec : records) {
    r.total += rec.shots.size();
  }
  std::vector<double> phis, mp, sp, mm, sm;
  for (const auto& pm : r.per_phase) {
    if (pm.n_shots < 2) {
      throw InsufficientData("fewer than two shots retained at phi = " + std::to_string(pm.phi));
    }
    r.retained += pm.n_shots;
    phis.push_back(pm.phi);
    mp.push_back(pm.mean_plus);
    sp.push_back(pm.se_plus);
    mm.push_back(pm.mean_minus);
    sm.push_back(pm.se_minus);
  }
  r.retained_fraction =
      r.total == 0 ? 0.0 : static_cast<double>(r.retained) / static_cast<double>(r.total);
  r.plus_fit = fit_fringe(phis, mp, sp);
  r.minus_fit = fit_fringe(phis, mm, sm);
  return r;
}

std::vector<CurvePoint> filtered_visibility_curve(std::span<const PhaseRecord> records,
                                                  std::span<const double> q_list) {
  std::vector<CurvePoint> curve;
  curve.reserve(q_list.size());
  for (double q : q_list) {
    if (!(q >= 0.0)) {
      throw InvalidArgument("filter threshold must be >= 0");
    }
    CurvePoint pt;
    pt.q = q;
    const FilterConfig fc{q};
    for (const auto& rec : records) {
      pt.total += rec.shots.size();
      for (const auto& s : rec.shots) {
        pt.retained += passes_filter(s, fc) ? 1 : 0;
      }
    }
    pt.retained_fraction =
        pt.total == 0 ? 0.0 : static_cast<double>(pt.retained) / static_cast<double>(pt.total);
    try {
      pt.scan = scan_fringe(records, fc);
      pt.status = "ok";
    } catch (const InsufficientData&) {
      pt.status = "insufficient-data";
    } catch (const FitFailure&) {
      pt.status = "fit-failure";
    }
    curve.push_back(std::move(pt));
  }
  return curve;
}

double LogCurveFit::operator()(double x) const { return a - b * std::log(x + c); }

LogCurveFit fit_log_curve(std::span<const double> x, std::span<const double> y,
                          std::span<const double> errors) {
  const std::size_t n = x.size();
  if (y.size() != n || errors.size() != n) {
    throw InvalidArgument("fit_log_curve: mismatched input lengths");
  }
  if (n < 4) {
    throw FitFailure("log-curve fit needs at least four points");
  }
  const bool weighted = std::all_of(errors.begin(), errors.end(),
                                    [](double e) { return std::isfinite(e) && e > 0.0; });
  const auto [xlo_it, xhi_it] = std::minmax_element(x.begin(), x.end());
  const double xlo = *xlo_it;
  const double span = std::max(*xhi_it - xlo, 1e-12);

  // For fixed c the model is linear in (a, b).
  struct Linear {
    double a, b, chi2;
  };
  auto solve_linear = [&](double c) -> Linear {
    double sw = 0, su = 0, sy = 0, suu = 0, suy = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = weighted ? 1.0 / (errors[k] * errors[k]) : 1.0;
      const double u = std::log(x[k] + c);
      sw += w;
      su += w * u;
      sy += w * y[k];
      suu += w * u * u;
      suy += w * u * y[k];
    }
    const double det = sw * suu - su * su;
    if (!(std::fabs(det) > 1e-300)) {
      return {0.0, 0.0, std::numeric_limits<double>::infinity()};
    }
    const double beta = (sw * suy - su * sy) / det;
    const double alpha = (sy - beta * su) / sw;
    double chi2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = weighted ? 1.0 / (errors[k] * errors[k]) : 1.0;
      const double r = y[k] - alpha - beta * std::log(x[k] + c);
      chi2 += w * r * r;
    }
    return {alpha, -beta, chi2};
  };
  auto c_of = [&](double t) { return -xlo + std::exp(t); };
  auto objective = [&](double t) { return solve_linear(c_of(t)).chi2; };

  const double t_lo = std::log(1e-8 * span);
  const double t_hi = std::log(1e4 * span);
  constexpr int kGrid = 400;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kGrid; ++k) {
    const double t = t_lo + (t_hi - t_lo) * k / kGrid;
    const double v = objective(t);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  if (!std::isfinite(best_val)) {
    throw FitFailure("log-curve fit is degenerate");
  }
  const double step = (t_hi - t_lo) / kGrid;
  const double lo = t_lo + step * std::max(0, best - 1);
  const double hi = t_lo + step * std::min(kGrid, best + 1);
  std::uintmax_t iters = 200;
  const auto [t_best, chi2_best] =
      boost::math::tools::brent_find_minima(objective, lo, hi, 40, iters);

  const auto lin = solve_linear(c_of(t_best));
  LogCurveFit fit;
  fit.a = lin.a;
  fit.b = lin.b;
  fit.c = c_of(t_best);
  fit.chi2 = chi2_best;
  fit.dof = n - 3;
  // A minimum pinned to the scan boundary means c is not determined by the data.
  fit.converged = iters < 200 && best > 0 && best < kGrid && std::isfinite(chi2_best);
  return fit;
}

ExponentialDecayFit fit_exponential_decay(std::span<const double> q,
                                          std::span<const double> fraction) {
  if (q.size() != fraction.size()) {
    throw InvalidArgument("fit_exponential_decay: mismatched input lengths");
  }
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (fraction[k] > 0.0) {
      xs.push_back(q[k]);
      ys.push_back(std::log(fraction[k]));
    }
  }
  if (xs.size() < 2) {
    throw FitFailure("exponential decay fit needs two positive fractions");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (!(sxx > 0.0)) {
    throw FitFailure("exponential decay fit needs distinct thresholds");
  }
  const double slope = sxy / sxx;
  ExponentialDecayFit fit;
  fit.rate = -slope;
  fit.intercept = my - slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::optional<Guess> realized_state(Branch branch) noexcept {
  switch (branch) {
    case Branch::StimulatedOdd:
      return Guess::Plus;
    case Branch::StimulatedEven:
      return Guess::Minus;
    case Branch::Spontaneous:
      break;
  }
  return std::nullopt;
}

namespace {

template <class Rule>
DiscriminationResult score(std::span<const Shot> shots, Rule rule) {
  DiscriminationResult r;
  r.guesses.reserve(shots.size());
  for (const auto& s : shots) {
    const Guess guess = rule(s);
    r.guesses.push_back(guess);
    if (guess == Guess::Undecided) {
      continue;
    }
    ++r.decided;
    if (const auto truth = realized_state(s.true_branch)) {
      ++r.scored;
      r.correct += (*truth == guess) ? 1 : 0;
    }
  }
  r.success_rate = r.scored == 0 ? 0.0 : static_cast<double>(r.correct) / static_cast<double>(r.scored);
  r.decided_fraction =
      shots.empty() ? 0.0 : static_cast<double>(r.decided) / static_cast<double>(shots.size());
  return r;
}

}  // namespace

DiscriminationResult discriminate(std::span<const Shot> shots) {
  return score(shots, [](const Shot& s) {
    if (s.signals.plus > s.signals.minus) {
      return Guess::Plus;
    }
    if (s.signals.plus < s.signals.minus) {
      return Guess::Minus;
    }
    return Guess::Undecided;
  });
}

DiscriminationResult parity_discriminate(std::span<const Shot> shots) {
  return score(shots, [](const Shot& s) {
    return parity_eigenvalue(s.detected_counts) > 0 ? Guess::Plus : Guess::Minus;
  });
}

FidelityVerdict fidelity_verdict(double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw InvalidArgument("visibility must lie in [0, 1]");
  }
  const double f = 0.5 * (1.0 + visibility);
  return {f, f > kClassicalEstimationFidelity};
}

}  // namespace qiopa
