#include "qiopa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "qiopa/error.hpp"
#include "qiopa/fock.hpp"
#include "qiopa/opa_model.hpp"

namespace qiopa {

namespace {

constexpr Complex kI{0.0, 1.0};

// i^k
Complex i_power(std::size_t k) {
  switch (k % 4) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, 1.0};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, -1.0};
  }
}

double closed_form_probability(std::size_t m, std::size_t n, const GainParams& gp, bool plus) {
  // Phi+ lives on (odd, even); Phi- is its mirror.
  const std::size_t odd = plus ? m : n;
  const std::size_t even = plus ? n : m;
  if (odd % 2 == 0 || even % 2 != 0) {
    return 0.0;
  }
  const auto amp = log_amplitude_phi_plus((odd - 1) / 2, even / 2, gp);
  return std::exp(2.0 * amp.log_magnitude);
}

}  // namespace

TruncatedState::TruncatedState(std::size_t cutoff) : cutoff_(cutoff), amps_(cutoff * cutoff) {
  if (cutoff < 2) {
    throw InvalidArgument("oracle cutoff must be >= 2");
  }
}

TruncatedState TruncatedState::vacuum(std::size_t cutoff) { return fock(cutoff, 0, 0); }

TruncatedState TruncatedState::fock(std::size_t cutoff, std::size_t n_h, std::size_t n_v) {
  TruncatedState s(cutoff);
  s.set_amplitude(n_h, n_v, 1.0);
  return s;
}

TruncatedState TruncatedState::equatorial_photon(std::size_t cutoff, double phi) {
  TruncatedState s(cutoff);
  const double r = std::sqrt(0.5);
  s.set_amplitude(1, 0, r);
  s.set_amplitude(0, 1, r * std::exp(kI * phi));
  return s;
}

Complex TruncatedState::amplitude(std::size_t n_h, std::size_t n_v) const {
  if (n_h >= cutoff_ || n_v >= cutoff_) {
    throw InvalidArgument("Fock index beyond cutoff");
  }
  return amps_[n_h * cutoff_ + n_v];
}

void TruncatedState::set_amplitude(std::size_t n_h, std::size_t n_v, Complex value) {
  if (n_h >= cutoff_ || n_v >= cutoff_) {
    throw InvalidArgument("Fock index beyond cutoff");
  }
  amps_[n_h * cutoff_ + n_v] = value;
}

double TruncatedState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) {
    s += std::norm(a);
  }
  return s;
}

Eigen::SparseMatrix<double> build_hamiltonian_generator(std::size_t cutoff) {
  if (cutoff < 2) {
    throw InvalidArgument("oracle cutoff must be >= 2");
  }
  const auto dim = static_cast<Eigen::Index>(cutoff * cutoff);
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t h = 0; h + 1 < cutoff; ++h) {
    for (std::size_t v = 0; v + 1 < cutoff; ++v) {
      const auto from = static_cast<Eigen::Index>(h * cutoff + v);
      const auto to = static_cast<Eigen::Index>((h + 1) * cutoff + (v + 1));
      const double c = std::sqrt(static_cast<double>((h + 1) * (v + 1)));
      entries.emplace_back(to, from, c);   // a_H^dag a_V^dag
      entries.emplace_back(from, to, -c);  // -a_H a_V
    }
  }
  Eigen::SparseMatrix<double> k(dim, dim);
  k.setFromTriplets(entries.begin(), entries.end());
  return k;
}

TruncatedState evolve(const TruncatedState& state, double g, double leak_tolerance,
                      std::size_t extension) {
  if (!std::isfinite(g)) {
    throw InvalidArgument("gain must be finite");
  }
  if (extension < 1) {
    throw InvalidArgument("extension factor must be >= 1");
  }
  const std::size_t d = state.cutoff();
  const std::size_t e = d * extension;

  std::vector<Complex> amps(e * e);
  for (std::size_t h = 0; h < d; ++h) {
    for (std::size_t v = 0; v < d; ++v) {
      amps[h * e + v] = state.amplitude(h, v);
    }
  }

  // K conserves n_H - n_V. In each sector it is a tridiagonal real
  // antisymmetric matrix with off-diagonals b_k; conjugating by diag(i^k)
  // turns it into -i T with T real symmetric, so exp(gK) = S exp(-igT) S^-1.
  const auto ie = static_cast<long>(e);
  for (long diff = -(ie - 1); diff <= ie - 1; ++diff) {
    const std::size_t h0 = diff > 0 ? static_cast<std::size_t>(diff) : 0;
    const std::size_t v0 = diff < 0 ? static_cast<std::size_t>(-diff) : 0;
    const std::size_t len = e - std::max(h0, v0);

    Eigen::VectorXcd w(static_cast<Eigen::Index>(len));
    bool any = false;
    for (std::size_t k = 0; k < len; ++k) {
      const Complex a = amps[(h0 + k) * e + (v0 + k)];
      any = any || a != Complex{};
      w[static_cast<Eigen::Index>(k)] = a * std::conj(i_power(k));
    }
    if (!any || len == 1) {
      continue;
    }
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(len));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(len - 1));
    for (std::size_t k = 0; k + 1 < len; ++k) {
      sub[static_cast<Eigen::Index>(k)] =
          std::sqrt(static_cast<double>((h0 + k + 1) * (v0 + k + 1)));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) {
      throw NumericalFailure("sector eigendecomposition failed");
    }
    const Eigen::MatrixXcd q = es.eigenvectors().cast<Complex>();
    Eigen::VectorXcd y = q.adjoint() * w;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      y[k] *= std::exp(-kI * (g * es.eigenvalues()[k]));
    }
    w = q * y;
    for (std::size_t k = 0; k < len; ++k) {
      amps[(h0 + k) * e + (v0 + k)] = w[static_cast<Eigen::Index>(k)] * i_power(k);
    }
  }

  TruncatedState out(d);
  double kept = 0.0;
  double total = 0.0;
  for (std::size_t h = 0; h < e; ++h) {
    for (std::size_t v = 0; v < e; ++v) {
      const double p = std::norm(amps[h * e + v]);
      total += p;
      if (h < d && v < d) {
        out.amps_[h * d + v] = amps[h * e + v];
        kept += p;
      }
    }
  }
  out.norm_leak_ = std::max(0.0, total - kept);
  if (out.norm_leak_ > leak_tolerance) {
    throw CutoffTooSmall("truncated evolution leaked " + std::to_string(out.norm_leak_) +
                             " beyond cutoff " + std::to_string(d) + " at g = " +
                             std::to_string(g),
                         out.norm_leak_);
  }
  return out;
}

AnalysisAmplitudes rotate_to_analysis_basis(const TruncatedState& state, double phi_a) {
  const std::size_t d = state.cutoff();
  const double r = std::sqrt(0.5);
  // a_H^dag = (a^dag - e^{i phi} b^dag)/sqrt2, a_V^dag = (e^{-i phi} a^dag + b^dag)/sqrt2
  const Complex h_a = r;
  const Complex h_b = -r * std::exp(kI * phi_a);
  const Complex v_a = r * std::exp(-kI * phi_a);
  const Complex v_b = r;

  AnalysisAmplitudes out{d, std::vector<Complex>(d * d)};

  // images[n_h] = expansion of |n_h, N - n_h> over |k, N - k>, k = 0..N.
  std::vector<std::vector<Complex>> images{{Complex{1.0, 0.0}}};
  auto raise = [](const std::vector<Complex>& u, Complex ca, Complex cb) {
    const std::size_t n = u.size();  // new sector has n + 1 entries
    std::vector<Complex> res(n + 1);
    for (std::size_t k = 0; k < n; ++k) {
      res[k + 1] += ca * std::sqrt(static_cast<double>(k + 1)) * u[k];
      res[k] += cb * std::sqrt(static_cast<double>(n - k)) * u[k];
    }
    return res;
  };

  const std::size_t max_total = 2 * (d - 1);
  for (std::size_t total = 0; total <= max_total; ++total) {
    if (total > 0) {
      std::vector<std::vector<Complex>> next(total + 1);
      for (std::size_t h = 1; h <= total; ++h) {
        next[h] = raise(images[h - 1], h_a, h_b);
        const double s = 1.0 / std::sqrt(static_cast<double>(h));
        for (auto& c : next[h]) {
          c *= s;
        }
      }
      next[0] = raise(images[0], v_a, v_b);
      const double s = 1.0 / std::sqrt(static_cast<double>(total));
      for (auto& c : next[0]) {
        c *= s;
      }
      images = std::move(next);
    }
    for (std::size_t h = 0; h <= total; ++h) {
      const std::size_t v = total - h;
      if (h >= d || v >= d) {
        continue;
      }
      const Complex c = state.amplitude(h, v);
      if (c == Complex{}) {
        continue;
      }
      for (std::size_t k = 0; k <= total; ++k) {
        const std::size_t n = total - k;
        if (k < d && n < d) {
          out.amps[k * d + n] += c * images[h][k];
        }
      }
    }
  }
  return out;
}

std::vector<double> number_distribution(const AnalysisAmplitudes& amps) {
  std::vector<double> p(amps.amps.size());
  std::transform(amps.amps.begin(), amps.amps.end(), p.begin(),
                 [](const Complex& c) { return std::norm(c); });
  return p;
}

PhiPlusCheck check_phi_plus(double g, std::size_t cutoff) {
  const auto gp = make_gain_params(g);
  const auto evolved = evolve(TruncatedState::equatorial_photon(cutoff, 0.0), g);
  const auto rotated = rotate_to_analysis_basis(evolved, 0.0);

  PhiPlusCheck check{0.0, 0.0, evolved.norm_leak()};
  for (std::size_t m = 0; m < cutoff; ++m) {
    for (std::size_t n = 0; n < cutoff; ++n) {
      const Complex got = rotated.at(m, n);
      Complex expected{};
      Complex convention{1.0, 0.0};
      if (m % 2 == 1 && n % 2 == 0) {
        const std::size_t i = (m - 1) / 2;
        const std::size_t j = n / 2;
        const auto amp = log_amplitude_phi_plus(i, j, gp);
        expected = static_cast<double>(amp.sign) * std::exp(amp.log_magnitude);
        convention = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      }
      check.max_amplitude_deviation =
          std::max(check.max_amplitude_deviation, std::abs(got * convention - expected));
      check.max_probability_deviation =
          std::max(check.max_probability_deviation, std::fabs(std::norm(got) - std::norm(expected)));
    }
  }
  return check;
}

double check_phase_covariance(double g, std::size_t cutoff, double phi) {
  const auto ref = number_distribution(
      rotate_to_analysis_basis(evolve(TruncatedState::equatorial_photon(cutoff, 0.0), g), 0.0));
  const auto rot = number_distribution(
      rotate_to_analysis_basis(evolve(TruncatedState::equatorial_photon(cutoff, phi), g), phi));
  double dev = 0.0;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    dev = std::max(dev, std::fabs(ref[k] - rot[k]));
  }
  return dev;
}

double check_branch_mixture(double g, std::size_t cutoff, double phi) {
  const auto gp = make_gain_params(g);
  const auto dist = number_distribution(
      rotate_to_analysis_basis(evolve(TruncatedState::equatorial_photon(cutoff, phi), g), 0.0));
  const auto w = branch_weights(phi, 0.0);
  double dev = 0.0;
  for (std::size_t m = 0; m < cutoff; ++m) {
    for (std::size_t n = 0; n < cutoff; ++n) {
      const double mix = w.w_odd * closed_form_probability(m, n, gp, true) +
                         w.w_even * closed_form_probability(m, n, gp, false);
      dev = std::max(dev, std::fabs(dist[m * cutoff + n] - mix));
    }
  }
  return dev;
}

}  // namespace qiopa
