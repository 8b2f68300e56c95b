#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "qiopa/error.hpp"
#include "qiopa/oracle.hpp"

using namespace qiopa;
using std::numbers::pi;

TEST_CASE("generator matrix elements") {
  const std::size_t d = 5;
  const auto k = build_hamiltonian_generator(d);
  CHECK(k.rows() == 25);
  // K|0,0> = |1,1>, K|1,1> = 2|2,2> - |0,0>
  CHECK(k.coeff(1 * d + 1, 0) == doctest::Approx(1.0));
  CHECK(k.coeff(2 * d + 2, 1 * d + 1) == doctest::Approx(2.0));
  CHECK(k.coeff(0, 1 * d + 1) == doctest::Approx(-1.0));
  // Anti-symmetric, so exp(gK) is orthogonal.
  const Eigen::SparseMatrix<double> sum = k + Eigen::SparseMatrix<double>(k.transpose());
  CHECK(sum.norm() == doctest::Approx(0.0));
}

TEST_CASE("vacuum evolves to the two-mode squeezed vacuum") {
  const double g = 0.7;
  const auto out = evolve(TruncatedState::vacuum(40), g);
  CHECK(out.norm_leak() < 1e-12);
  CHECK(out.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t n = 0; n < 10; ++n) {
    const Complex a = out.amplitude(n, n);
    CHECK(a.real() == doctest::Approx(std::pow(std::tanh(g), n) / std::cosh(g)).epsilon(1e-12));
    CHECK(std::abs(a.imag()) < 1e-14);
    CHECK(std::abs(out.amplitude(n, n + 1)) < 1e-14);
  }
}

TEST_CASE("zero gain is the identity") {
  const auto in = TruncatedState::equatorial_photon(10, 0.9);
  const auto out = evolve(in, 0.0);
  for (std::size_t k = 0; k < in.amplitudes().size(); ++k) {
    CHECK(std::abs(out.amplitudes()[k] - in.amplitudes()[k]) < 1e-15);
  }
}

TEST_CASE("state construction") {
  CHECK_THROWS_AS(TruncatedState(1), InvalidArgument);
  const auto f = TruncatedState::fock(6, 2, 3);
  CHECK(f.amplitude(2, 3) == Complex(1.0, 0.0));
  CHECK(f.norm_squared() == 1.0);
  const auto e = TruncatedState::equatorial_photon(4, pi / 2);
  CHECK(std::abs(e.amplitude(1, 0) - Complex(std::sqrt(0.5), 0.0)) < 1e-15);
  CHECK(std::abs(e.amplitude(0, 1) - Complex(0.0, std::sqrt(0.5))) < 1e-15);
}

TEST_CASE("basis rotation of a single photon") {
  // A photon at phi lands entirely in the phi mode of the phi basis.
  const auto e = TruncatedState::equatorial_photon(6, 1.2);
  const auto r = rotate_to_analysis_basis(e, 1.2);
  CHECK(std::abs(r.at(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(r.at(0, 1)) < 1e-15);
  // and is split evenly in the orthogonal equatorial basis.
  const auto r2 = rotate_to_analysis_basis(e, 1.2 + pi / 2);
  CHECK(std::norm(r2.at(1, 0)) == doctest::Approx(0.5));
  CHECK(std::norm(r2.at(0, 1)) == doctest::Approx(0.5));
}

TEST_CASE("closed-form amplitudes at small gain") {
  for (double g : {0.2, 0.5, 0.8}) {
    const auto c = check_phi_plus(g, 40);
    CHECK(c.max_amplitude_deviation < 1e-9);
    CHECK(c.max_probability_deviation < 1e-12);
    CHECK(c.norm_leak < 1e-12);
  }
  const auto c1 = check_phi_plus(1.0, 60);
  CHECK(c1.max_amplitude_deviation < 1e-6);
}

TEST_CASE("phase covariance and branch mixture") {
  for (double phi : {pi / 4, pi / 2, 2.0}) {
    CHECK(check_phase_covariance(0.8, 40, phi) < 1e-8);
    CHECK(check_branch_mixture(0.8, 40, phi) < 1e-9);
  }
}

TEST_CASE("cutoff too small") {
  try {
    check_phi_plus(1.5, 12);
    FAIL("expected CutoffTooSmall");
  } catch (const CutoffTooSmall& e) {
    CHECK(e.norm_leak() > 1e-8);
  }
}

TEST_CASE("smallest cutoff and vacuum matrix element") {
  const auto k = build_hamiltonian_generator(2);
  CHECK(k.rows() == 4);
  CHECK(k.coeff(3, 0) == 1.0);
  CHECK(k.coeff(0, 3) == -1.0);
  CHECK(k.nonZeros() == 2);
}

TEST_CASE("two-mode squeezed vacuum at g = 0.5 and mean growth") {
  const double g = 0.5;
  const auto out = evolve(TruncatedState::vacuum(40), g);
  for (std::size_t n = 0; n < 15; ++n) {
    CHECK(std::abs(out.amplitude(n, n).real() - std::pow(std::tanh(g), n) / std::cosh(g)) < 1e-8);
  }
  for (double gg : {0.3, 1.0}) {
    const auto s = evolve(TruncatedState::vacuum(40), gg);
    CHECK(s.norm_leak() < 1e-8);
    double nh = 0.0;
    double nv = 0.0;
    for (std::size_t a = 0; a < 40; ++a) {
      for (std::size_t b = 0; b < 40; ++b) {
        const double pr = std::norm(s.amplitude(a, b));
        nh += pr * static_cast<double>(a);
        nv += pr * static_cast<double>(b);
      }
    }
    const double m = std::sinh(gg) * std::sinh(gg);
    CHECK(std::abs(nh - m) < 1e-7);
    CHECK(std::abs(nv - m) < 1e-7);
  }
}

TEST_CASE("equivalence checks at D = 60") {
  const auto c = check_phi_plus(0.8, 60);
  CHECK(c.max_probability_deviation < 1e-6);
  CHECK(check_phase_covariance(0.8, 60, 0.0) < 1e-15);
  CHECK(check_phase_covariance(0.8, 60, pi / 2) < 1e-8);
  CHECK(check_branch_mixture(0.8, 60, pi / 4) < 1e-6);
  CHECK(check_phi_plus(0.0, 10).max_amplitude_deviation < 1e-15);
}
