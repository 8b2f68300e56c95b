#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qiopa/detection.hpp"
#include "qiopa/error.hpp"

using namespace qiopa;
using std::numbers::pi;

TEST_CASE("presets") {
  const auto ref = reference_preset();
  CHECK(ref.g == 4.34);
  CHECK(ref.p == 0.40);
  CHECK(ref.v_in == 0.784);
  CHECK(ref.detection.eta == 0.016);
  CHECK(ref.shots_per_point == 2500);
  REQUIRE(ref.phi_grid.size() == 12);
  CHECK(ref.phi_grid.front() == 0.0);
  CHECK(ref.phi_grid[3] == doctest::Approx(pi / 2));
  CHECK(ref.phi_grid.back() < 2.0 * pi);
  CHECK_NOTHROW(ref.validate());

  const auto stress = stress_preset();
  CHECK(stress.g == 5.7);
  CHECK(stress.max_index > ref.max_index);
  CHECK_NOTHROW(stress.validate());
}

TEST_CASE("configuration validation") {
  auto bad = [](auto mutate) {
    ExperimentConfig c = reference_preset();
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](auto& c) { c.p = 1.5; }).validate(), InvalidArgument);
  CHECK_THROWS_AS(bad([](auto& c) { c.v_in = -0.1; }).validate(), InvalidArgument);
  CHECK_THROWS_AS(bad([](auto& c) { c.g = -1; }).validate(), InvalidArgument);
  CHECK_THROWS_AS(bad([](auto& c) { c.detection.eta = 1.01; }).validate(), InvalidArgument);
  CHECK_THROWS_AS(bad([](auto& c) { c.detection.analog_gain = 0; }).validate(), InvalidArgument);
  CHECK_THROWS_AS(bad([](auto& c) { c.detection.noise_sigma = -1; }).validate(), InvalidArgument);
  CHECK_THROWS_AS(bad([](auto& c) { c.phi_grid.clear(); }).validate(), InvalidArgument);
  CHECK_THROWS_AS(bad([](auto& c) { c.shots_per_point = 0; }).validate(), InvalidArgument);
  CHECK_THROWS_AS(bad([](auto& c) { c.tail_eps = 0; }).validate(), InvalidArgument);
  CHECK_THROWS_AS(bad([](auto& c) { c.filter_q = -2; }).validate(), InvalidArgument);
}

TEST_CASE("overall efficiency is the product of stages") {
  const std::vector<double> stages{0.5, 0.2, 0.16};
  CHECK(overall_efficiency(stages) == doctest::Approx(0.016));
  CHECK(overall_efficiency({}) == 1.0);
  const std::vector<double> bad{0.5, 1.2};
  CHECK_THROWS_AS(overall_efficiency(bad), InvalidArgument);
}

TEST_CASE("sampler means") {
  const auto gp = make_gain_params(1.5);
  const CountSampler s(gp);
  CHECK(s.vacuum_mean() == doctest::Approx(gp.m_bar()).epsilon(1e-7));
  CHECK(s.single_photon_mean() == doctest::Approx(3.0 * gp.m_bar() + 1.0).epsilon(1e-7));
  CounterStream rng(5, 0, 0);
  double vac = 0.0;
  double one = 0.0;
  bool parity_ok = true;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const auto a = s.draw_vacuum(rng);
    const auto b = s.draw_single_photon(rng);
    parity_ok = parity_ok && a % 2 == 0 && b % 2 == 1;
    vac += static_cast<double>(a);
    one += static_cast<double>(b);
  }
  CHECK(parity_ok);
  // Standard deviations: sqrt(2m(m+1)) and sqrt(6m(m+1)) per draw.
  const double m = gp.m_bar();
  CHECK(std::abs(vac / n - m) < 4.0 * std::sqrt(2.0 * m * (m + 1.0) / n));
  CHECK(std::abs(one / n - (3.0 * m + 1.0)) < 4.0 * std::sqrt(6.0 * m * (m + 1.0) / n));
}

TEST_CASE("zero gain leaves the injected photon alone") {
  const CountSampler s(make_gain_params(0.0));
  CounterStream rng(1, 0, 0);
  for (int k = 0; k < 100; ++k) {
    const auto d = sample_true_counts(0.0, 0.0, 1.0, 1.0, s, rng);
    CHECK(d.branch == Branch::StimulatedOdd);
    CHECK(d.counts == PhotonPair{1, 0});
  }
}

TEST_CASE("branch selection") {
  const CountSampler s(make_gain_params(1.0));
  CounterStream rng(2, 0, 0);
  int odd = 0;
  int spont = 0;
  const int n = 40000;
  for (int k = 0; k < n; ++k) {
    const auto d = sample_true_counts(pi / 2, 0.0, 0.4, 1.0, s, rng);
    odd += d.branch == Branch::StimulatedOdd ? 1 : 0;
    if (d.branch == Branch::Spontaneous) {
      ++spont;
      CHECK(d.counts.n_plus % 2 == 0);
      CHECK(d.counts.n_minus % 2 == 0);
    }
  }
  CHECK(std::abs(spont / double(n) - 0.6) < 4.0 * std::sqrt(0.24 / n));
  CHECK(std::abs(odd / double(n) - 0.2) < 4.0 * std::sqrt(0.16 / n));

  // Fully mixed input: both branches equally likely even at phi = phi_a.
  int odd_mixed = 0;
  for (int k = 0; k < n; ++k) {
    odd_mixed += sample_true_counts(0.0, 0.0, 1.0, 0.0, s, rng).branch == Branch::StimulatedOdd;
  }
  CHECK(std::abs(odd_mixed / double(n) - 0.5) < 4.0 * std::sqrt(0.25 / n));
}

TEST_CASE("binomial loss") {
  CounterStream rng(3, 0, 0);
  const PhotonPair counts{1000, 250};
  CHECK(apply_loss(counts, 1.0, rng) == counts);
  CHECK(apply_loss(counts, 0.0, rng) == PhotonPair{0, 0});
  double sum = 0.0;
  double sum2 = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const auto d = apply_loss(counts, 0.1, rng);
    CHECK(d.n_minus <= 250);
    const double x = static_cast<double>(d.n_plus);
    sum += x;
    sum2 += x * x;
  }
  CHECK(sum / n == doctest::Approx(100.0).epsilon(0.01));
  CHECK(sum2 / n - (sum / n) * (sum / n) == doctest::Approx(90.0).epsilon(0.05));
}

TEST_CASE("signal formation") {
  CounterStream rng(4, 0, 0);
  const auto clean = form_signals(PhotonPair{7, 3}, DetectionConfig{1.0, 2.5, 0.0}, rng);
  CHECK(clean.plus == 17.5);
  CHECK(clean.minus == 7.5);
  bool non_negative = true;
  for (int k = 0; k < 1000; ++k) {
    const auto s = form_signals(PhotonPair{0, 0}, DetectionConfig{1.0, 1.0, 3.0}, rng);
    non_negative = non_negative && s.plus >= 0.0 && s.minus >= 0.0;
  }
  CHECK(non_negative);
}

TEST_CASE("runs do not depend on thread count") {
  ExperimentConfig cfg = reference_preset();
  cfg.g = 2.0;
  cfg.shots_per_point = 700;
  cfg.detection.noise_sigma = 0.5;
  const auto one = run_experiment(cfg, 1);
  const auto many = run_experiment(cfg, 5);
  REQUIRE(one.size() == many.size());
  bool same = true;
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].phi == cfg.phi_grid[i]);
    REQUIRE(one[i].shots.size() == 700);
    for (std::size_t k = 0; k < one[i].shots.size(); ++k) {
      const auto& a = one[i].shots[k];
      const auto& b = many[i].shots[k];
      same = same && a.true_branch == b.true_branch && a.true_counts == b.true_counts &&
             a.detected_counts == b.detected_counts && a.signals.plus == b.signals.plus &&
             a.signals.minus == b.signals.minus;
    }
  }
  CHECK(same);

  cfg.seed = 2;
  const auto other = run_experiment(cfg, 1);
  bool all_equal = true;
  for (std::size_t k = 0; k < 10; ++k) {
    all_equal = all_equal && other[0].shots[k].true_counts == one[0].shots[k].true_counts;
  }
  CHECK_FALSE(all_equal);
}

TEST_CASE("stress preset samples at g = 5.7") {
  ExperimentConfig cfg = stress_preset();
  cfg.shots_per_point = 50;
  cfg.phi_grid = {0.0};
  const auto rec = run_experiment(cfg);
  CHECK(rec.front().shots.size() == 50);
}

TEST_CASE("series limit too small for the gain") {
  ExperimentConfig cfg = reference_preset();
  cfg.max_index = 5000;
  CHECK_THROWS_AS(run_experiment(cfg), TruncationFailure);
}

TEST_CASE("pure injection at phi = 0 is always the odd branch") {
  const CountSampler s(make_gain_params(1.5));
  CounterStream rng(11, 0, 0);
  bool ok = true;
  for (int k = 0; k < 5000; ++k) {
    const auto d = sample_true_counts(0.0, 0.0, 1.0, 1.0, s, rng);
    ok = ok && d.branch == Branch::StimulatedOdd && d.counts.n_plus % 2 == 1 &&
         d.counts.n_minus % 2 == 0;
  }
  CHECK(ok);
}

TEST_CASE("spontaneous-only and equatorial means") {
  const auto gp = make_gain_params(1.0);
  const CountSampler s(gp);
  const double m = gp.m_bar();
  const int n = 100000;
  CounterStream rng(12, 0, 0);
  double a = 0.0, b = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto d = sample_true_counts(1.3, 0.0, 0.0, 1.0, s, rng);
    a += static_cast<double>(d.counts.n_plus);
    b += static_cast<double>(d.counts.n_minus);
  }
  const double se_vac = std::sqrt(2.0 * m * (m + 1.0) / n);
  CHECK(std::abs(a / n - m) < 3.0 * se_vac);
  CHECK(std::abs(b / n - m) < 3.0 * se_vac);

  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x =
        static_cast<double>(sample_true_counts(pi / 2, 0.0, 1.0, 1.0, s, rng).counts.n_plus);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - (m + (2.0 * m + 1.0) / 2.0)) < 3.0 * se);
}

TEST_CASE("detected means scale with efficiency at g = 4.34") {
  const CountSampler s(make_gain_params(4.34));
  CounterStream rng(13, 0, 0);
  const int n = 40000;
  double t = 0.0, d = 0.0, t2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto c = sample_true_counts(0.0, 0.0, 0.4, 0.784, s, rng).counts;
    const auto det = apply_loss(c, 0.016, rng);
    t += static_cast<double>(c.n_plus);
    t2 += static_cast<double>(c.n_plus) * static_cast<double>(c.n_plus);
    d += static_cast<double>(det.n_plus);
  }
  // The thinning residual d - 0.016 t has variance 0.016*0.984*sum(n).
  const double resid_se = std::sqrt(0.016 * 0.984 * t) / n;
  CHECK(std::abs(d / n - 0.016 * t / n) < 4.0 * resid_se);
  CHECK(t2 > 0.0);
}

TEST_CASE("more signal formation cases") {
  CounterStream rng(14, 0, 0);
  const auto s = form_signals(PhotonPair{3, 0}, DetectionConfig{1.0, 2.0, 0.0}, rng);
  CHECK(s.plus == 6.0);
  CHECK(s.minus == 0.0);
  const auto s2 = form_signals(PhotonPair{5, 2}, DetectionConfig{1.0, 1.0, 0.0}, rng);
  CHECK(s2.plus == 5.0);
  CHECK(s2.minus == 2.0);
  double sum = 0.0;
  const int n = 40000;
  for (int k = 0; k < n; ++k) {
    sum += form_signals(PhotonPair{5, 2}, DetectionConfig{1.0, 1.0, 0.5}, rng).plus;
  }
  CHECK(std::abs(sum / n - 5.0) < 3.0 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("shot counts and parity scrambling") {
  ExperimentConfig cfg = reference_preset();
  const auto rec = run_experiment(cfg);
  std::size_t total = 0;
  for (const auto& r : rec) {
    total += r.shots.size();
  }
  CHECK(total == 30000);

  cfg.p = 1.0;
  cfg.v_in = 1.0;
  cfg.phi_grid = {0.0};
  cfg.detection.eta = 0.9;
  cfg.g = 1.0;
  std::size_t even_detected = 0;
  const auto lossy = run_experiment(cfg);
  for (const auto& shot : lossy.front().shots) {
    even_detected += shot.detected_counts.n_plus % 2 == 0 ? 1 : 0;
  }
  CHECK(even_detected > 0);
}

TEST_CASE("detected statistics are covariant under a common phase shift") {
  ExperimentConfig a = reference_preset();
  a.g = 1.5;
  a.shots_per_point = 20000;
  a.phi_grid = {0.4};
  ExperimentConfig b = a;
  b.phi_grid = {0.4 + 1.1};
  b.phi_a = 1.1;
  b.seed = 7;
  const auto ra = run_experiment(a).front().shots;
  const auto rb = run_experiment(b).front().shots;
  auto moments = [](const std::vector<Shot>& shots) {
    double s = 0.0, s2 = 0.0;
    for (const auto& x : shots) {
      s += x.signals.plus;
      s2 += x.signals.plus * x.signals.plus;
    }
    const double n = static_cast<double>(shots.size());
    return std::pair{s / n, std::sqrt((s2 / n - (s / n) * (s / n)) / n)};
  };
  const auto [ma, sa] = moments(ra);
  const auto [mb, sb] = moments(rb);
  CHECK(std::abs(ma - mb) < 3.0 * std::hypot(sa, sb));
}
