#include "qiopa/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qiopa/analysis.hpp"
#include "qiopa/cli/csv.hpp"
#include "qiopa/cli/manifest.hpp"
#include "qiopa/error.hpp"
#include "qiopa/opa_model.hpp"
#include "qiopa/oracle.hpp"

namespace qiopa::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Oracle equivalence tolerances.
constexpr double kOracleAmplitudeTol = 1e-6;
constexpr double kOracleCovarianceTol = 1e-8;
constexpr double kOracleMixtureTol = 1e-6;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void prepare_out_dir(const CommandContext& ctx) {
  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + ctx.out_dir.string());
  }
}

void finish(const std::string& command, const RunConfig& cfg, const CommandContext& ctx,
            const std::vector<std::filesystem::path>& outputs, const Stopwatch& clock) {
  RunManifest m{command, cfg, outputs, clock.seconds()};
  write_manifest(ctx.out_dir / (command + ".manifest"), m);
}

std::uint64_t as_u64(std::size_t n) { return static_cast<std::uint64_t>(n); }

}  // namespace

int cmd_fringe(const RunConfig& cfg, const CommandContext& ctx) {
  cfg.validate();
  prepare_out_dir(ctx);
  Stopwatch clock;
  const auto records = run_experiment(cfg.experiment, ctx.threads);
  const auto scan = scan_fringe(records, FilterConfig{cfg.experiment.filter_q});

  const auto fringe_path = ctx.out_dir / "fringe.csv";
  {
    CsvWriter csv(fringe_path,
                  {"phi_rad", "mean_I_plus", "se_plus", "mean_I_minus", "se_minus", "n_shots"});
    for (const auto& pm : scan.per_phase) {
      csv.field(pm.phi)
          .field(pm.mean_plus)
          .field(pm.se_plus)
          .field(pm.mean_minus)
          .field(pm.se_minus)
          .field(as_u64(pm.n_shots));
      csv.end_row();
    }
  }
  const auto fit_path = ctx.out_dir / "fringe_fit.csv";
  {
    CsvWriter csv(fit_path, {"signal", "amplitude", "offset", "phase0", "visibility",
                             "visibility_err", "retained_fraction", "F", "beats_classical"});
    for (const auto& [name, fit] :
         {std::pair{"I_plus", scan.plus_fit}, std::pair{"I_minus", scan.minus_fit}}) {
      const auto verdict = fidelity_verdict(std::clamp(fit.visibility, 0.0, 1.0));
      csv.field(std::string(name))
          .field(fit.amplitude)
          .field(fit.offset)
          .field(fit.phase0)
          .field(fit.visibility)
          .field(fit.visibility_error)
          .field(scan.retained_fraction)
          .field(verdict.fidelity)
          .field(verdict.beats_classical);
      csv.end_row();
    }
  }
  std::cout << fmt::format("fringe: V(I+) = {:.4f} +- {:.4f}, V(I-) = {:.4f} +- {:.4f}\n",
                           scan.plus_fit.visibility, scan.plus_fit.visibility_error,
                           scan.minus_fit.visibility, scan.minus_fit.visibility_error);
  finish("fringe", cfg, ctx, {fringe_path, fit_path}, clock);
  return kExitOk;
}

int cmd_gain_sweep(const RunConfig& cfg, const CommandContext& ctx) {
  cfg.validate();
  prepare_out_dir(ctx);
  Stopwatch clock;
  const auto path = ctx.out_dir / "gain_sweep.csv";
  CsvWriter csv(path, {"g", "m_bar", "clones_pure", "clones_mixture", "V_th", "V_eff", "V_nc",
                       "V_simulated", "V_sim_err"});
  for (double g : cfg.gain_list) {
    const auto gp = make_gain_params(g);
    ExperimentConfig exp = cfg.experiment;
    exp.g = g;
    double v_sim = kNaN;
    double v_err = kNaN;
    try {
      const auto scan = scan_fringe(run_experiment(exp, ctx.threads));
      v_sim = scan.visibility();
      v_err = scan.visibility_error();
    } catch (const FitFailure& e) {
      std::cerr << fmt::format("gain-sweep: g = {}: {}\n", g, e.what());
    } catch (const InsufficientData& e) {
      std::cerr << fmt::format("gain-sweep: g = {}: {}\n", g, e.what());
    }
    csv.field(g)
        .field(gp.m_bar())
        .field(clone_number(gp))
        .field(clone_number(gp, exp.p))
        .field(visibility_ideal(gp))
        .field(visibility_effective(gp, exp.p))
        .field(visibility_no_coherence(gp))
        .field(v_sim)
        .field(v_err);
    csv.end_row();
  }
  finish("gain-sweep", cfg, ctx, {path}, clock);
  return kExitOk;
}

int cmd_distribution(const RunConfig& cfg, const CommandContext& ctx) {
  cfg.validate();
  prepare_out_dir(ctx);
  Stopwatch clock;
  const auto gp = make_gain_params(cfg.distribution_g);
  const auto kind = cfg.distribution_kind;
  const bool joint = kind == DistributionKind::PhiPlus || kind == DistributionKind::PhiMinus;
  const auto dist = joint ? joint_distribution(kind, gp, cfg.experiment.tail_eps,
                                               cfg.experiment.max_index)
                          : marginal_distribution(kind, gp, cfg.experiment.tail_eps,
                                                  cfg.experiment.max_index);
  if (dist.support_size() > cfg.distribution_max_rows) {
    throw NumericalFailure(fmt::format(
        "distribution has {} support points, above distribution.max_rows = {}",
        dist.support_size(), cfg.distribution_max_rows));
  }
  const auto path = ctx.out_dir / "dist.csv";
  {
    if (joint) {
      // cell_ratio: Pi+/Pi- over the 2x2 parity cell holding (n_plus, n_minus).
      CsvWriter csv(path, {"n_plus", "n_minus", "probability", "cell_ratio"});
      dist.for_each([&](const PhotonPair& pair, double lp) {
        const auto i = static_cast<std::size_t>(pair.n_plus / 2);
        const auto j = static_cast<std::size_t>(pair.n_minus / 2);
        csv.field(pair.n_plus)
            .field(pair.n_minus)
            .field(std::exp(lp))
            .field(cell_likelihood_ratio(i, j, gp));
        csv.end_row();
      });
    } else {
      CsvWriter csv(path, {"n", "probability"});
      dist.for_each([&](std::int64_t n, double lp) {
        csv.field(n).field(std::exp(lp));
        csv.end_row();
      });
    }
  }
  std::cout << fmt::format("distribution: {} at g = {}, {} rows, mass {:.12f}, tail bound {:.3e}\n",
                           to_string(kind), cfg.distribution_g, dist.support_size(),
                           dist.total_mass(), dist.tail_mass_bound());
  finish("distribution", cfg, ctx, {path}, clock);
  return kExitOk;
}

int cmd_filter_sweep(const RunConfig& cfg, const CommandContext& ctx) {
  cfg.validate();
  prepare_out_dir(ctx);
  Stopwatch clock;
  const auto records = run_experiment(cfg.experiment, ctx.threads);
  const auto curve = filtered_visibility_curve(records, cfg.q_list);

  std::vector<double> xs, ys, errs, qs, fractions;
  const auto sweep_path = ctx.out_dir / "filter_sweep.csv";
  {
    CsvWriter csv(sweep_path, {"q", "retained_fraction", "visibility", "visibility_err", "F",
                               "beats_classical", "status"});
    for (const auto& pt : curve) {
      csv.field(pt.q).field(pt.retained_fraction);
      qs.push_back(pt.q);
      fractions.push_back(pt.retained_fraction);
      if (pt.scan) {
        const double v = pt.scan->visibility();
        const auto verdict = fidelity_verdict(std::clamp(v, 0.0, 1.0));
        csv.field(v).field(pt.scan->visibility_error()).field(verdict.fidelity).field(
            verdict.beats_classical);
        xs.push_back(pt.retained_fraction);
        ys.push_back(v);
        errs.push_back(pt.scan->visibility_error());
      } else {
        csv.field(kNaN).field(kNaN).field(kNaN).field(false);
      }
      csv.field(pt.status);
      csv.end_row();
    }
  }

  const auto fit_path = ctx.out_dir / "filter_fit.csv";
  int code = kExitOk;
  {
    CsvWriter csv(fit_path, {"a", "b", "c", "chi2", "dof", "reduced_chi2", "converged",
                             "decay_rate", "decay_intercept", "decay_r2", "status"});
    std::optional<LogCurveFit> log_fit;
    std::optional<ExponentialDecayFit> decay;
    std::string status = "ok";
    try {
      log_fit = fit_log_curve(xs, ys, errs);
    } catch (const FitFailure& e) {
      status = "insufficient-data";
      code = kExitInsufficientData;
      std::cerr << "filter-sweep: " << e.what() << '\n';
    }
    try {
      decay = fit_exponential_decay(qs, fractions);
    } catch (const FitFailure& e) {
      std::cerr << "filter-sweep: " << e.what() << '\n';
    }
    if (log_fit) {
      csv.field(log_fit->a).field(log_fit->b).field(log_fit->c).field(log_fit->chi2).field(
          as_u64(log_fit->dof)).field(log_fit->reduced_chi2()).field(log_fit->converged);
    } else {
      csv.field(kNaN).field(kNaN).field(kNaN).field(kNaN).field(std::uint64_t{0}).field(kNaN).field(
          false);
    }
    if (decay) {
      csv.field(decay->rate).field(decay->intercept).field(decay->r_squared);
    } else {
      csv.field(kNaN).field(kNaN).field(kNaN);
    }
    csv.field(status);
    csv.end_row();
  }
  for (const auto& pt : curve) {
    if (pt.scan) {
      std::cout << fmt::format("q = {:>8.2f}  kept {:.4f}  V = {:.4f} +- {:.4f}\n", pt.q,
                               pt.retained_fraction, pt.scan->visibility(),
                               pt.scan->visibility_error());
    } else {
      std::cout << fmt::format("q = {:>8.2f}  kept {:.4f}  {}\n", pt.q, pt.retained_fraction,
                               pt.status);
    }
  }
  finish("filter-sweep", cfg, ctx, {sweep_path, fit_path}, clock);
  return code;
}

int cmd_oracle_check(const RunConfig& cfg, const CommandContext& ctx) {
  cfg.validate();
  prepare_out_dir(ctx);
  Stopwatch clock;
  const std::size_t d = cfg.oracle_cutoff;
  const auto path = ctx.out_dir / "oracle_check.csv";
  bool all_pass = true;
  {
    CsvWriter csv(path, {"g", "cutoff", "norm_leak", "max_amplitude_dev", "max_probability_dev",
                         "phase_cov_dev_pi4", "phase_cov_dev_pi2", "branch_mix_dev_pi4", "pass",
                         "status"});
    for (double g : cfg.oracle_g_list) {
      try {
        const auto phi_plus = check_phi_plus(g, d);
        const double cov4 = check_phase_covariance(g, d, std::numbers::pi / 4);
        const double cov2 = check_phase_covariance(g, d, std::numbers::pi / 2);
        const double mix = check_branch_mixture(g, d, std::numbers::pi / 4);
        const bool pass = phi_plus.max_amplitude_deviation < kOracleAmplitudeTol &&
                          cov4 < kOracleCovarianceTol && cov2 < kOracleCovarianceTol &&
                          mix < kOracleMixtureTol;
        all_pass = all_pass && pass;
        csv.field(g)
            .field(as_u64(d))
            .field(phi_plus.norm_leak)
            .field(phi_plus.max_amplitude_deviation)
            .field(phi_plus.max_probability_deviation)
            .field(cov4)
            .field(cov2)
            .field(mix)
            .field(pass)
            .field(std::string(pass ? "ok" : "tolerance-exceeded"));
        csv.end_row();
        std::cout << fmt::format(
            "g = {:<6} D = {}  leak {:.2e}  amp {:.2e}  cov(pi/4) {:.2e}  cov(pi/2) {:.2e}  "
            "mix {:.2e}  {}\n",
            g, d, phi_plus.norm_leak, phi_plus.max_amplitude_deviation, cov4, cov2, mix,
            pass ? "PASS" : "FAIL");
      } catch (const CutoffTooSmall& e) {
        all_pass = false;
        csv.field(g).field(as_u64(d)).field(e.norm_leak());
        for (int k = 0; k < 5; ++k) {
          csv.field(kNaN);
        }
        csv.field(false).field(std::string("cutoff-too-small"));
        csv.end_row();
        std::cout << fmt::format("g = {:<6} D = {}  cutoff-too-small: {}\n", g, d, e.what());
      }
    }
  }
  finish("oracle-check", cfg, ctx, {path}, clock);
  return all_pass ? kExitOk : kExitNumerical;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Simulator for high-gain amplification of an injected polarization qubit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  app.add_option("--config", config_path, "flat key = value configuration file");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "override run.seed");
  app.add_option("--threads", threads, "worker threads for shot generation")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();

  auto* fringe = app.add_subcommand("fringe", "mean signals versus input phase");
  auto* gain = app.add_subcommand("gain-sweep", "clone number and visibility versus gain");
  auto* dist = app.add_subcommand("distribution", "joint photon-number distribution");
  auto* filter = app.add_subcommand("filter-sweep", "visibility versus retained data");
  auto* oracle = app.add_subcommand("oracle-check", "truncated Fock-space equivalence checks");

  std::string g_list, q_list, kind, oracle_g_list;
  std::optional<double> dist_g;
  std::optional<std::size_t> cutoff;
  gain->add_option("--g-list", g_list, "comma-separated gains");
  filter->add_option("--q-list", q_list, "comma-separated thresholds on |I+ - I-|");
  dist->add_option("--g", dist_g, "gain");
  dist->add_option("--kind", kind, "phi-plus | phi-minus | squeezed-vacuum | squeezed-single-photon");
  oracle->add_option("--g-list", oracle_g_list, "comma-separated gains");
  oracle->add_option("--cutoff", cutoff, "Fock cutoff per mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) {
      cfg.experiment.seed = *seed;
    }
    if (!g_list.empty()) {
      cfg.gain_list = parse_real_list(g_list, "--g-list");
    }
    if (!q_list.empty()) {
      cfg.q_list = parse_real_list(q_list, "--q-list");
    }
    if (dist_g) {
      cfg.distribution_g = *dist_g;
    }
    if (!kind.empty()) {
      cfg.distribution_kind = parse_distribution_kind(kind);
    }
    if (!oracle_g_list.empty()) {
      cfg.oracle_g_list = parse_real_list(oracle_g_list, "--g-list");
    }
    if (cutoff) {
      cfg.oracle_cutoff = *cutoff;
    }
    cfg.validate();

    const CommandContext ctx{out_dir, threads};
    if (*fringe) {
      return cmd_fringe(cfg, ctx);
    }
    if (*gain) {
      return cmd_gain_sweep(cfg, ctx);
    }
    if (*dist) {
      return cmd_distribution(cfg, ctx);
    }
    if (*filter) {
      return cmd_filter_sweep(cfg, ctx);
    }
    return cmd_oracle_check(cfg, ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TruncationFailure& e) {
    std::cerr << "truncation failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const CutoffTooSmall& e) {
    std::cerr << "cutoff-too-small: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InsufficientData& e) {
    std::cerr << "insufficient data: " << e.what() << '\n';
    return kExitInsufficientData;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage = args;
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (auto& s : storage) {
    argv.push_back(s.data());
  }
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qiopa::cli
