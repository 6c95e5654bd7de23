// toa: parameter sweeps, arrival-time densities, bound verification and
// measurement-protocol simulation for a free-falling Gaussian wave packet.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "toa/errors.hpp"
#include "toa/moments.hpp"
#include "toa/protocol_sim.hpp"
#include "toa/sweep.hpp"
#include "toa/table.hpp"

namespace {

struct Options {
  toa::PhysicalParams params;
  std::optional<double> sigma;
  std::optional<double> sigma_min;
  std::optional<double> sigma_max;
  std::size_t sigma_steps = 201;
  double t_eval = 0.0;
  double tol = toa::kDefaultTol;
  std::uint64_t seed = 1;
  std::uint64_t trials = 100000;
  std::size_t bins = 50;
  std::optional<double> bin_min;
  std::optional<double> bin_width;
  std::string protocol = "B";
  std::string sampler = "rejection";
  double min_p = 1e-4;
  std::optional<double> t_min;
  std::optional<double> t_max;
  std::size_t t_steps = 2001;
  toa::VerifyGrid grid;
  std::string out = "-";
  std::string format = "csv";
  unsigned threads = 0;
};

int code(toa::ExitCode c) { return static_cast<int>(c); }

void emit(const Options& o, const toa::Table& table) {
  auto write = [&](std::ostream& os) {
    if (o.format == "json") {
      toa::write_json(os, table);
    } else {
      toa::write_csv(os, table);
    }
  };
  if (o.out == "-") {
    write(std::cout);
    return;
  }
  std::ofstream file(o.out);
  if (!file) throw toa::ValidationError("cannot open output file '" + o.out + "'");
  write(file);
}

toa::PhysicalParams single_point(const Options& o) {
  toa::PhysicalParams p = o.params;
  p.sigma = o.sigma.value_or(1e-6);
  p.validate();
  return p;
}

int cmd_scan(const Options& o) {
  toa::SweepSpec spec;
  spec.base = o.params;
  if (o.sigma) {
    spec.sigma_min = spec.sigma_max = *o.sigma;
    spec.sigma_steps = 1;
  } else {
    // Default range: 1e-2 <= sigma / x <= 1e1.
    spec.sigma_min = o.sigma_min.value_or(1e-2 * o.params.x);
    spec.sigma_max = o.sigma_max.value_or(1e1 * o.params.x);
    spec.sigma_steps = o.sigma_steps;
  }
  spec.t_eval = o.t_eval;
  spec.tol = o.tol;
  const auto rows = toa::run_scan(spec, o.threads);
  emit(o, toa::scan_table(spec, rows));

  std::size_t failures = 0;
  std::size_t violations = 0;
  for (const auto& r : rows) {
    if (!r.ok()) {
      ++failures;
      std::cerr << "sigma=" << toa::format_double(r.sigma) << ": " << r.error << '\n';
    } else if (r.ratio < 1.0 - toa::kBoundSlack) {
      ++violations;
    }
  }
  if (failures) return code(toa::ExitCode::QuadratureFailure);
  if (violations) {
    std::cerr << violations << " row(s) violate the hbar/(2mg) bound\n";
    return code(toa::ExitCode::BoundViolation);
  }
  return 0;
}

int cmd_pdf(const Options& o) {
  toa::PdfGridSpec spec;
  spec.t_min = o.t_min;
  spec.t_max = o.t_max;
  spec.steps = o.t_steps;
  emit(o, toa::pdf_table(single_point(o), spec));
  return 0;
}

int cmd_verify(const Options& o) {
  toa::VerifyGrid grid = o.grid;
  grid.m = o.params.m;
  grid.g = o.params.g;
  grid.hbar = o.params.hbar;
  grid.t_eval = o.t_eval;
  grid.tol = o.tol;
  const auto summary = toa::run_verify(grid, o.threads);
  emit(o, toa::verify_table(grid, summary));

  std::cerr << "points:                      " << summary.cells.size() << '\n'
            << "min DeltaT DeltaX / (hbar/2mg): " << toa::format_double(summary.min_bound_ratio) << '\n'
            << "min DeltaE DeltaT / (hbar/2):   " << toa::format_double(summary.min_energy_ratio) << '\n'
            << "min (E[T] - t_c) / t_c:         " << toa::format_double(summary.min_delay_over_tc) << '\n'
            << "max |q t_c sigma / (hbar/2mg) - 1|: " << toa::format_double(summary.max_conjecture_rel_err)
            << '\n'
            << "quadrature failures: " << summary.n_failures << ", violations: " << summary.n_violations << '\n';
  return code(summary.exit_code());
}

int cmd_simulate(const Options& o) {
  const auto params = single_point(o);
  const toa::ToaDistribution dist(params);

  toa::SimConfig cfg;
  cfg.n_trials = o.trials;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.protocol = o.protocol == "A" ? toa::Protocol::A : toa::Protocol::B;
  cfg.method = o.sampler == "inverse-cdf" ? toa::SamplingMethod::InverseCdf : toa::SamplingMethod::Rejection;
  cfg.bins = cfg.protocol == toa::Protocol::A ? toa::default_bins_protocol_a(dist, o.t_eval, o.bins)
                                              : toa::default_bins_protocol_b(dist, o.bins);
  if (o.bin_min) cfg.bins.min = *o.bin_min;
  if (o.bin_width) cfg.bins.width = *o.bin_width;

  const auto res = cfg.protocol == toa::Protocol::A ? toa::run_protocol_a(dist, o.t_eval, cfg)
                                                    : toa::run_protocol_b(dist, cfg);

  toa::Table t;
  t.metadata = toa::params_metadata(params);
  t.metadata.emplace_back("command", "simulate");
  t.metadata.emplace_back("sigma", toa::format_double(params.sigma));
  t.metadata.emplace_back("protocol", o.protocol);
  if (cfg.protocol == toa::Protocol::A) t.metadata.emplace_back("t_eval", toa::format_double(o.t_eval));
  t.metadata.emplace_back("seed", std::to_string(cfg.seed));
  t.metadata.emplace_back("trials", std::to_string(cfg.n_trials));
  t.metadata.emplace_back("n_overflow", std::to_string(res.histogram.n_overflow()));
  t.metadata.emplace_back("n_below", std::to_string(res.histogram.n_below));
  t.metadata.emplace_back("n_above", std::to_string(res.histogram.n_above));
  t.metadata.emplace_back("sample_mean", toa::format_double(res.stats.mean()));
  t.metadata.emplace_back("sample_std", toa::format_double(res.stats.stddev()));
  t.metadata.emplace_back("chi2", toa::format_double(res.chi2.statistic));
  t.metadata.emplace_back("chi2_dof", std::to_string(res.chi2.dof));
  t.metadata.emplace_back("chi2_p_value", toa::format_double(res.chi2.p_value));
  t.columns = {"bin_left", "bin_right", "count", "analytic_mass"};
  const auto& h = res.histogram;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    t.rows.push_back({h.edges[i], h.edges[i + 1], static_cast<std::int64_t>(h.counts[i]), h.analytic_mass[i]});
  }
  emit(o, t);

  std::cerr << "protocol " << o.protocol << ": mean " << toa::format_double(res.stats.mean()) << " +/- "
            << toa::format_double(res.stats.std_error_mean()) << ", std "
            << toa::format_double(res.stats.stddev()) << ", chi2 " << toa::format_double(res.chi2.statistic)
            << " (dof " << res.chi2.dof << ", p = " << toa::format_double(res.chi2.p_value) << ")\n";
  if (res.chi2.p_value < o.min_p) {
    std::cerr << "goodness-of-fit p-value below threshold " << o.min_p << '\n';
    return code(toa::ExitCode::BoundViolation);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum time-of-arrival of a free-falling Gaussian wave packet"};
  app.set_version_flag("--version", std::string("toa ") + toa::kToolVersion);
  app.set_config("--config", "", "Flat key = value file mirroring the long flags");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  auto& p = o.params;
  app.add_option("--mass", p.m, "Particle mass [kg]")->capture_default_str();
  app.add_option("--gravity", p.g, "Gravitational acceleration [m/s^2]")->capture_default_str();
  app.add_option("--height", p.x, "Detector distance below release point [m]")->capture_default_str();
  app.add_option("--hbar", p.hbar, "Reduced Planck constant [J s]")->capture_default_str();
  app.add_option("--sigma", o.sigma, "Initial position spread [m] (single point)");
  app.add_option("--sigma-min", o.sigma_min, "Scan: smallest sigma [m] (default 1e-2 x)");
  app.add_option("--sigma-max", o.sigma_max, "Scan: largest sigma [m] (default 1e1 x)");
  app.add_option("--sigma-steps", o.sigma_steps, "Scan: number of log-spaced sigma values")->capture_default_str();
  app.add_option("--t-eval", o.t_eval, "Time at which Delta X_t (or protocol A) is evaluated [s]")
      ->capture_default_str();
  app.add_option("--tol", o.tol, "Relative quadrature tolerance")->capture_default_str();
  app.add_option("--seed", o.seed, "Simulation seed")->capture_default_str();
  app.add_option("--trials", o.trials, "Simulation trials")->capture_default_str();
  app.add_option("--bins", o.bins, "Histogram bins")->capture_default_str();
  app.add_option("--bin-min", o.bin_min, "Histogram left edge (default from quantiles)");
  app.add_option("--bin-width", o.bin_width, "Histogram bin width (default from quantiles)");
  app.add_option("--protocol", o.protocol, "A: position at fixed time, B: arrival time at fixed height")
      ->check(CLI::IsMember({"A", "B"}))
      ->capture_default_str();
  app.add_option("--sampler", o.sampler, "Conditioned-normal sampler")
      ->check(CLI::IsMember({"rejection", "inverse-cdf"}))
      ->capture_default_str();
  app.add_option("--min-p", o.min_p, "Simulate: fail when the chi-square p-value is below this")
      ->capture_default_str();
  app.add_option("--t-min", o.t_min, "Pdf: first grid time [s]");
  app.add_option("--t-max", o.t_max, "Pdf: last grid time [s]");
  app.add_option("--t-steps", o.t_steps, "Pdf: linear grid points")->capture_default_str();
  app.add_option("--q-min", o.grid.q_min, "Verify: smallest q")->capture_default_str();
  app.add_option("--q-max", o.grid.q_max, "Verify: largest q")->capture_default_str();
  app.add_option("--q-steps", o.grid.q_steps, "Verify: q grid points")->capture_default_str();
  app.add_option("--ratio-min", o.grid.ratio_min, "Verify: smallest sigma/x")->capture_default_str();
  app.add_option("--ratio-max", o.grid.ratio_max, "Verify: largest sigma/x")->capture_default_str();
  app.add_option("--ratio-steps", o.grid.ratio_steps, "Verify: sigma/x grid points")->capture_default_str();
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--out", o.out, "Output file, - for stdout")->capture_default_str();
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  auto* scan = app.add_subcommand("scan", "Sweep sigma and tabulate uncertainty products and mean TOA");
  auto* pdf = app.add_subcommand("pdf", "Tabulate the arrival-time density and CDF");
  auto* verify = app.add_subcommand("verify", "Check the uncertainty bounds over a (q, sigma/x) grid");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo emulation of measurement protocol A or B");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return code(toa::ExitCode::Validation);
  }

  try {
    if (*scan) return cmd_scan(o);
    if (*pdf) return cmd_pdf(o);
    if (*verify) return cmd_verify(o);
    if (*simulate) return cmd_simulate(o);
  } catch (const toa::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return code(toa::ExitCode::Validation);
  } catch (const toa::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return code(toa::ExitCode::Validation);
  } catch (const toa::QuadratureError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return code(toa::ExitCode::QuadratureFailure);
  }
  return code(toa::ExitCode::Validation);
}
