#include "toa/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "toa/errors.hpp"
#include "toa/toa_distribution.hpp"

namespace toa {

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > 0.0) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ValidationError("log_space: bounds must be positive and finite");
  }
  if (n == 0) throw ValidationError("log_space: need at least one point");
  if (n == 1) {
    if (lo != hi) throw ValidationError("log_space: a single point requires min == max");
    return {lo};
  }
  if (!(lo < hi)) throw ValidationError("log_space: min must be < max");
  std::vector<double> out(n);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
}

namespace {

void check_tolerance(double tol) {
  if (!(tol > 1e-14 && tol < 1e-2)) throw ValidationError("tol must lie in (1e-14, 1e-2)");
}

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("t-eval must be >= 0");
}

}  // namespace

void SweepSpec::validate() const {
  PhysicalParams p = base;
  p.sigma = sigma_min;
  p.validate();
  p.sigma = sigma_max;
  p.validate();
  if (sigma_steps == 1 ? sigma_min != sigma_max : !(sigma_min < sigma_max && sigma_steps >= 2)) {
    throw ValidationError("sigma range needs min < max with >= 2 steps, or min == max with 1 step");
  }
  check_time(t_eval);
  check_tolerance(tol);
}

std::vector<double> SweepSpec::sigmas() const { return log_space(sigma_min, sigma_max, sigma_steps); }

SweepRow compute_row(const PhysicalParams& params, double t_eval, double tol) {
  const ToaDistribution dist(params);
  const auto& s = dist.scales();
  SweepRow row;
  row.sigma = params.sigma;
  row.sigma_over_x = s.sigma_over_x;
  row.q = s.q;
  row.t_c = s.t_c;
  row.delta_x = dist.position_sigma(t_eval);
  row.bound = asymptotic::bound(params);
  row.regime = classify_regime(s).label;
  row.product_farfield_semiclassical = asymptotic::delta_t_farfield_semiclassical(params) * row.delta_x;
  row.product_farfield_quantum = asymptotic::delta_t_farfield_quantum(params) * row.delta_x;
  row.product_nearfield = asymptotic::delta_t_nearfield(params) * row.delta_x;
  row.mean_nearfield = asymptotic::mean_nearfield(params);
  row.mean_farfield_quantum = asymptotic::mean_farfield_quantum(params);
  try {
    const auto m = toa_moments(dist, tol);
    row.delta_t = m.std_toa;
    row.mean_toa = m.mean_toa;
    row.mean_delay = m.mean_delay;
    row.product = row.delta_t * row.delta_x;
    row.ratio = row.product / row.bound;
  } catch (const QuadratureError& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.delta_t = row.mean_toa = row.mean_delay = row.product = row.ratio = nan;
    row.error = e.what();
  }
  return row;
}

std::vector<SweepRow> run_scan(const SweepSpec& spec, unsigned threads) {
  spec.validate();
  const auto sigmas = spec.sigmas();
  std::vector<SweepRow> rows(sigmas.size());
  parallel_for(sigmas.size(), threads, [&](std::size_t i) {
    PhysicalParams p = spec.base;
    p.sigma = sigmas[i];
    rows[i] = compute_row(p, spec.t_eval, spec.tol);
  });
  return rows;
}

std::vector<std::pair<std::string, std::string>> params_metadata(const PhysicalParams& p) {
  return {{"tool", std::string("toa ") + kToolVersion},
          {"mass", format_double(p.m)},
          {"gravity", format_double(p.g)},
          {"height", format_double(p.x)},
          {"hbar", format_double(p.hbar)}};
}

Table scan_table(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  Table t;
  t.metadata = params_metadata(spec.base);
  t.metadata.emplace_back("command", "scan");
  t.metadata.emplace_back("sigma_min", format_double(spec.sigma_min));
  t.metadata.emplace_back("sigma_max", format_double(spec.sigma_max));
  t.metadata.emplace_back("sigma_steps", std::to_string(spec.sigma_steps));
  t.metadata.emplace_back("t_eval", format_double(spec.t_eval));
  t.metadata.emplace_back("tol", format_double(spec.tol));
  t.columns = {"sigma",
               "sigma_over_x",
               "q",
               "t_c",
               "delta_t",
               "delta_x",
               "product",
               "bound",
               "ratio",
               "mean_toa",
               "mean_delay",
               "regime",
               "product_farfield_semiclassical",
               "product_farfield_quantum",
               "product_nearfield",
               "mean_nearfield",
               "mean_farfield_quantum",
               "error"};
  for (const auto& r : rows) {
    t.rows.push_back({r.sigma, r.sigma_over_x, r.q, r.t_c, r.delta_t, r.delta_x, r.product, r.bound, r.ratio,
                      r.mean_toa, r.mean_delay, std::string(to_string(r.regime)), r.product_farfield_semiclassical,
                      r.product_farfield_quantum, r.product_nearfield, r.mean_nearfield, r.mean_farfield_quantum,
                      r.error});
  }
  return t;
}

std::vector<double> pdf_grid(const ToaDistribution& dist, const PdfGridSpec& spec) {
  if (spec.steps < 2) throw ValidationError("pdf grid needs at least 2 steps");
  constexpr double kTail = 1e-8;
  const double lo = spec.t_min.value_or(dist.toa_quantile(kTail));
  const double hi = spec.t_max.value_or(dist.toa_quantile(1.0 - kTail));
  if (!(lo >= 0.0) || !(lo < hi) || !std::isfinite(hi)) throw ValidationError("pdf grid needs 0 <= t-min < t-max");

  std::vector<double> grid;
  grid.reserve(3 * spec.steps);
  const double n = static_cast<double>(spec.steps - 1);
  for (std::size_t i = 0; i < spec.steps; ++i) grid.push_back(lo + (hi - lo) * static_cast<double>(i) / n);
  const double p_lo = dist.toa_cdf(lo);
  const double p_hi = dist.toa_cdf(hi);
  for (std::size_t i = 1; i + 1 < spec.steps; ++i) {
    const double t = dist.toa_quantile(p_lo + (p_hi - p_lo) * static_cast<double>(i) / n);
    if (t > lo && t < hi) grid.push_back(t);
  }
  if (lo > 0.0) {
    for (double t : log_space(lo, hi, spec.steps)) grid.push_back(t);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

Table pdf_table(const PhysicalParams& params, const PdfGridSpec& spec) {
  const ToaDistribution dist(params);
  Table t;
  t.metadata = params_metadata(params);
  t.metadata.emplace_back("command", "pdf");
  t.metadata.emplace_back("sigma", format_double(params.sigma));
  t.metadata.emplace_back("t_c", format_double(dist.scales().t_c));
  t.metadata.emplace_back("q", format_double(dist.scales().q));
  t.metadata.emplace_back("norm", format_double(dist.norm()));
  t.columns = {"t", "pdf", "cdf"};
  for (double time : pdf_grid(dist, spec)) t.rows.push_back({time, dist.toa_pdf(time), dist.toa_cdf(time)});
  return t;
}

void VerifyGrid::validate() const {
  PhysicalParams p;
  p.m = m;
  p.g = g;
  p.hbar = hbar;
  p.validate();
  if (!(q_steps >= 1 && ratio_steps >= 1)) throw ValidationError("verify grid needs >= 1 step per axis");
  (void)log_space(q_min, q_max, q_steps);
  (void)log_space(ratio_min, ratio_max, ratio_steps);
  check_time(t_eval);
  check_tolerance(tol);
}

VerifyCell verify_cell(const PhysicalParams& params, double t_eval, double tol) {
  const ToaDistribution dist(params);
  const auto& s = dist.scales();
  VerifyCell cell;
  cell.params = params;
  cell.q = s.q;
  cell.sigma_over_x = s.sigma_over_x;
  cell.regime = classify_regime(s).label;
  const double bound = asymptotic::bound(params);
  cell.conjecture_rel_err = std::abs(s.q * s.t_c * params.sigma / bound - 1.0);
  try {
    const auto m = toa_moments(dist, tol);
    cell.bound_ratio = m.std_toa * dist.position_sigma(t_eval) / bound;
    cell.energy_ratio = energy_moments(params).delta_e * m.std_toa / (0.5 * params.hbar);
    cell.delay_over_tc = m.mean_delay / s.t_c;
  } catch (const QuadratureError& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    cell.bound_ratio = cell.energy_ratio = cell.delay_over_tc = nan;
    cell.error = e.what();
  }
  return cell;
}

ExitCode VerifySummary::exit_code() const {
  if (n_failures > 0) return ExitCode::QuadratureFailure;
  if (n_violations > 0) return ExitCode::BoundViolation;
  return ExitCode::Ok;
}

VerifySummary run_verify(const VerifyGrid& grid, unsigned threads) {
  grid.validate();
  const auto qs = log_space(grid.q_min, grid.q_max, grid.q_steps);
  const auto rs = log_space(grid.ratio_min, grid.ratio_max, grid.ratio_steps);
  VerifySummary sum;
  sum.cells.resize(qs.size() * rs.size());
  parallel_for(sum.cells.size(), threads, [&](std::size_t k) {
    const double q = qs[k / rs.size()];
    const double r = rs[k % rs.size()];
    sum.cells[k] = verify_cell(params_from_groups(grid.m, grid.g, grid.hbar, q, r), grid.t_eval, grid.tol);
  });

  constexpr double inf = std::numeric_limits<double>::infinity();
  sum.min_bound_ratio = sum.min_energy_ratio = sum.min_delay_over_tc = inf;
  for (const auto& c : sum.cells) {
    sum.max_conjecture_rel_err = std::max(sum.max_conjecture_rel_err, c.conjecture_rel_err);
    bool violated = c.conjecture_rel_err > kBoundSlack;
    if (!c.error.empty()) {
      ++sum.n_failures;
    } else {
      sum.min_bound_ratio = std::min(sum.min_bound_ratio, c.bound_ratio);
      sum.min_energy_ratio = std::min(sum.min_energy_ratio, c.energy_ratio);
      sum.min_delay_over_tc = std::min(sum.min_delay_over_tc, c.delay_over_tc);
      // The delay is reported, not enforced: for q << 1 and sigma/x of order
      // one, E[sqrt(1 - xi sigma/x)] < 1 makes E[T] fall below t_c.
      violated = violated || c.bound_ratio < 1.0 - kBoundSlack || c.energy_ratio < 1.0 - kBoundSlack;
    }
    if (violated) ++sum.n_violations;
  }
  return sum;
}

Table verify_table(const VerifyGrid& grid, const VerifySummary& sum) {
  PhysicalParams p;
  p.m = grid.m;
  p.g = grid.g;
  p.hbar = grid.hbar;
  Table t;
  t.metadata = params_metadata(p);
  t.metadata.erase(t.metadata.begin() + 3);  // height varies per cell
  t.metadata.emplace_back("command", "verify");
  t.metadata.emplace_back("q_range", format_double(grid.q_min) + " " + format_double(grid.q_max) + " " +
                                         std::to_string(grid.q_steps));
  t.metadata.emplace_back("sigma_over_x_range", format_double(grid.ratio_min) + " " +
                                                    format_double(grid.ratio_max) + " " +
                                                    std::to_string(grid.ratio_steps));
  t.metadata.emplace_back("min_bound_ratio", format_double(sum.min_bound_ratio));
  t.metadata.emplace_back("min_energy_ratio", format_double(sum.min_energy_ratio));
  t.metadata.emplace_back("min_delay_over_tc", format_double(sum.min_delay_over_tc));
  t.metadata.emplace_back("max_conjecture_rel_err", format_double(sum.max_conjecture_rel_err));
  t.metadata.emplace_back("quadrature_failures", std::to_string(sum.n_failures));
  t.metadata.emplace_back("violations", std::to_string(sum.n_violations));
  t.columns = {"q",           "sigma_over_x",  "height",       "sigma", "bound_ratio",
               "energy_ratio", "delay_over_tc", "conjecture_rel_err", "regime", "error"};
  for (const auto& c : sum.cells) {
    t.rows.push_back({c.q, c.sigma_over_x, c.params.x, c.params.sigma, c.bound_ratio, c.energy_ratio,
                      c.delay_over_tc, c.conjecture_rel_err, std::string(to_string(c.regime)), c.error});
  }
  return t;
}

}  // namespace toa
