#ifndef TOA_SWEEP_HPP
#define TOA_SWEEP_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "toa/moments.hpp"
#include "toa/physical_model.hpp"
#include "toa/table.hpp"

namespace toa {

inline constexpr const char* kToolVersion = "1.0.0";

/// Bound assertions allow this much relative slack for quadrature error.
inline constexpr double kBoundSlack = 1e-6;

/// Process exit status contract of the command-line tool.
enum class ExitCode : int { Ok = 0, Validation = 2, BoundViolation = 3, QuadratureFailure = 4 };

/// Log-spaced values lo, ..., hi (n points; n == 1 requires lo == hi).
std::vector<double> log_space(double lo, double hi, std::size_t n);

/// Runs body(i) for i in [0, n) on `threads` workers (0 = hardware concurrency).
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

struct SweepSpec {
  PhysicalParams base;  ///< m, g, x, hbar; sigma is swept
  double sigma_min = 1e-7;
  double sigma_max = 1e-4;
  std::size_t sigma_steps = 201;
  double t_eval = 0.0;
  double tol = kDefaultTol;

  void validate() const;
  std::vector<double> sigmas() const;
};

struct SweepRow {
  double sigma = 0.0;
  double sigma_over_x = 0.0;
  double q = 0.0;
  double t_c = 0.0;
  double delta_t = 0.0;
  double delta_x = 0.0;
  double product = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  double mean_toa = 0.0;
  double mean_delay = 0.0;
  Regime regime = Regime::Intermediate;
  // Asymptotic curves: Delta T_x times delta_x, and mean-TOA asymptotes.
  double product_farfield_semiclassical = 0.0;
  double product_farfield_quantum = 0.0;
  double product_nearfield = 0.0;
  double mean_nearfield = 0.0;
  double mean_farfield_quantum = 0.0;
  std::string error;  ///< empty unless quadrature failed for this row

  bool ok() const { return error.empty(); }
};

SweepRow compute_row(const PhysicalParams& params, double t_eval, double tol);

/// One row per sigma, in input order regardless of thread scheduling.
std::vector<SweepRow> run_scan(const SweepSpec& spec, unsigned threads = 1);

Table scan_table(const SweepSpec& spec, const std::vector<SweepRow>& rows);

struct PdfGridSpec {
  std::optional<double> t_min;  ///< default: arrival-time quantile 1e-8
  std::optional<double> t_max;  ///< default: arrival-time quantile 1 - 1e-8
  std::size_t steps = 2001;
};

/// Evaluation times: a linear grid over [t_min, t_max] merged with a grid that
/// is uniform in probability, so narrow features (the arrival spike near
/// t = 0 for q >> 1) are resolved, and with a log-spaced grid (t_min > 0) that
/// follows the power-law tail.
std::vector<double> pdf_grid(const ToaDistribution& dist, const PdfGridSpec& spec);

/// Columns t, pdf, cdf.
Table pdf_table(const PhysicalParams& params, const PdfGridSpec& spec);

struct VerifyGrid {
  double m = 1.67e-27;
  double g = 9.8;
  double hbar = kCodataHbar;
  double q_min = 1e-3;
  double q_max = 1e3;
  std::size_t q_steps = 40;
  double ratio_min = 1e-7;  ///< sigma / x
  double ratio_max = 1e2;
  std::size_t ratio_steps = 40;
  double t_eval = 0.0;
  double tol = kDefaultTol;

  void validate() const;
};

struct VerifyCell {
  double q = 0.0;
  double sigma_over_x = 0.0;
  PhysicalParams params;
  double bound_ratio = 0.0;       ///< Delta T Delta X_t / (hbar / 2mg)
  double energy_ratio = 0.0;      ///< Delta E Delta T / (hbar / 2)
  double delay_over_tc = 0.0;     ///< (E[T] - t_c) / t_c
  double conjecture_rel_err = 0.0;  ///< |q t_c sigma / (hbar / 2mg) - 1|
  Regime regime = Regime::Intermediate;
  std::string error;
};

struct VerifySummary {
  std::vector<VerifyCell> cells;
  double min_bound_ratio = 0.0;
  double min_energy_ratio = 0.0;
  double min_delay_over_tc = 0.0;
  double max_conjecture_rel_err = 0.0;
  std::size_t n_failures = 0;  ///< quadrature failures
  std::size_t n_violations = 0;  ///< cells breaking either bound or the q t_c sigma identity

  ExitCode exit_code() const;
};

VerifyCell verify_cell(const PhysicalParams& params, double t_eval, double tol);

VerifySummary run_verify(const VerifyGrid& grid, unsigned threads = 1);

Table verify_table(const VerifyGrid& grid, const VerifySummary& summary);

/// Common `# key: value` lines describing the physical setup.
std::vector<std::pair<std::string, std::string>> params_metadata(const PhysicalParams& p);

}  // namespace toa

#endif  // TOA_SWEEP_HPP
