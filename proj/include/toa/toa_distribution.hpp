#ifndef TOA_TOA_DISTRIBUTION_HPP
#define TOA_TOA_DISTRIBUTION_HPP

#include "toa/physical_model.hpp"

namespace toa {

/// Coordinate of the standard normal variable driving the position
/// X_t = g t^2 / 2 + xi sigma(t).
struct XiValue {
  double value;
  constexpr explicit XiValue(double v) : value(v) {}
};

/// Arrival-time law of a free-falling Gaussian packet at a fixed detector.
///
/// The first-passage time is the explicit root T(xi) of
///   x = g T^2 / 2 + sigma xi sqrt(1 + T^2 / tau^2),
/// defined for xi <= x/sigma; realizations with xi > x/sigma start past the
/// detector and are excluded, so every statistic is conditional on
/// xi <= x/sigma with normalization Phi(x/sigma).
///
/// Immutable after construction.
class ToaDistribution {
 public:
  explicit ToaDistribution(const PhysicalParams& params);

  const PhysicalParams& params() const noexcept { return params_; }
  const DerivedScales& scales() const noexcept { return scales_; }

  /// Phi(x/sigma), in (1/2, 1).
  double norm() const noexcept { return norm_; }

  /// Upper end x/sigma of the admissible xi range.
  double xi_upper() const noexcept { return xi_upper_; }

  // Position law at fixed time.
  double position_mean(double t) const;
  double position_sigma(double t) const;
  double position_pdf(double position, double t) const;

  /// Exact arrival time. Strictly decreasing; T(0) = t_c, T(x/sigma) = 0.
  /// Throws DomainError for xi > x/sigma.
  double toa_map(XiValue xi) const;

  /// toa_map(xi) - t_c without cancellation for small q xi.
  double arrival_delay(XiValue xi) const;

  /// t_c (sqrt(1 + q^2 xi^2) - q xi), valid for sigma/x << q.
  double toa_map_farfield(XiValue xi) const;

  /// t_c sqrt(1 - (sigma/x) xi), valid for sigma/x >> max(1, q, q^2).
  double toa_map_nearfield(XiValue xi) const;

  /// Inverse of toa_map: (x - g t^2/2) / sigma(t).
  XiValue xi_of_time(double t) const;

  /// d xi / dt, analytic.
  double dxi_dt(double t) const;

  double toa_pdf(double t) const;
  double toa_cdf(double t) const;

  /// Inverse CDF for p in [0, 1]; quantile(0) = 0.
  double toa_quantile(double p) const;

 private:
  void check_domain(XiValue xi) const;
  /// R(xi) - 1 where T = t_c sqrt(R).
  double radicand_minus_one(double xi) const;
  double radicand(double xi) const;

  PhysicalParams params_;
  DerivedScales scales_;
  double xi_upper_;
  double norm_;
};

}  // namespace toa

#endif  // TOA_TOA_DISTRIBUTION_HPP
