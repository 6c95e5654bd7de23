#ifndef TOA_MOMENTS_HPP
#define TOA_MOMENTS_HPP

#include <cmath>
#include <functional>
#include <numbers>

#include "toa/physical_model.hpp"
#include "toa/quadrature.hpp"
#include "toa/toa_distribution.hpp"

namespace toa {

inline constexpr double kDefaultTol = 1e-10;

/// Lower cut of every xi integral; the normal mass below it is < 1e-300.
inline constexpr double kXiFloor = -40.0;

/// E[f(xi) | xi <= upper] for standard normal xi, i.e.
///   (1 / Phi(upper)) int_{-40}^{min(upper, 40)} f(xi) phi(xi) dxi,
/// split at xi = 0. `tol` is relative and must lie in (1e-14, 1e-2).
/// Value and error are both normalized by Phi(upper).
quad::Result truncated_gaussian_expect(const std::function<double(double)>& f, double upper,
                                       double tol = kDefaultTol);

struct MomentReport {
  double mean_toa;            ///< E[T] [s]
  double second_moment;       ///< E[T^2] [s^2]
  double std_toa;             ///< sqrt(Var T) [s]
  double mean_delay;          ///< E[T] - t_c [s]
  double abs_error_estimate;  ///< quadrature error of mean_toa [s]
  double var_error_estimate;  ///< quadrature error of Var T [s^2]
  std::size_t n_evals;
};

/// Mean and spread of the exact arrival time. The variance is integrated as a
/// central moment, so it stays accurate when std_toa << t_c.
MomentReport toa_moments(const ToaDistribution& dist, double tol = kDefaultTol);

double delta_toa(const ToaDistribution& dist, double tol = kDefaultTol);

/// E[T] - t_c. Nonnegative up to quadrature error.
double mean_toa_delay(const ToaDistribution& dist, double tol = kDefaultTol);

struct UncertaintyReport {
  double delta_t;  ///< [s]
  double delta_x;  ///< position spread at the evaluation time [m]
  double product;  ///< [m s]
  double bound;    ///< hbar / (2 m g) [m s]
  double ratio;    ///< product / bound
  RegimeLabel regime;
};

/// Delta T_x times Delta X_t against hbar / (2 m g).
UncertaintyReport uncertainty_product(const ToaDistribution& dist, double t = 0.0,
                                      double tol = kDefaultTol);

struct EnergyReport {
  double mean_energy;     ///< <H> [J]
  double mean_energy_sq;  ///< <H^2> [J^2]
  double delta_e;         ///< [J]
};

/// Closed-form moments of H = p^2 / 2m - m g x in the initial Gaussian state.
EnergyReport energy_moments(const PhysicalParams& params);

struct TimeEnergyProduct {
  double value;  ///< Delta E Delta T_x [J s]
  double bound;  ///< hbar / 2 [J s]
};

TimeEnergyProduct time_energy_product(const PhysicalParams& params, double tol = kDefaultTol);

/// Closed-form leading-order predictions in the asymptotic regimes.
namespace asymptotic {

/// sqrt(sqrt(2/pi) (1 - Gamma(3/4)^2 / sqrt(pi))), about 0.34915.
double nearfield_k();

/// sqrt(2 (pi - 1) / pi), about 1.1676.
double farfield_quantum_factor();

/// hbar / (2 m g)
double bound(const PhysicalParams& p);

/// Far field, q << 1: Delta T_x = hbar / (2 m g sigma).
double delta_t_farfield_semiclassical(const PhysicalParams& p);

/// Far field, q >> 1: hbar / (2 m g sigma) sqrt(2 (pi - 1) / pi).
double delta_t_farfield_quantum(const PhysicalParams& p);

/// Near field: k sqrt(2 sigma / g).
double delta_t_nearfield(const PhysicalParams& p);

/// Near field: 2^{1/4} Gamma(3/4) / sqrt(pi) t_c sqrt(sigma / x).
double mean_nearfield(const PhysicalParams& p);

/// Near field: sqrt(2/pi) t_c^2 sigma / x.
double second_moment_nearfield(const PhysicalParams& p);

/// Far field, q >> 1: q t_c E[|xi| - xi] = q t_c sqrt(2/pi).
double mean_farfield_quantum(const PhysicalParams& p);

/// Far field, q << 1: t_c q^2 / 2.
double delay_farfield_semiclassical(const PhysicalParams& p);

}  // namespace asymptotic

}  // namespace toa

#endif  // TOA_MOMENTS_HPP
