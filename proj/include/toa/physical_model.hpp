#ifndef TOA_PHYSICAL_MODEL_HPP
#define TOA_PHYSICAL_MODEL_HPP

#include <string_view>

namespace toa {

/// CODATA 2018 reduced Planck constant in J s.
inline constexpr double kCodataHbar = 1.054571817e-34;

/// Dimensional inputs of a free-fall experiment, SI units.
///
/// The particle is released from rest at the origin with a Gaussian position
/// spread `sigma`; the detector sits a distance `x` below the release point.
struct PhysicalParams {
  double m = 1.67e-27;  ///< mass [kg]
  double g = 9.8;       ///< gravitational acceleration [m/s^2]
  double x = 1e-5;      ///< detector distance below release point [m]
  double sigma = 1e-6;  ///< initial position standard deviation [m]
  double hbar = kCodataHbar;

  /// Throws ValidationError naming the first non-positive or non-finite field.
  void validate() const;
};

/// Characteristic scales and dimensionless groups of a free-fall setup.
struct DerivedScales {
  double t_c;      ///< classical arrival time sqrt(2x/g) [s]
  double tau;      ///< dispersion time 2 m sigma^2 / hbar [s]
  double q;        ///< quantumness ratio hbar / (2 m sigma sqrt(2 g x))
  double beta;     ///< far/near-field parameter (sigma/x)/q
  double x0;       ///< gravitational length (hbar^2 / (2 m^2 g))^(1/3) [m]
  double sigma_p;  ///< initial momentum spread hbar / (2 sigma) [kg m/s]
  double sigma_over_x;
};

DerivedScales derive_scales(const PhysicalParams& params);

/// Builds parameters with prescribed q and sigma/x for fixed m, g, hbar by
/// solving q = hbar / (2 m r x sqrt(2 g x)) for the detector distance x.
PhysicalParams params_from_groups(double m, double g, double hbar, double q, double sigma_over_x);

enum class Regime { FarFieldSemiclassical, FarFieldQuantum, NearField, Intermediate };

std::string_view to_string(Regime regime);

struct RegimeLabel {
  Regime label;
  /// Factor by which the regime inequalities hold (the smallest one). For
  /// Intermediate this is the best factor reached by any regime, < threshold.
  double margin;
};

/// Operationalizes the asymptotic-regime conditions with a numeric factor:
///   far-field semiclassical  sigma/x <= q/T and q <= 1/T
///   far-field quantum        sigma/x <= q/T and q >= T
///   near field               sigma/x >= T max(1, q, q^2)
RegimeLabel classify_regime(const DerivedScales& scales, double threshold = 100.0);

}  // namespace toa

#endif  // TOA_PHYSICAL_MODEL_HPP
