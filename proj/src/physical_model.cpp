#include "toa/physical_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "toa/errors.hpp"

namespace toa {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << "parameter '" << name << "' must be positive and finite, got " << value;
    throw ValidationError(msg.str());
  }
}

}  // namespace

void PhysicalParams::validate() const {
  require_positive(m, "m");
  require_positive(g, "g");
  require_positive(x, "x");
  require_positive(sigma, "sigma");
  require_positive(hbar, "hbar");
}

DerivedScales derive_scales(const PhysicalParams& p) {
  p.validate();
  DerivedScales s{};
  s.t_c = std::sqrt(2.0 * p.x / p.g);
  s.tau = 2.0 * p.m * p.sigma * p.sigma / p.hbar;
  s.q = p.hbar / (2.0 * p.m * p.sigma * std::sqrt(2.0 * p.g * p.x));
  s.sigma_over_x = p.sigma / p.x;
  s.beta = s.sigma_over_x / s.q;
  s.x0 = std::cbrt(p.hbar * p.hbar / (2.0 * p.m * p.m * p.g));
  s.sigma_p = p.hbar / (2.0 * p.sigma);
  return s;
}

PhysicalParams params_from_groups(double m, double g, double hbar, double q, double sigma_over_x) {
  require_positive(q, "q");
  require_positive(sigma_over_x, "sigma_over_x");
  PhysicalParams p;
  p.m = m;
  p.g = g;
  p.hbar = hbar;
  // x^{3/2} = hbar / (2 m r q sqrt(2g))
  const double x32 = hbar / (2.0 * m * sigma_over_x * q * std::sqrt(2.0 * g));
  p.x = std::cbrt(x32 * x32);
  p.sigma = sigma_over_x * p.x;
  p.validate();
  return p;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::FarFieldSemiclassical:
      return "FAR_FIELD_SEMICLASSICAL";
    case Regime::FarFieldQuantum:
      return "FAR_FIELD_QUANTUM";
    case Regime::NearField:
      return "NEAR_FIELD";
    case Regime::Intermediate:
      return "INTERMEDIATE";
  }
  return "INTERMEDIATE";
}

RegimeLabel classify_regime(const DerivedScales& s, double threshold) {
  if (!(threshold > 1.0) || !std::isfinite(threshold)) {
    throw ValidationError("regime threshold must be a finite number > 1");
  }
  const double q = s.q;
  const double r = s.sigma_over_x;

  const double far = q / r;
  const double semiclassical = std::min(far, 1.0 / q);
  const double quantum = std::min(far, q);
  const double near = r / std::max({1.0, q, q * q});

  if (semiclassical >= threshold) return {Regime::FarFieldSemiclassical, semiclassical};
  if (quantum >= threshold) return {Regime::FarFieldQuantum, quantum};
  if (near >= threshold) return {Regime::NearField, near};
  return {Regime::Intermediate, std::max({semiclassical, quantum, near})};
}

}  // namespace toa
