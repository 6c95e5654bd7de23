#include "toa/toa_distribution.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "toa/errors.hpp"
#include "toa/normal.hpp"

namespace toa {

ToaDistribution::ToaDistribution(const PhysicalParams& params)
    : params_(params), scales_(derive_scales(params)) {
  xi_upper_ = params_.x / params_.sigma;
  norm_ = normal::cdf(xi_upper_);
}

double ToaDistribution::position_mean(double t) const { return 0.5 * params_.g * t * t; }

double ToaDistribution::position_sigma(double t) const {
  return params_.sigma * std::hypot(1.0, t / scales_.tau);
}

double ToaDistribution::position_pdf(double position, double t) const {
  const double s = position_sigma(t);
  return normal::pdf((position - position_mean(t)) / s) / s;
}

void ToaDistribution::check_domain(XiValue xi) const {
  if (!(xi.value <= xi_upper_)) {
    std::ostringstream msg;
    msg << "xi = " << xi.value << " exceeds x/sigma = " << xi_upper_ << "; arrival time undefined";
    throw DomainError(msg.str());
  }
}

// With a = q xi, b = sigma / (2 q x), s = sqrt(1 + a^2 + b^2):
//   R = 1 + 2a^2 - 2a s.
// For a > 0 both R and R - 1 suffer cancellation in that form; use
//   R - 1 = -2a (1 + b^2) / (a + s)
//   R     = (1 - u)(1 + u) / ((1 + 2a^2) + 2a s),  u = xi sigma / x = 2ab.
double ToaDistribution::radicand_minus_one(double xi) const {
  const double a = scales_.q * xi;
  const double b = 0.5 * scales_.beta;
  const double s = std::sqrt(1.0 + a * a + b * b);
  if (a <= 0.0) return 2.0 * a * (a - s);
  return -2.0 * a * (1.0 + b * b) / (a + s);
}

double ToaDistribution::radicand(double xi) const {
  const double a = scales_.q * xi;
  if (a <= 0.0) return 1.0 + radicand_minus_one(xi);
  const double b = 0.5 * scales_.beta;
  const double s = std::sqrt(1.0 + a * a + b * b);
  const double u = xi / xi_upper_;
  const double r = (1.0 - u) * (1.0 + u) / ((1.0 + 2.0 * a * a) + 2.0 * a * s);
  return r > 0.0 ? r : 0.0;
}

double ToaDistribution::toa_map(XiValue xi) const {
  check_domain(xi);
  return scales_.t_c * std::sqrt(radicand(xi.value));
}

double ToaDistribution::arrival_delay(XiValue xi) const {
  check_domain(xi);
  const double rm1 = radicand_minus_one(xi.value);
  const double r = radicand(xi.value);
  return scales_.t_c * rm1 / (std::sqrt(r) + 1.0);
}

double ToaDistribution::toa_map_farfield(XiValue xi) const {
  check_domain(xi);
  const double a = scales_.q * xi.value;
  const double h = std::hypot(1.0, a);
  return a > 0.0 ? scales_.t_c / (h + a) : scales_.t_c * (h - a);
}

double ToaDistribution::toa_map_nearfield(XiValue xi) const {
  check_domain(xi);
  const double r = 1.0 - xi.value / xi_upper_;
  return scales_.t_c * std::sqrt(r > 0.0 ? r : 0.0);
}

XiValue ToaDistribution::xi_of_time(double t) const {
  const double s = t / scales_.t_c;
  // x - g t^2 / 2 = x (1 - s)(1 + s)
  return XiValue(xi_upper_ * (1.0 - s) * (1.0 + s) / std::hypot(1.0, t / scales_.tau));
}

double ToaDistribution::dxi_dt(double t) const {
  const double tau2 = scales_.tau * scales_.tau;
  const double w = std::hypot(1.0, t / scales_.tau);
  const double g = params_.g;
  return -t * (g + (0.5 * g * t * t + params_.x) / tau2) / (params_.sigma * w * w * w);
}

double ToaDistribution::toa_pdf(double t) const {
  if (!(t >= 0.0)) return 0.0;
  if (std::isinf(t)) return 0.0;
  return normal::pdf(xi_of_time(t).value) * std::abs(dxi_dt(t)) / norm_;
}

double ToaDistribution::toa_cdf(double t) const {
  if (!(t > 0.0)) return 0.0;
  if (std::isinf(t)) return 1.0;
  const double p = normal::mass(xi_of_time(t).value, xi_upper_) / norm_;
  return p < 1.0 ? p : 1.0;
}

double ToaDistribution::toa_quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile probability must lie in [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  // P(T <= t) = p  <=>  Phi(xi(t)) = Phi(x/sigma) (1 - p)
  double xi = normal::quantile(norm_ * (1.0 - p));
  if (xi > xi_upper_) xi = xi_upper_;
  return toa_map(XiValue(xi));
}

}  // namespace toa
