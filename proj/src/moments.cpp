#include "toa/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "toa/errors.hpp"
#include "toa/normal.hpp"

namespace toa {

namespace {

constexpr double kXiCeil = 40.0;

void check_tol(double tol) {
  if (!(tol > 1e-14 && tol < 1e-2)) {
    throw ValidationError("relative tolerance must lie in (1e-14, 1e-2)");
  }
}

}  // namespace

quad::Result truncated_gaussian_expect(const std::function<double(double)>& f, double upper,
                                       double tol) {
  check_tol(tol);
  if (!(upper > kXiFloor) || std::isnan(upper)) {
    throw ValidationError("truncation point must exceed the integration floor -40");
  }
  const double top = std::min(upper, kXiCeil);
  auto integrand = [&f](double xi) { return f(xi) * normal::pdf(xi); };

  quad::Options opts;
  opts.rel_tol = tol;
  quad::Result r = top > 0.0 ? quad::integrate(integrand, {kXiFloor, 0.0, top}, opts)
                             : quad::integrate(integrand, {kXiFloor, top}, opts);
  const double norm = normal::cdf(upper);
  r.value /= norm;
  r.abs_error /= norm;
  return r;
}

MomentReport toa_moments(const ToaDistribution& dist, double tol) {
  const double upper = dist.xi_upper();
  const double t_c = dist.scales().t_c;

  // Subtract the slope at xi = 0 and add its expectation back in closed form,
  // E[xi | xi <= u] = -phi(u) / Phi(u). In the far field the linear part is
  // O(q t_c) while the mean delay is O(q^2 t_c). Skipped for x/sigma < 1, where
  // the slope t_c sigma / 2x would exceed the delay itself.
  const double b = 0.5 * dist.scales().beta;
  const double slope = upper >= 1.0 ? -t_c * dist.scales().q * std::sqrt(1.0 + b * b) : 0.0;
  const auto delay = truncated_gaussian_expect(
      [&dist, slope](double xi) { return dist.arrival_delay(XiValue(xi)) - slope * xi; }, upper, tol);
  const double mean_xi = -normal::pdf(upper) / normal::cdf(upper);
  const double d = delay.value + slope * mean_xi;
  const auto var = truncated_gaussian_expect(
      [&dist, d](double xi) {
        const double e = dist.arrival_delay(XiValue(xi)) - d;
        return e * e;
      },
      upper, tol);

  MomentReport rep{};
  rep.mean_delay = d;
  rep.mean_toa = t_c + d;
  const double variance = std::max(var.value, 0.0);
  rep.std_toa = std::sqrt(variance);
  rep.second_moment = variance + rep.mean_toa * rep.mean_toa;
  rep.abs_error_estimate = delay.abs_error;
  rep.var_error_estimate = var.abs_error;
  rep.n_evals = delay.n_evals + var.n_evals;
  return rep;
}

double delta_toa(const ToaDistribution& dist, double tol) { return toa_moments(dist, tol).std_toa; }

double mean_toa_delay(const ToaDistribution& dist, double tol) {
  return toa_moments(dist, tol).mean_delay;
}

UncertaintyReport uncertainty_product(const ToaDistribution& dist, double t, double tol) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("evaluation time must be >= 0");
  UncertaintyReport rep{};
  rep.delta_t = delta_toa(dist, tol);
  rep.delta_x = dist.position_sigma(t);
  rep.product = rep.delta_t * rep.delta_x;
  rep.bound = asymptotic::bound(dist.params());
  rep.ratio = rep.product / rep.bound;
  rep.regime = classify_regime(dist.scales());
  return rep;
}

EnergyReport energy_moments(const PhysicalParams& p) {
  p.validate();
  const double hbar2 = p.hbar * p.hbar;
  const double s2 = p.sigma * p.sigma;
  const double kinetic = hbar2 / (8.0 * p.m * s2);   // hbar^2 / (8 m sigma^2)
  const double grav = p.m * p.g * p.sigma;           // m g sigma
  EnergyReport rep{};
  rep.mean_energy = kinetic;
  rep.mean_energy_sq = 3.0 * kinetic * kinetic + grav * grav;
  // Delta E^2 = hbar^4 / (32 m^2 sigma^4) + m^2 g^2 sigma^2 = 2 kinetic^2 + grav^2
  rep.delta_e = std::hypot(std::numbers::sqrt2 * kinetic, grav);
  return rep;
}

TimeEnergyProduct time_energy_product(const PhysicalParams& params, double tol) {
  const ToaDistribution dist(params);
  return {energy_moments(params).delta_e * delta_toa(dist, tol), 0.5 * params.hbar};
}

namespace asymptotic {

double nearfield_k() {
  const double g34 = std::tgamma(0.75);
  return std::sqrt(std::sqrt(2.0 / std::numbers::pi) * (1.0 - g34 * g34 * std::numbers::inv_sqrtpi));
}

double farfield_quantum_factor() { return std::sqrt(2.0 * (std::numbers::pi - 1.0) / std::numbers::pi); }

double bound(const PhysicalParams& p) { return p.hbar / (2.0 * p.m * p.g); }

double delta_t_farfield_semiclassical(const PhysicalParams& p) { return bound(p) / p.sigma; }

double delta_t_farfield_quantum(const PhysicalParams& p) {
  return delta_t_farfield_semiclassical(p) * farfield_quantum_factor();
}

double delta_t_nearfield(const PhysicalParams& p) { return nearfield_k() * std::sqrt(2.0 * p.sigma / p.g); }

double mean_nearfield(const PhysicalParams& p) {
  const auto s = derive_scales(p);
  return std::pow(2.0, 0.25) * std::tgamma(0.75) * std::numbers::inv_sqrtpi * s.t_c *
         std::sqrt(s.sigma_over_x);
}

double second_moment_nearfield(const PhysicalParams& p) {
  const auto s = derive_scales(p);
  return std::sqrt(2.0 / std::numbers::pi) * s.t_c * s.t_c * s.sigma_over_x;
}

double mean_farfield_quantum(const PhysicalParams& p) {
  const auto s = derive_scales(p);
  return s.q * s.t_c * std::sqrt(2.0 / std::numbers::pi);
}

double delay_farfield_semiclassical(const PhysicalParams& p) {
  const auto s = derive_scales(p);
  return 0.5 * s.t_c * s.q * s.q;
}

}  // namespace asymptotic

}  // namespace toa
