#ifndef TOA_NORMAL_HPP
#define TOA_NORMAL_HPP

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

// Standard normal helpers. Tail-aware variants avoid 1 - Phi cancellation.
namespace toa::normal {

inline double pdf(double z) { return std::exp(-0.5 * z * z) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

inline double cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Upper tail 1 - Phi(z).
inline double sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// P(lo < Z <= hi).
inline double mass(double lo, double hi) {
  if (hi <= lo) return 0.0;
  if (lo >= 0.0) return sf(lo) - sf(hi);
  return cdf(hi) - cdf(lo);
}

/// Phi^{-1}(p) for p in (0, 1).
inline double quantile(double p) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p); }

}  // namespace toa::normal

#endif  // TOA_NORMAL_HPP
