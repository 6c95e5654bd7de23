#include "toa/goodness_of_fit.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "toa/errors.hpp"

namespace toa {

ChiSquareResult chi_square_test(std::span<const std::uint64_t> counts, std::span<const double> probs,
                                std::uint64_t n_outside, std::uint64_t n_total, double min_expected) {
  if (counts.size() != probs.size()) throw ValidationError("chi_square_test: size mismatch");
  if (n_total == 0) throw ValidationError("chi_square_test: no samples");
  const double n = static_cast<double>(n_total);

  std::vector<double> obs;
  std::vector<double> exp;
  double acc_o = 0.0;
  double acc_e = 0.0;
  double inside = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    acc_o += static_cast<double>(counts[i]);
    acc_e += n * probs[i];
    inside += probs[i];
    if (acc_e >= min_expected) {
      obs.push_back(acc_o);
      exp.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  // Leftover tail of the binned range joins the last pooled cell.
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (!exp.empty()) {
      obs.back() += acc_o;
      exp.back() += acc_e;
    } else {
      obs.push_back(acc_o);
      exp.push_back(acc_e);
    }
  }
  const double outside_e = n * std::max(0.0, 1.0 - inside);
  const double outside_o = static_cast<double>(n_outside);
  if (outside_e >= min_expected) {
    obs.push_back(outside_o);
    exp.push_back(outside_e);
  } else if (!exp.empty()) {
    obs.back() += outside_o;
    exp.back() += outside_e;
  }

  ChiSquareResult res;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] > 0.0) {
      const double d = obs[i] - exp[i];
      res.statistic += d * d / exp[i];
    }
  }
  res.n_cells = static_cast<int>(obs.size());
  res.dof = std::max(1, res.n_cells - 1);
  res.p_value = boost::math::gamma_q(0.5 * res.dof, 0.5 * res.statistic);
  return res;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ValidationError("ks_test: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  const double sn = std::sqrt(n);
  // Stephens' finite-n correction.
  return {d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d)};
}

}  // namespace toa
