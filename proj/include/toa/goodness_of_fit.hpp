#ifndef TOA_GOODNESS_OF_FIT_HPP
#define TOA_GOODNESS_OF_FIT_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace toa {

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int n_cells = 0;
};

/// Pearson chi-square of observed counts against expected probabilities.
/// Adjacent cells are pooled until each expected count reaches `min_expected`;
/// the remainder 1 - sum(probs) together with `n_outside` forms one extra cell.
ChiSquareResult chi_square_test(std::span<const std::uint64_t> counts, std::span<const double> probs,
                                std::uint64_t n_outside, std::uint64_t n_total,
                                double min_expected = 5.0);

struct KsResult {
  double statistic = 0.0;  ///< sup |F_n - F|
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test. Sorts a copy of `samples`.
KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

}  // namespace toa

#endif  // TOA_GOODNESS_OF_FIT_HPP
