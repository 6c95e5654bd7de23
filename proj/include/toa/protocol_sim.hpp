#ifndef TOA_PROTOCOL_SIM_HPP
#define TOA_PROTOCOL_SIM_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "toa/goodness_of_fit.hpp"
#include "toa/normal.hpp"
#include "toa/toa_distribution.hpp"

namespace toa {

// Monte Carlo emulation of the two mutually exclusive measurement protocols:
//   A: record the position X_t at a fixed time t;
//   B: record the first arrival time T_x at the fixed detector x.

enum class Protocol { A, B };
enum class SamplingMethod { Rejection, InverseCdf };

struct BinSpec {
  double min = 0.0;
  double width = 1.0;
  std::size_t n = 50;
};

struct SimConfig {
  std::uint64_t n_trials = 100000;
  std::uint64_t seed = 1;
  BinSpec bins;
  Protocol protocol = Protocol::B;
  SamplingMethod method = SamplingMethod::Rejection;
  unsigned threads = 1;  ///< 0 = hardware concurrency; results do not depend on it

  void validate() const;
};

/// Trials are generated in fixed-size shards, shard i seeded from (seed, i).
inline constexpr std::uint64_t kShardSize = 1u << 16;

std::mt19937_64 shard_engine(std::uint64_t seed, std::uint64_t shard_index);

struct Histogram {
  std::vector<double> edges;  ///< n + 1 edges
  std::vector<std::uint64_t> counts;
  std::vector<double> analytic_mass;  ///< model probability of each bin
  std::uint64_t n_total = 0;
  std::uint64_t n_below = 0;
  std::uint64_t n_above = 0;

  /// Samples outside [edges.front(), edges.back()).
  std::uint64_t n_overflow() const { return n_below + n_above; }

  void add(double value);
  void merge(const Histogram& other);
};

Histogram make_histogram(const BinSpec& bins);

/// Streaming mean and central moments up to order four, mergeable.
class RunningMoments {
 public:
  void add(double x);
  void merge(const RunningMoments& other);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance.
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  /// Biased fourth central moment.
  double central_moment4() const { return n_ > 0 ? m4_ / static_cast<double>(n_) : 0.0; }
  double std_error_mean() const;
  /// Large-sample standard error of the sample standard deviation,
  /// sqrt((mu4 - s^4) / (4 s^2 n)).
  double std_error_std() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

/// Standard normal restricted to xi <= upper.
class ConditionedNormalSampler {
 public:
  explicit ConditionedNormalSampler(double upper, SamplingMethod method = SamplingMethod::Rejection)
      : upper_(upper), method_(method), mass_(normal::cdf(upper)) {}

  template <class URBG>
  double operator()(URBG& rng) {
    if (method_ == SamplingMethod::Rejection) {
      for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        const double z = normal_(rng);
        if (z <= upper_) return z;
      }
    }
    return inverse_cdf(rng);
  }

  double upper() const { return upper_; }

 private:
  static constexpr int kMaxRejections = 64;

  template <class URBG>
  double inverse_cdf(URBG& rng) {
    double u = 0.0;
    while (u <= 0.0) u = std::generate_canonical<double, 53>(rng);
    const double z = normal::quantile(u * mass_);
    return z < upper_ ? z : upper_;
  }

  double upper_;
  SamplingMethod method_;
  double mass_;
  std::normal_distribution<double> normal_;
};

template <class URBG>
double sample_xi_conditioned(double upper, URBG& rng, SamplingMethod method = SamplingMethod::Rejection) {
  ConditionedNormalSampler sampler(upper, method);
  return sampler(rng);
}

struct ProtocolResult {
  Histogram histogram;
  RunningMoments stats;
  ChiSquareResult chi2;
};

/// Positions X_t = g t^2 / 2 + xi sigma(t) with unconditioned xi, binned and
/// compared against the Gaussian position law.
ProtocolResult run_protocol_a(const ToaDistribution& dist, double t, const SimConfig& cfg);

/// Arrival times T_x = toa_map(xi), xi conditioned on xi <= x/sigma, binned and
/// compared against the arrival-time law.
ProtocolResult run_protocol_b(const ToaDistribution& dist, const SimConfig& cfg);

/// x_c(t) +/- 5 sigma(t).
BinSpec default_bins_protocol_a(const ToaDistribution& dist, double t, std::size_t n);

/// Arrival-time quantiles 1e-3 .. 1 - 1e-3.
BinSpec default_bins_protocol_b(const ToaDistribution& dist, std::size_t n);

}  // namespace toa

#endif  // TOA_PROTOCOL_SIM_HPP
