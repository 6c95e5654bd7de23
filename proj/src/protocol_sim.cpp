#include "toa/protocol_sim.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "toa/errors.hpp"

namespace toa {

void SimConfig::validate() const {
  if (n_trials < 1) throw ValidationError("n_trials must be >= 1");
  if (!(bins.width > 0.0) || !std::isfinite(bins.width)) throw ValidationError("bin width must be > 0");
  if (!std::isfinite(bins.min)) throw ValidationError("bin minimum must be finite");
  if (bins.n < 1) throw ValidationError("number of bins must be >= 1");
}

std::mt19937_64 shard_engine(std::uint64_t seed, std::uint64_t shard_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard_index), static_cast<std::uint32_t>(shard_index >> 32)};
  return std::mt19937_64(seq);
}

Histogram make_histogram(const BinSpec& bins) {
  Histogram h;
  h.edges.resize(bins.n + 1);
  for (std::size_t i = 0; i <= bins.n; ++i) h.edges[i] = bins.min + static_cast<double>(i) * bins.width;
  h.counts.assign(bins.n, 0);
  return h;
}

void Histogram::add(double value) {
  ++n_total;
  const double width = (edges.back() - edges.front()) / static_cast<double>(counts.size());
  if (value < edges.front()) {
    ++n_below;
    return;
  }
  const double pos = (value - edges.front()) / width;
  if (!(pos < static_cast<double>(counts.size()))) {
    ++n_above;
    return;
  }
  ++counts[static_cast<std::size_t>(pos)];
}

void Histogram::merge(const Histogram& other) {
  if (other.counts.size() != counts.size()) throw ValidationError("histogram merge: binning mismatch");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  n_total += other.n_total;
  n_below += other.n_below;
  n_above += other.n_above;
}

void RunningMoments::add(double x) {
  const std::uint64_t n1 = n_;
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double delta_n = delta / n;
  const double delta_n2 = delta_n * delta_n;
  const double term1 = delta * delta_n * static_cast<double>(n1);
  mean_ += delta_n;
  m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ - 4.0 * delta_n * m3_;
  m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
  m2_ += term1;
}

void RunningMoments::merge(const RunningMoments& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  const double d2 = delta * delta;
  const double d3 = d2 * delta;
  const double d4 = d2 * d2;
  const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) +
                    3.0 * delta * (na * o.m2_ - nb * m2_) / n;
  const double m4 = m4_ + o.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) +
                    4.0 * delta * (na * o.m3_ - nb * m3_) / n;
  mean_ += delta * nb / n;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
  n_ += o.n_;
}

double RunningMoments::std_error_mean() const {
  return n_ > 1 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
}

double RunningMoments::std_error_std() const {
  if (n_ < 2) return 0.0;
  const double s2 = variance();
  const double excess = std::max(central_moment4() - s2 * s2, 0.0);
  return std::sqrt(excess / (4.0 * s2 * static_cast<double>(n_)));
}

namespace {

struct ShardResult {
  Histogram histogram;
  RunningMoments stats;
};

// Runs `draw(rng)` n_trials times across fixed shards and merges in shard order,
// so the outcome is independent of the thread count.
template <class Draw>
ProtocolResult run_sharded(const SimConfig& cfg, Draw draw) {
  cfg.validate();
  const std::uint64_t n_shards = (cfg.n_trials + kShardSize - 1) / kShardSize;
  std::vector<ShardResult> shards(n_shards);

  auto run_shard = [&](std::uint64_t s) {
    auto rng = shard_engine(cfg.seed, s);
    ShardResult out{make_histogram(cfg.bins), {}};
    const std::uint64_t begin = s * kShardSize;
    const std::uint64_t end = std::min(cfg.n_trials, begin + kShardSize);
    auto sampler = draw.make_sampler();
    for (std::uint64_t i = begin; i < end; ++i) {
      const double v = draw(sampler, rng);
      out.histogram.add(v);
      out.stats.add(v);
    }
    shards[s] = std::move(out);
  };

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_shards));
  if (threads <= 1) {
    for (std::uint64_t s = 0; s < n_shards; ++s) run_shard(s);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t s = next++; s < n_shards; s = next++) run_shard(s);
      });
    }
  }

  ProtocolResult res;
  res.histogram = make_histogram(cfg.bins);
  for (const auto& shard : shards) {
    res.histogram.merge(shard.histogram);
    res.stats.merge(shard.stats);
  }
  return res;
}

}  // namespace

ProtocolResult run_protocol_a(const ToaDistribution& dist, double t, const SimConfig& cfg) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("protocol A time must be >= 0");
  const double mean = dist.position_mean(t);
  const double spread = dist.position_sigma(t);

  struct Draw {
    double mean;
    double spread;
    std::normal_distribution<double> make_sampler() const { return {}; }
    double operator()(std::normal_distribution<double>& normal, std::mt19937_64& rng) const {
      return mean + spread * normal(rng);
    }
  };
  ProtocolResult res = run_sharded(cfg, Draw{mean, spread});

  auto& h = res.histogram;
  h.analytic_mass.resize(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    h.analytic_mass[i] = normal::mass((h.edges[i] - mean) / spread, (h.edges[i + 1] - mean) / spread);
  }
  res.chi2 = chi_square_test(h.counts, h.analytic_mass, h.n_overflow(), h.n_total);
  return res;
}

ProtocolResult run_protocol_b(const ToaDistribution& dist, const SimConfig& cfg) {
  struct Draw {
    const ToaDistribution* dist;
    SamplingMethod method;
    ConditionedNormalSampler make_sampler() const { return ConditionedNormalSampler(dist->xi_upper(), method); }
    double operator()(ConditionedNormalSampler& sampler, std::mt19937_64& rng) const {
      return dist->toa_map(XiValue(sampler(rng)));
    }
  };
  ProtocolResult res = run_sharded(cfg, Draw{&dist, cfg.method});

  auto& h = res.histogram;
  h.analytic_mass.resize(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    h.analytic_mass[i] = std::max(0.0, dist.toa_cdf(h.edges[i + 1]) - dist.toa_cdf(h.edges[i]));
  }
  res.chi2 = chi_square_test(h.counts, h.analytic_mass, h.n_overflow(), h.n_total);
  return res;
}

BinSpec default_bins_protocol_a(const ToaDistribution& dist, double t, std::size_t n) {
  const double spread = dist.position_sigma(t);
  return {dist.position_mean(t) - 5.0 * spread, 10.0 * spread / static_cast<double>(n), n};
}

BinSpec default_bins_protocol_b(const ToaDistribution& dist, std::size_t n) {
  const double lo = dist.toa_quantile(1e-3);
  const double hi = dist.toa_quantile(1.0 - 1e-3);
  return {lo, (hi - lo) / static_cast<double>(n), n};
}

}  // namespace toa
