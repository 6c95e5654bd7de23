#ifndef TOA_QUADRATURE_HPP
#define TOA_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "toa/errors.hpp"

namespace toa::quad {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t n_evals = 0;
};

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  std::size_t max_subdivisions = 5000;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  double abs_value;  // integral of |f|, for the roundoff floor
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double result_k = fc * kWgk[10];
  double result_g = 0.0;
  double result_abs = std::abs(result_k);
  std::array<double, 10> f1{};
  std::array<double, 10> f2{};
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double v1 = f(center - dx);
    const double v2 = f(center + dx);
    f1[j] = v1;
    f2[j] = v2;
    result_k += kWgk[j] * (v1 + v2);
    result_abs += kWgk[j] * (std::abs(v1) + std::abs(v2));
    if (j % 2 == 1) result_g += kWg[j / 2] * (v1 + v2);
  }
  const double mean = 0.5 * result_k;
  double result_asc = kWgk[10] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 10; ++j) {
    result_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  result_k *= half;
  result_g *= half;
  result_abs *= std::abs(half);
  result_asc *= std::abs(half);

  double err = std::abs(result_k - result_g);
  if (result_asc != 0.0 && err != 0.0) {
    err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (result_abs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * result_abs, err);
  }
  if (!std::isfinite(result_k)) {
    throw QuadratureError("integrand produced a non-finite value", result_k, err);
  }
  return {a, b, result_k, err, result_abs};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (21-point) integration over the pieces
/// [breaks[0], breaks[1]], ..., [breaks[n-2], breaks[n-1]].
///
/// Converges when the summed error estimate is below
/// max(abs_tol, rel_tol |I|), or below the roundoff floor 50 eps int|f|
/// (cancelling integrands such as odd moments). Throws QuadratureError when
/// the subdivision budget runs out first.
///
/// Reentrant: all workspace is local.
template <class F>
Result integrate(F&& f, std::span<const double> breaks, const Options& opts = {}) {
  if (breaks.size() < 2) throw ValidationError("integrate: need at least two break points");
  std::priority_queue<detail::Segment> heap;
  Result res;
  double total = 0.0;
  double total_err = 0.0;
  double total_abs = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i] < breaks[i + 1])) {
      if (breaks[i] == breaks[i + 1]) continue;
      throw ValidationError("integrate: break points must be increasing");
    }
    auto seg = detail::gauss_kronrod21(f, breaks[i], breaks[i + 1]);
    res.n_evals += 21;
    total += seg.value;
    total_err += seg.error;
    total_abs += seg.abs_value;
    heap.push(seg);
  }

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  auto converged = [&] {
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    return total_err <= target || total_err <= 50.0 * kEps * total_abs;
  };

  std::size_t subdivisions = 0;
  while (!heap.empty() && !converged()) {
    if (subdivisions >= opts.max_subdivisions) {
      std::ostringstream msg;
      msg << "adaptive quadrature did not converge after " << subdivisions
          << " subdivisions (estimate " << total << " +/- " << total_err << ")";
      throw QuadratureError(msg.str(), total, total_err);
    }
    const detail::Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      throw QuadratureError("adaptive quadrature: interval cannot be subdivided further", total,
                            total_err);
    }
    heap.pop();
    auto left = detail::gauss_kronrod21(f, worst.a, mid);
    auto right = detail::gauss_kronrod21(f, mid, worst.b);
    res.n_evals += 42;
    ++subdivisions;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_abs += left.abs_value + right.abs_value - worst.abs_value;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift of the running updates.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  res.value = value;
  res.abs_error = err;
  return res;
}

template <class F>
Result integrate(F&& f, std::initializer_list<double> breaks, const Options& opts = {}) {
  return integrate(std::forward<F>(f), std::span<const double>(breaks.begin(), breaks.size()), opts);
}

}  // namespace toa::quad

#endif  // TOA_QUADRATURE_HPP
