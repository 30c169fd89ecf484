#pragma once

// Special-function kernels and the adaptive quadrature engine.
//
// Everything factorial-shaped is evaluated as a compensated sum of logs, so
// values stay finite for arguments in the millions and remain comparable
// against exact integer oracles at small arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "equator/errors.hpp"

namespace equator::numerics {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// ln(n!!), with 0!! = 1!! = 1.
inline double log_double_factorial(std::uint64_t n) {
  CompensatedSum acc;
  for (std::uint64_t k = n; k > 1; k -= 2) {
    acc += std::log(static_cast<double>(k));
  }
  return acc.value();
}

namespace detail {

// ln((2m-1)!!/(2m)!!) = sum_{k=1}^m ln(1 - 1/(2k)).
inline double log_odd_over_even(std::uint64_t m) {
  CompensatedSum acc;
  for (std::uint64_t k = 1; k <= m; ++k) {
    acc += std::log1p(-0.5 / static_cast<double>(k));
  }
  return acc.value();
}

// ln((2m)!!/(2m+1)!!) = -sum_{k=1}^m ln(1 + 1/(2k)).
inline double log_even_over_odd(std::uint64_t m) {
  CompensatedSum acc;
  for (std::uint64_t k = 1; k <= m; ++k) {
    acc += -std::log1p(0.5 / static_cast<double>(k));
  }
  return acc.value();
}

}  // namespace detail

enum class IntegralRoute { closed_form, quadrature };

/// I_n = integral of sin^n over [0, pi].
struct SineIntegralValue {
  std::uint64_t n = 0;
  double value = 0.0;
  IntegralRoute route = IntegralRoute::closed_form;
};

/// ln I_n from the double-factorial closed forms:
///   I_{2m}   = pi (2m-1)!!/(2m)!!
///   I_{2m+1} = 2 (2m)!!/(2m+1)!!
inline double log_sine_integral(std::uint64_t n) {
  const std::uint64_t m = n / 2;
  if (n % 2 == 0) {
    return std::log(std::numbers::pi) + detail::log_odd_over_even(m);
  }
  return std::numbers::ln2 + detail::log_even_over_odd(m);
}

inline SineIntegralValue sine_integral_closed(std::uint64_t n) {
  return {n, std::exp(log_sine_integral(n)), IntegralRoute::closed_form};
}

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::uint64_t evaluations = 0;
};

struct QuadratureOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  std::uint64_t max_evaluations = 1'000'000;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair (QUADPACK qk15 constants).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod_panel(F& f, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = static_cast<double>(f(centre));
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = static_cast<double>(f(centre - dx)) +
                        static_cast<double>(f(centre + dx));
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  if (!std::isfinite(kronrod)) {
    throw NonConvergence("integrand is not finite on [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]");
  }
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

inline constexpr std::uint64_t kEvaluationsPerPanel = 15;

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature.
///
/// The panel with the largest error is bisected until the summed
/// |K15 - G7| estimate drops below max(abs_tol, rel_tol * |value|). The
/// estimate bounds the error of the lower-order rule, so on smooth
/// integrands it overstates the true error of the returned K15 sum.
/// Throws NonConvergence when the evaluation budget runs out.
template <class F>
QuadratureResult integrate(F&& f, double a, double b,
                           const QuadratureOptions& opts = {}) {
  if (!(a < b)) {
    throw DomainError("integrate: require a < b");
  }
  std::priority_queue<detail::Panel> panels;
  panels.push(detail::gauss_kronrod_panel(f, a, b));
  std::uint64_t evaluations = detail::kEvaluationsPerPanel;

  double running_value = panels.top().value;
  double running_error = panels.top().error;
  auto tolerance = [&opts](double value) {
    return std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
  };

  for (;;) {
    if (running_error <= tolerance(running_value)) {
      // Confirm against a fresh compensated sum; incremental updates drift.
      CompensatedSum value;
      CompensatedSum error;
      auto copy = panels;
      for (; !copy.empty(); copy.pop()) {
        value += copy.top().value;
        error += copy.top().error;
      }
      running_value = value.value();
      running_error = error.value();
      if (running_error <= tolerance(running_value)) {
        return {running_value, running_error, evaluations};
      }
    }
    if (evaluations + 2 * detail::kEvaluationsPerPanel > opts.max_evaluations) {
      throw NonConvergence("integrate: evaluation budget of " +
                           std::to_string(opts.max_evaluations) +
                           " exhausted (error estimate " +
                           std::to_string(running_error) + ")");
    }
    const detail::Panel worst = panels.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi)) {
      throw NonConvergence("integrate: panel width reached machine resolution");
    }
    panels.pop();
    const auto left = detail::gauss_kronrod_panel(f, worst.lo, mid);
    const auto right = detail::gauss_kronrod_panel(f, mid, worst.hi);
    panels.push(left);
    panels.push(right);
    evaluations += 2 * detail::kEvaluationsPerPanel;
    running_value += left.value + right.value - worst.value;
    running_error += left.error + right.error - worst.error;
  }
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, double rel_tol,
                           double abs_tol) {
  QuadratureOptions opts;
  opts.rel_tol = rel_tol;
  opts.abs_tol = abs_tol;
  return integrate(std::forward<F>(f), a, b, opts);
}

/// I_n by direct quadrature of sin^n; independent of the closed forms.
inline SineIntegralValue sine_integral_quadrature(std::uint64_t n,
                                                  double rel_tol = 1e-12) {
  const double power = static_cast<double>(n);
  auto integrand = [power](double theta) {
    return std::pow(std::sin(theta), power);
  };
  const auto result =
      integrate(integrand, 0.0, std::numbers::pi, rel_tol, 0.0);
  return {n, result.value, IntegralRoute::quadrature};
}

/// Log-Gamma ratios split the way the rigidity index factors:
///   over_half          = ln Gamma(m+1) - ln Gamma(m+1/2)
///   over_three_halves  = ln Gamma(m+1) - ln Gamma(m+3/2)
struct LogGammaRatios {
  double over_half = 0.0;
  double over_three_halves = 0.0;
  double sum() const noexcept { return over_half + over_three_halves; }
};

/// Uses the half-integer ladder Gamma(k+1/2) = (2k-1)!! sqrt(pi) / 2^k and
/// Gamma(m+1) = (2m)!! / 2^m, so both ratios reduce to double-factorial
/// quotients summed in log space.
inline LogGammaRatios log_gamma_half_ratio(std::uint64_t m) {
  const double log_sqrt_pi = 0.5 * std::log(std::numbers::pi);
  LogGammaRatios out;
  out.over_half = -detail::log_odd_over_even(m) - log_sqrt_pi;
  out.over_three_halves =
      detail::log_even_over_odd(m) + std::numbers::ln2 - log_sqrt_pi;
  return out;
}

}  // namespace equator::numerics
