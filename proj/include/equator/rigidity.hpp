#pragma once

// Equatorial rigidity index R_m = <csc theta>^{-1} of the highest-weight
// state, computed three independent ways:
//
//   product     (2/pi) W_m with W_m the exact rational Wallis partial product
//   gamma       Gamma(m+1)^2 / (Gamma(m+1/2) Gamma(m+3/2)) in log space
//   quadrature  I_{2m+1} / I_{2m} from two direct numerical integrals
//
// plus the defect 1 - R_m and the two-term large-m expansion.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "equator/errors.hpp"
#include "equator/exact.hpp"
#include "equator/numerics.hpp"
#include "equator/quantum_index.hpp"

namespace equator::rigidity {

using exact::BigInt;

/// pi to 36 significant digits. Kept as a literal so that nothing here
/// depends on the Wallis-based estimator.
inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Decimal truncation of pi: pi_lower_numerator() / pi_lower_denominator() < pi.
inline const BigInt& pi_lower_numerator() {
  static const BigInt value("314159265358979323846264338327950288");
  return value;
}
inline const BigInt& pi_lower_denominator() {
  static const BigInt value = boost::multiprecision::pow(BigInt(10), 35);
  return value;
}

inline constexpr std::uint64_t kDefaultExactCap = 100'000;

/// One Wallis factor (2k)^2 / ((2k-1)(2k+1)), already in lowest terms
/// since the numerator is even and the denominator odd and coprime to k.
struct WallisFactor {
  std::uint64_t numerator = 1;
  std::uint64_t denominator = 1;
  bool exceeds_one() const noexcept { return numerator > denominator; }
};

inline WallisFactor wallis_factor(std::uint64_t k) {
  return {4 * k * k, (2 * k - 1) * (2 * k + 1)};
}

/// Exact W_m = prod_{k=1}^m (2k)^2 / ((2k-1)(2k+1)) in lowest terms.
struct WallisPartial {
  QuantumIndex m;
  BigInt numerator{1};
  BigInt denominator{1};
  std::vector<WallisFactor> factors;

  double to_double() const {
    return exact::to_double_nearest(numerator, denominator);
  }
};

/// W_m = ((2m)!!)^2 / ((2m-1)!! (2m+1)!!), built from prime exponents so the
/// fraction comes out reduced without a big gcd:
///   W_m = 2^{4m} (m!)^4 / ((2m)! (2m+1)!).
inline WallisPartial wallis_partial(QuantumIndex m,
                                    std::uint64_t cap = kDefaultExactCap) {
  const std::uint64_t mm = m.value();
  if (mm > cap) {
    throw ResourceError("exact Wallis product requested for m = " +
                        std::to_string(mm) + " above cap " + std::to_string(cap));
  }
  WallisPartial out;
  out.m = m;
  out.factors.reserve(mm);
  for (std::uint64_t k = 1; k <= mm; ++k) out.factors.push_back(wallis_factor(k));

  std::vector<BigInt> up;
  std::vector<BigInt> down;
  for (std::uint64_t p : exact::primes_up_to(2 * mm + 1)) {
    long long e = 4 * static_cast<long long>(exact::factorial_valuation(mm, p)) -
                  static_cast<long long>(exact::factorial_valuation(2 * mm, p)) -
                  static_cast<long long>(exact::factorial_valuation(2 * mm + 1, p));
    if (p == 2) e += 4 * static_cast<long long>(mm);
    if (e > 0) {
      up.push_back(boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(e)));
    } else if (e < 0) {
      down.push_back(boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(-e)));
    }
  }
  out.numerator = exact::product_tree(std::move(up));
  out.denominator = exact::product_tree(std::move(down));
  return out;
}

/// Walks W_0, W_1, W_2, ... one factor at a time. The running fraction is
/// not reduced; its value is exact and rounding goes through the same
/// correctly rounded conversion.
class WallisSequence {
 public:
  std::uint64_t m() const noexcept { return m_; }
  const BigInt& numerator() const noexcept { return numerator_; }
  const BigInt& denominator() const noexcept { return denominator_; }

  void advance() {
    ++m_;
    const WallisFactor f = wallis_factor(m_);
    numerator_ *= f.numerator;
    denominator_ *= f.denominator;
  }

  double value() const {
    return exact::to_double_nearest(numerator_, denominator_);
  }

  /// Exact test of 2 W_m < pi against the decimal lower bound of pi.
  bool twice_below_pi() const {
    return 2 * numerator_ * pi_lower_denominator() <
           pi_lower_numerator() * denominator_;
  }

 private:
  std::uint64_t m_ = 0;
  BigInt numerator_{1};
  BigInt denominator_{1};
};

/// (2/pi) W_m from the exact rational.
inline double rigidity_product(QuantumIndex m,
                               std::uint64_t cap = kDefaultExactCap) {
  return 2.0 * wallis_partial(m, cap).to_double() / kPi;
}

/// exp of the summed log-Gamma ratios.
inline double rigidity_gamma(QuantumIndex m) {
  return std::exp(numerics::log_gamma_half_ratio(m.value()).sum());
}

/// I_{2m+1} / I_{2m}, both integrals by adaptive quadrature.
inline double rigidity_quadrature(QuantumIndex m, double rel_tol = 1e-12) {
  const double odd = static_cast<double>(2 * m.value() + 1);
  const double even = static_cast<double>(2 * m.value());
  auto odd_power = [odd](double t) { return std::pow(std::sin(t), odd); };
  auto even_power = [even](double t) { return std::pow(std::sin(t), even); };
  const double top =
      numerics::integrate(odd_power, 0.0, std::numbers::pi, rel_tol, 0.0).value;
  const double bottom =
      numerics::integrate(even_power, 0.0, std::numbers::pi, rel_tol, 0.0).value;
  return top / bottom;
}

/// 1 - 1/(4m) + 5/(32 m^2); defined for m >= 1.
inline double rigidity_asymptotic(QuantumIndex m) {
  if (m.value() == 0) {
    throw DomainError("rigidity_asymptotic: expansion needs m >= 1");
  }
  const double md = m.as_double();
  return 1.0 - 1.0 / (4.0 * md) + 5.0 / (32.0 * md * md);
}

/// 1 - R_m via expm1 on the log-Gamma route.
inline double defect(QuantumIndex m) {
  return -std::expm1(numerics::log_gamma_half_ratio(m.value()).sum());
}

/// 2 W_m, which tends to pi with error pi (1 - R_m) ~ pi / (4m).
inline double pi_estimate(QuantumIndex m, std::uint64_t cap = kDefaultExactCap) {
  return 2.0 * wallis_partial(m, cap).to_double();
}

// ---------------------------------------------------------------------------
// Convergence table

struct RigidityReport {
  QuantumIndex m;
  std::optional<double> via_product;
  double via_gamma = 0.0;
  std::optional<double> via_quadrature;  // empty above the quadrature cutoff
  std::optional<double> asymptotic;      // empty at m = 0
  double defect = 0.0;
  double cross_route_spread = 0.0;
  std::optional<std::string> error;      // set when a route failed
};

struct ConvergenceOptions {
  double rel_tol = 1e-12;
  std::uint64_t quadrature_cutoff = 10'000;
  std::uint64_t exact_cap = kDefaultExactCap;
  unsigned threads = 0;  // 0 = hardware concurrency
};

inline RigidityReport rigidity_report(QuantumIndex m,
                                      const ConvergenceOptions& opts = {}) {
  RigidityReport row;
  row.m = m;
  try {
    row.via_gamma = rigidity_gamma(m);
    row.defect = defect(m);
    if (m.value() > 0) row.asymptotic = rigidity_asymptotic(m);
    row.via_product = rigidity_product(m, opts.exact_cap);
    if (m.value() <= opts.quadrature_cutoff) {
      row.via_quadrature = rigidity_quadrature(m, opts.rel_tol);
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  std::vector<double> routes{row.via_gamma};
  if (row.via_product) routes.push_back(*row.via_product);
  if (row.via_quadrature) routes.push_back(*row.via_quadrature);
  const auto [lo, hi] = std::minmax_element(routes.begin(), routes.end());
  row.cross_route_spread = *hi - *lo;
  return row;
}

/// One report per requested m, in input order. Rows are evaluated on a
/// small worker pool; a failing row records its error and the rest proceed.
inline std::vector<RigidityReport> convergence_table(
    const std::vector<QuantumIndex>& m_values,
    const ConvergenceOptions& opts = {}) {
  if (m_values.empty()) {
    throw DomainError("convergence_table: empty list of m values");
  }
  std::vector<RigidityReport> rows(m_values.size());
  unsigned workers = opts.threads != 0 ? opts.threads
                                       : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, m_values.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < m_values.size(); i = next++) {
      rows[i] = rigidity_report(m_values[i], opts);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return rows;
}

}  // namespace equator::rigidity
