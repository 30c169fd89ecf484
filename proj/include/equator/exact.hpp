#pragma once

// Exact integer helpers backing the Wallis product: prime sieve, Legendre
// valuations, double factorials, product trees, and correctly rounded
// rational-to-double conversion.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "equator/errors.hpp"

namespace equator::exact {

using BigInt = boost::multiprecision::cpp_int;

/// Primes <= limit (sieve of Eratosthenes).
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t p = 2; p <= limit; ++p) {
    if (composite[p]) continue;
    primes.push_back(p);
    for (std::uint64_t q = p * p; q <= limit; q += p) composite[q] = true;
  }
  return primes;
}

/// Exponent of prime p in n! (Legendre).
inline std::uint64_t factorial_valuation(std::uint64_t n, std::uint64_t p) {
  std::uint64_t e = 0;
  while (n > 0) {
    n /= p;
    e += n;
  }
  return e;
}

/// Balanced product of the given factors; 1 for an empty list.
inline BigInt product_tree(std::vector<BigInt> factors) {
  if (factors.empty()) return BigInt(1);
  while (factors.size() > 1) {
    std::vector<BigInt> next;
    next.reserve((factors.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < factors.size(); i += 2) {
      next.push_back(factors[i] * factors[i + 1]);
    }
    if (factors.size() % 2 == 1) next.push_back(std::move(factors.back()));
    factors = std::move(next);
  }
  return std::move(factors.front());
}

/// n!! as an exact integer, 0!! = 1!! = 1.
inline BigInt double_factorial(std::uint64_t n) {
  std::vector<BigInt> terms;
  for (std::uint64_t k = n; k > 1; k -= 2) terms.emplace_back(k);
  return product_tree(std::move(terms));
}

/// num/den rounded to the nearest double, ties to even. Requires
/// num >= 0, den > 0 and a result in the normal range.
inline double to_double_nearest(const BigInt& num, const BigInt& den) {
  if (den <= 0 || num < 0) {
    throw DomainError("to_double_nearest: need num >= 0 and den > 0");
  }
  if (num == 0) return 0.0;
  // Scale so the integer quotient carries 54 or 55 significant bits.
  const long long shift = 54 - (static_cast<long long>(msb(num)) -
                                static_cast<long long>(msb(den)));
  BigInt scaled_num = num;
  BigInt scaled_den = den;
  if (shift > 0) {
    scaled_num <<= static_cast<unsigned>(shift);
  } else if (shift < 0) {
    scaled_den <<= static_cast<unsigned>(-shift);
  }
  BigInt q;
  BigInt r;
  divide_qr(scaled_num, scaled_den, q, r);
  bool sticky = r != 0;
  long long exponent = -shift;
  // Drop bits beyond 53, remembering the first dropped (guard) bit.
  const unsigned extra = static_cast<unsigned>(msb(q)) + 1 - 53;
  const BigInt dropped = q & ((BigInt(1) << extra) - 1);
  q >>= extra;
  exponent += extra;
  const BigInt half = BigInt(1) << (extra - 1);
  bool round_up = false;
  if (dropped > half) {
    round_up = true;
  } else if (dropped == half) {
    round_up = sticky || bit_test(q, 0);
  }
  if (round_up) q += 1;
  const auto mantissa = q.convert_to<std::uint64_t>();
  return std::ldexp(static_cast<double>(mantissa), static_cast<int>(exponent));
}

}  // namespace equator::exact
