#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <string>

#include "equator/errors.hpp"

namespace equator {

/// Magnetic quantum number m on the highest-weight branch (m = l >= 0).
///
/// Implicitly constructible from any integer so call sites can pass
/// literals; negative values throw DomainError instead of wrapping.
class QuantumIndex {
 public:
  constexpr QuantumIndex() = default;

  template <std::integral T>
  constexpr QuantumIndex(T m) : m_(checked(m)) {}  // NOLINT(implicit)

  constexpr std::uint64_t value() const noexcept { return m_; }
  constexpr double as_double() const noexcept { return static_cast<double>(m_); }

  constexpr auto operator<=>(const QuantumIndex&) const = default;

 private:
  template <std::integral T>
  static constexpr std::uint64_t checked(T m) {
    if constexpr (std::signed_integral<T>) {
      if (m < 0) {
        throw DomainError("quantum index must be non-negative, got " +
                          std::to_string(m));
      }
    }
    return static_cast<std::uint64_t>(m);
  }

  std::uint64_t m_ = 0;
};

}  // namespace equator
