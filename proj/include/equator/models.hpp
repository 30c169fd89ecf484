#pragma once

// Physical realizations of the highest-weight angular problem: the rigid
// rotor and the surface sector of a thin spherical shell. Units: hbar = 1,
// energies in hbar^2 / (mass * length^2).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "equator/errors.hpp"

namespace equator::models {

inline constexpr std::string_view kUnitConvention =
    "hbar = 1; energy in hbar^2/(mass*length^2)";

class RotorConfig {
 public:
  static RotorConfig from_inertia(double moment_of_inertia) {
    return RotorConfig(moment_of_inertia);
  }
  /// I = M R^2.
  static RotorConfig from_mass_radius(double mass, double radius) {
    if (!(mass > 0.0) || !(radius > 0.0)) {
      throw DomainError("rotor mass and radius must be positive");
    }
    return RotorConfig(mass * (radius * radius));
  }
  double moment_of_inertia() const noexcept { return inertia_; }

 private:
  explicit RotorConfig(double inertia) : inertia_(inertia) {
    if (!(inertia > 0.0) || !std::isfinite(inertia)) {
      throw DomainError("moment of inertia must be positive and finite");
    }
  }
  double inertia_;
};

struct SpectrumEntry {
  std::uint64_t ell = 0;
  double energy = 0.0;
  bool offset_included = false;
};

namespace detail {

// l(l+1) / (2 I); shared so rotor and shell agree bit for bit.
inline double angular_energy(std::uint64_t ell, double inertia) {
  const double l = static_cast<double>(ell);
  return l * (l + 1.0) / (2.0 * inertia);
}

}  // namespace detail

/// E_l = l(l+1) / (2I), independent of m.
inline SpectrumEntry rotor_energy(std::uint64_t ell, const RotorConfig& cfg) {
  return {ell, detail::angular_energy(ell, cfg.moment_of_inertia()), false};
}

// ---------------------------------------------------------------------------
// Tabulated integration

/// Composite Simpson rule on an arbitrary strictly increasing grid. Pairs
/// of intervals use the non-uniform Simpson weights; a trailing single
/// interval is integrated with the quadratic through the last three nodes.
inline double integrate_tabulated(std::span<const double> x,
                                  std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3) {
    throw ProfileError("tabulated integration needs >= 3 matching samples");
  }
  double total = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = x[i + 1] - x[i];
    const double h1 = x[i + 2] - x[i + 1];
    const double span = h0 + h1;
    total += span / 6.0 *
             ((2.0 - h1 / h0) * y[i] + span * span / (h0 * h1) * y[i + 1] +
              (2.0 - h0 / h1) * y[i + 2]);
  }
  if (i + 1 < n) {
    // Last interval [x_{n-2}, x_{n-1}] using nodes n-3, n-2, n-1.
    const double h0 = x[n - 2] - x[n - 3];
    const double h1 = x[n - 1] - x[n - 2];
    total += h1 / 6.0 *
             (-(h1 * h1) / (h0 * (h0 + h1)) * y[n - 3] +
              (3.0 + h1 / h0) * y[n - 2] +
              (3.0 - h1 / (h0 + h1)) * y[n - 1]);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Thin shell

/// Tabulated radial ground mode f_0(r). Real-valued only; phases of a
/// complex radial mode never enter |f_0|^2.
class RadialProfile {
 public:
  static constexpr std::size_t kMinPoints = 4;
  static constexpr double kTailFraction = 1e-3;

  RadialProfile(std::vector<double> r_grid, std::vector<double> f0_values,
                double declared_norm_tol = 1e-9)
      : r_(std::move(r_grid)), f_(std::move(f0_values)), norm_tol_(declared_norm_tol) {
    if (r_.size() != f_.size()) {
      throw ProfileError("r and f0 columns differ in length");
    }
    if (r_.size() < kMinPoints) {
      throw ProfileError("radial profile needs at least " +
                         std::to_string(kMinPoints) + " points, got " +
                         std::to_string(r_.size()));
    }
    for (std::size_t i = 0; i < r_.size(); ++i) {
      if (!std::isfinite(r_[i]) || !std::isfinite(f_[i])) {
        throw ProfileError("non-finite value at point " + std::to_string(i));
      }
      if (r_[i] < 0.0) {
        throw ProfileError("negative radius at point " + std::to_string(i));
      }
      if (i > 0 && !(r_[i] > r_[i - 1])) {
        throw ProfileError("r grid not strictly increasing at point " +
                           std::to_string(i));
      }
    }
    if (!(norm_tol_ > 0.0)) {
      throw ProfileError("declared normalization tolerance must be positive");
    }
    double peak = 0.0;
    for (double v : f_) peak = std::max(peak, std::abs(v));
    if (!(peak > 0.0)) {
      throw ProfileError("radial profile is identically zero");
    }
    tails_truncated_ = std::abs(f_.front()) >= kTailFraction * peak ||
                       std::abs(f_.back()) >= kTailFraction * peak;
  }

  std::span<const double> r_grid() const noexcept { return r_; }
  std::span<const double> f0_values() const noexcept { return f_; }
  double declared_norm_tol() const noexcept { return norm_tol_; }
  /// Factor applied to the raw f0 column by normalized(); 1 if none.
  double scale_factor() const noexcept { return scale_; }
  /// |f0| at a grid end is not small against its maximum.
  bool tails_truncated() const noexcept { return tails_truncated_; }

  /// integral of r^2 |f0|^2 dr.
  double norm() const {
    std::vector<double> weighted(r_.size());
    for (std::size_t i = 0; i < r_.size(); ++i) {
      weighted[i] = r_[i] * r_[i] * f_[i] * f_[i];
    }
    return integrate_tabulated(r_, weighted);
  }

  bool is_normalized() const { return std::abs(norm() - 1.0) <= norm_tol_; }

  /// Copy rescaled so that the norm is 1; records the applied factor.
  RadialProfile normalized() const {
    if (is_normalized()) return *this;
    const double factor = 1.0 / std::sqrt(norm());
    RadialProfile out = *this;
    for (double& v : out.f_) v *= factor;
    out.scale_ = scale_ * factor;
    return out;
  }

 private:
  std::vector<double> r_;
  std::vector<double> f_;
  double norm_tol_;
  double scale_ = 1.0;
  bool tails_truncated_ = false;
};

/// <r^-2>_0 = integral of |f0|^2 dr (the r^2 measure cancels r^-2).
inline double r_minus2_expectation(const RadialProfile& p) {
  if (!p.is_normalized()) {
    throw ProfileError("radial profile is not normalized (norm " +
                       std::to_string(p.norm()) + ")");
  }
  const auto f = p.f0_values();
  std::vector<double> squared(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) squared[i] = f[i] * f[i];
  return integrate_tabulated(p.r_grid(), squared);
}

struct ShellReduction {
  double r_minus2_expectation = 0.0;
  double effective_radius = 0.0;
  double radial_ground_energy = 0.0;
};

/// Projects onto the frozen radial mode: R_eff = <r^-2>^{-1/2}. The radial
/// ground energy is caller-supplied.
inline ShellReduction shell_reduce(const RadialProfile& p,
                                   double radial_ground_energy) {
  const double expectation = r_minus2_expectation(p);
  return {expectation, 1.0 / std::sqrt(expectation), radial_ground_energy};
}

/// E_l = E_r + l(l+1) / (2 M R_eff^2).
inline SpectrumEntry shell_spectrum(std::uint64_t ell, double mass,
                                    const ShellReduction& reduction) {
  if (!(mass > 0.0)) {
    throw DomainError("shell_spectrum: mass must be positive");
  }
  const double inertia =
      mass * (reduction.effective_radius * reduction.effective_radius);
  return {ell,
          reduction.radial_ground_energy + detail::angular_energy(ell, inertia),
          true};
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_cell(std::string_view cell, std::size_t row,
                         std::string_view column) {
  cell = trim(cell);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
    throw ParseError("row " + std::to_string(row) + ": column " +
                         std::string(column) + " is not a number: '" +
                         std::string(cell) + "'",
                     row);
  }
  return value;
}

}  // namespace detail

/// Reads the `r,f0` CSV: header line first, `#` comment lines and blank
/// lines skipped. The result is normalized; scale_factor() reports the
/// rescaling applied to the raw column.
inline RadialProfile load_radial_profile(std::istream& in,
                                         double declared_norm_tol = 1e-9) {
  std::vector<double> r;
  std::vector<double> f;
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (!header_seen) {
      if (view != "r,f0") {
        throw ParseError("row " + std::to_string(row) +
                             ": expected header 'r,f0', got '" + std::string(view) + "'",
                         row);
      }
      header_seen = true;
      continue;
    }
    const auto comma = view.find(',');
    if (comma == std::string_view::npos ||
        view.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError("row " + std::to_string(row) + ": expected two fields", row);
    }
    r.push_back(detail::parse_cell(view.substr(0, comma), row, "r"));
    f.push_back(detail::parse_cell(view.substr(comma + 1), row, "f0"));
  }
  if (!header_seen) {
    throw ParseError("missing 'r,f0' header", 0);
  }
  return RadialProfile(std::move(r), std::move(f), declared_norm_tol).normalized();
}

}  // namespace equator::models
