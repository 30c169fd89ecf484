#pragma once

// Highest-weight spherical kinematics.
//
// On the branch m = l the azimuthal dependence drops out of |Y_mm|^2, and
// the polar marginal is P_m(theta) = sin^{2m+1}(theta) / I_{2m+1}. All
// quantities here are functions of theta alone.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "equator/errors.hpp"
#include "equator/numerics.hpp"
#include "equator/quantum_index.hpp"

namespace equator::spherical {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// Radius of the sphere carrying the angular problem (R for the rotor,
/// R_0 or R_eff for a thin shell).
class SphereGeometry {
 public:
  explicit SphereGeometry(double radius) : radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
      throw DomainError("sphere radius must be positive and finite");
    }
  }
  double radius() const noexcept { return radius_; }
  /// Cylindrical radius rho = R sin(theta).
  double rho(double theta) const { return radius_ * std::sin(theta); }
  /// Height above the equatorial plane z = R cos(theta).
  double height(double theta) const { return radius_ * std::cos(theta); }

 private:
  double radius_;
};

/// Normalized polar marginal P_m(theta) = sin^{2m+1}(theta) / I_{2m+1}.
class PolarDensity {
 public:
  explicit PolarDensity(QuantumIndex m)
      : m_(m),
        exponent_(2.0 * m.as_double() + 1.0),
        log_norm_(-numerics::log_sine_integral(2 * m.value() + 1)) {}

  QuantumIndex m() const noexcept { return m_; }
  double log_norm() const noexcept { return log_norm_; }

  /// Evaluates in log space; the poles return exactly 0.
  double operator()(double theta) const {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
      throw DomainError("polar angle outside [0, pi]: " + std::to_string(theta));
    }
    if (theta == 0.0 || theta == std::numbers::pi) return 0.0;
    // Reflect into [0, pi/2] so that theta and pi - theta see the same sine.
    const double folded = theta > kHalfPi ? std::numbers::pi - theta : theta;
    const double log_density = exponent_ * std::log(std::sin(folded)) + log_norm_;
    return log_density < -745.0 ? 0.0 : std::exp(log_density);
  }

 private:
  QuantumIndex m_;
  double exponent_;
  double log_norm_;
};

inline double density_at(const PolarDensity& d, double theta) { return d(theta); }

/// <f> = integral of f(theta) P_m(theta) over [0, pi], by quadrature.
template <class F>
double expectation(QuantumIndex m, F&& f, double rel_tol = 1e-12) {
  const PolarDensity density(m);
  auto weighted = [&](double theta) { return f(theta) * density(theta); };
  return numerics::integrate(weighted, 0.0, std::numbers::pi, rel_tol, 1e-15)
      .value;
}

/// <csc theta> = I_{2m} / I_{2m+1}, the inverse of the rigidity index.
inline double csc_expectation(QuantumIndex m) {
  const std::uint64_t n = 2 * m.value();
  return std::exp(numerics::log_sine_integral(n) -
                  numerics::log_sine_integral(n + 1));
}

/// <z^2> = R^2 / (2m + 3).
inline double z_second_moment(QuantumIndex m, const SphereGeometry& g) {
  return g.radius() * g.radius() / (2.0 * m.as_double() + 3.0);
}

/// Equatorial Gaussian P_m(pi/2) exp(-(2m+1) x^2 / 2), x = theta - pi/2.
inline double gaussian_approx(QuantumIndex m, double x) {
  if (!(std::abs(x) <= kHalfPi)) {
    throw DomainError("gaussian_approx: |x| must not exceed pi/2");
  }
  const PolarDensity density(m);
  const double peak = density(kHalfPi);
  return peak * std::exp(-(2.0 * m.as_double() + 1.0) * x * x / 2.0);
}

/// Characteristic angular width (2m+1)^{-1/2}.
inline double angular_width(QuantumIndex m) {
  return 1.0 / std::sqrt(2.0 * m.as_double() + 1.0);
}

/// <L_z> / sqrt(<L^2>) = sqrt(m / (m+1)).
inline double alignment_ratio(QuantumIndex m) {
  const double md = m.as_double();
  return std::sqrt(md / (md + 1.0));
}

// ---------------------------------------------------------------------------
// Sampling

struct SampleBatch {
  QuantumIndex m;
  std::uint64_t seed = 0;
  std::vector<double> thetas;
};

/// Mean of f over a sample with its standard error (sample stddev / sqrt(n)).
struct MomentEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

template <class F>
MomentEstimate sample_moment(std::span<const double> thetas, F&& f) {
  // Welford.
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t n = 0;
  for (double theta : thetas) {
    const double v = f(theta);
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  if (n < 2) return {mean, std::numeric_limits<double>::infinity()};
  const double variance = m2 / static_cast<double>(n - 1);
  return {mean, std::sqrt(variance / static_cast<double>(n))};
}

struct SamplerOptions {
  std::size_t grid_points = 4096;
  std::uint64_t max_count = 100'000'000;
};

/// Inverse-CDF sampler for P_m.
///
/// The cumulative distribution is tabulated on a uniform theta grid. A draw
/// u locates its cell by binary search, takes a first guess from the
/// monotone (Fritsch-Carlson) cubic Hermite interpolant of the table, and
/// is then polished by safeguarded Newton steps against the exact density.
class PolarSampler {
 public:
  explicit PolarSampler(QuantumIndex m, SamplerOptions opts = {})
      : density_(m), opts_(opts) {
    if (opts_.grid_points < 2) {
      throw DomainError("sampler grid needs at least two points");
    }
    const std::size_t n = opts_.grid_points;
    step_ = std::numbers::pi / static_cast<double>(n - 1);
    grid_.resize(n);
    cdf_.assign(n, 0.0);
    pdf_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      grid_[i] = i + 1 == n ? std::numbers::pi : static_cast<double>(i) * step_;
      pdf_[i] = density_(grid_[i]);
    }
    numerics::CompensatedSum acc;
    for (std::size_t i = 1; i < n; ++i) {
      acc += cell_integral(grid_[i - 1], grid_[i]);
      cdf_[i] = acc.value();
    }
    total_ = cdf_.back();
  }

  QuantumIndex m() const noexcept { return density_.m(); }
  const PolarDensity& density() const noexcept { return density_; }

  /// Maps u in (0, 1) to theta with F(theta) = u.
  double quantile(double u) const {
    const double target = u * total_;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
    std::size_t cell = it == cdf_.begin() ? 0
                                          : static_cast<std::size_t>(it - cdf_.begin()) - 1;
    cell = std::min(cell, grid_.size() - 2);
    const double lo = grid_[cell];
    const double hi = grid_[cell + 1];
    const double base = cdf_[cell];

    double theta = hermite_guess(cell, target);
    double bracket_lo = lo;
    double bracket_hi = hi;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    // Below this the residual is rounding noise in the CDF sum itself.
    const double floor = 4.0 * eps * target;
    for (int iter = 0; iter < 50; ++iter) {
      const double residual = base + partial_integral(lo, theta) - target;
      const double slope = density_(theta);
      const double step = slope > 0.0 ? residual / slope : 0.0;
      if (slope > 0.0 && (std::abs(residual) <= floor || std::abs(step) <= 4.0 * eps * theta)) {
        const double last = theta - step;
        if (last > bracket_lo && last < bracket_hi) theta = last;
        break;
      }
      if (residual > 0.0) {
        bracket_hi = theta;
      } else {
        bracket_lo = theta;
      }
      double next = slope > 0.0 ? theta - step : 0.5 * (bracket_lo + bracket_hi);
      if (!(next > bracket_lo && next < bracket_hi)) {
        next = 0.5 * (bracket_lo + bracket_hi);
      }
      theta = next;
      if (bracket_hi - bracket_lo <= eps * hi) break;
    }
    return std::clamp(theta, std::nextafter(0.0, 1.0),
                      std::nextafter(std::numbers::pi, 0.0));
  }

  SampleBatch sample(std::uint64_t count, std::uint64_t seed) const {
    if (count == 0) {
      throw DomainError("sample count must be at least 1");
    }
    if (count > opts_.max_count) {
      throw ResourceError("sample count " + std::to_string(count) +
                          " exceeds cap " + std::to_string(opts_.max_count));
    }
    std::mt19937_64 engine(seed);
    SampleBatch batch{m(), seed, {}};
    batch.thetas.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      // 53 random bits, offset by half an ulp so u is never 0 or 1.
      const double u =
          (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
      batch.thetas.push_back(quantile(u));
    }
    return batch;
  }

 private:
  double cell_integral(double lo, double hi) const {
    return numerics::integrate(density_, lo, hi, 1e-14, 1e-300).value;
  }

  // Single 15-point Kronrod panel; cells are narrow relative to the peak.
  double partial_integral(double lo, double theta) const {
    if (theta <= lo) return 0.0;
    auto f = density_;
    return numerics::detail::gauss_kronrod_panel(f, lo, theta).value;
  }

  double hermite_guess(std::size_t cell, double target) const {
    const double lo = grid_[cell];
    const double h = grid_[cell + 1] - lo;
    const double f0 = cdf_[cell];
    const double f1 = cdf_[cell + 1];
    const double secant = (f1 - f0) / h;
    if (!(secant > 0.0)) return lo + 0.5 * h;
    double d0 = pdf_[cell];
    double d1 = pdf_[cell + 1];
    const double a = d0 / secant;
    const double b = d1 / secant;
    if (a * a + b * b > 9.0) {
      const double tau = 3.0 / std::sqrt(a * a + b * b);
      d0 = tau * a * secant;
      d1 = tau * b * secant;
    }
    auto hermite = [&](double t) {
      const double t2 = t * t;
      const double t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 +
             (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * h * d1;
    };
    double t_lo = 0.0;
    double t_hi = 1.0;
    for (int iter = 0; iter < 30; ++iter) {
      const double t = 0.5 * (t_lo + t_hi);
      if (hermite(t) < target) {
        t_lo = t;
      } else {
        t_hi = t;
      }
    }
    return lo + 0.5 * (t_lo + t_hi) * h;
  }

  PolarDensity density_;
  SamplerOptions opts_;
  double step_ = 0.0;
  double total_ = 1.0;
  std::vector<double> grid_;
  std::vector<double> cdf_;
  std::vector<double> pdf_;
};

/// `count` reproducible draws from P_m.
inline SampleBatch sample_polar(QuantumIndex m, std::uint64_t count,
                                std::uint64_t seed, SamplerOptions opts = {}) {
  if (count > opts.max_count) {
    throw ResourceError("sample count " + std::to_string(count) +
                        " exceeds cap " + std::to_string(opts.max_count));
  }
  return PolarSampler(m, opts).sample(count, seed);
}

}  // namespace equator::spherical
