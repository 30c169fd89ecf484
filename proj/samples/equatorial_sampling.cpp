// Draws polar angles from P_m and compares sample moments with closed forms.
#include <cmath>
#include <cstdio>

#include "equator/spherical.hpp"

int main() {
  using namespace equator;
  for (std::uint64_t m : {1, 10, 100}) {
    const auto batch = spherical::sample_polar(m, 200000, 2026);
    const auto cos2 = spherical::sample_moment(batch.thetas, [](double t) {
      const double c = std::cos(t);
      return c * c;
    });
    const auto csc = spherical::sample_moment(batch.thetas,
                                              [](double t) { return 1.0 / std::sin(t); });
    std::printf("m=%-4llu <cos^2> %.6f +- %.6f (exact %.6f)  <csc> %.6f +- %.6f (exact %.6f)\n",
                static_cast<unsigned long long>(m), cos2.mean, cos2.standard_error,
                1.0 / (2.0 * static_cast<double>(m) + 3.0), csc.mean, csc.standard_error,
                spherical::csc_expectation(m));
  }
}
