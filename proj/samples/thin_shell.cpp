// Effective radius of a Gaussian shell, and its surface spectrum.
#include <cmath>
#include <cstdio>
#include <vector>

#include "equator/models.hpp"

int main() {
  using namespace equator;
  const double r0 = 4.0;
  for (double w : {0.4, 0.1, 0.01}) {
    std::vector<double> r;
    std::vector<double> f;
    for (int i = 0; i <= 2000; ++i) {
      const double x = r0 - 8.0 * w + 16.0 * w * i / 2000.0;
      const double z = (x - r0) / w;
      r.push_back(x);
      f.push_back(std::exp(-0.25 * z * z) / x);  // r^2 f^2 is Gaussian
    }
    const auto profile = models::RadialProfile(r, f).normalized();
    const auto red = models::shell_reduce(profile, 0.0);
    std::printf("w=%-5g R_eff=%.8f  E_1..E_3:", w, red.effective_radius);
    for (std::uint64_t l = 1; l <= 3; ++l) {
      std::printf(" %.6f", models::shell_spectrum(l, 1.0, red).energy);
    }
    std::printf("\n");
  }
}
