// R_m by every route, next to the Wallis estimate of pi.
#include <cstdio>

#include "equator/rigidity.hpp"

int main() {
  using namespace equator;
  std::printf("%6s %20s %20s %20s %12s\n", "m", "product", "gamma", "quadrature", "defect");
  for (std::uint64_t m : {0, 1, 2, 5, 10, 100, 1000}) {
    std::printf("%6llu %20.17f %20.17f %20.17f %12.5e\n",
                static_cast<unsigned long long>(m), rigidity::rigidity_product(m),
                rigidity::rigidity_gamma(m), rigidity::rigidity_quadrature(m),
                rigidity::defect(m));
  }

  rigidity::WallisSequence seq;
  while (seq.m() < 10000) seq.advance();
  const double gap = rigidity::kPi - 2.0 * seq.value();
  std::printf("\n2 W_10000 = %.15f, pi - 2W = %.6e, m (pi - 2W) = %.6f\n", 2.0 * seq.value(),
              gap, 10000.0 * gap);
}
