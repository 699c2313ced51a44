// Second-order correlation of the transmitted light for a long rectangular
// pulse, with and without the nonlinear part.

#include <cstdio>
#include <vector>

#include "twophoton/correlations.hpp"
#include "twophoton/propagate.hpp"

using namespace twophoton;

int main() {
  const double L = 40.0;
  auto grid = Grid1D::with_spacing(0.0, L, 0.05, std::vector<double>{0.0, L});
  auto out = apply_two_photon(Wavefunction2::product(Wavefunction1::rectangular(L, grid)), grid, {});

  auto full = g2_slice(out.total, L / 2, -8.0, 8.0, 33, L);
  auto lin = g2_slice(out.linear, L / 2, -8.0, 8.0, 33, L);
  std::printf("%8s %12s %12s\n", "tau", "g2", "linear only");
  for (std::size_t i = 0; i < full.values.size(); ++i)
    std::printf("%8.2f %12.6f %12.6f\n", full.tau_values[i], full.values[i], lin.values[i]);

  auto dense = g2_slice(out.total, L / 2, -8.0, 8.0, 1601, L);
  for (double z : find_dip_zeros(dense)) std::printf("zero at tau = %.5f\n", z);
}
