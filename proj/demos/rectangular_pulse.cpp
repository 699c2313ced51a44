// Propagates a rectangular two-photon pulse past the emitter and prints a
// few output amplitudes next to the closed form.

#include <cstdio>
#include <vector>

#include "twophoton/analytic.hpp"
#include "twophoton/propagate.hpp"

using namespace twophoton;

int main() {
  const double L = 20.0;
  const PhysicalParams p;  // gamma = c = 1
  auto grid = Grid1D::aligned(-10.0, L, 301, std::vector<double>{0.0, L});
  auto in = Wavefunction2::product(Wavefunction1::rectangular(L, grid));
  auto out = apply_two_photon(in, grid, p);

  std::printf("norm in %.8f  norm out %.8f\n", norm2(in), norm2(out.total));
  std::printf("%8s %8s %14s %14s\n", "x1", "x2", "grid", "closed form");
  for (auto [x1, x2] : {std::pair{10.0, 10.0}, {2.0, 12.0}, {2.0, 18.0}, {-3.0, 5.0}}) {
    std::printf("%8.2f %8.2f %14.10f %14.10f\n", x1, x2, out.total.at(x1, x2).real(),
                rect_two_photon_out(x1, x2, L, p).real());
  }
  for (const auto& w : out.diagnostics.warnings) std::printf("warning: %s\n", w.c_str());
}
