#pragma once

// Closed-form scattering kernels in moving-frame coordinates.
//
// The one-photon map is u(x; x') = delta(x - x') + abs_kernel(x, x'); the
// delta part is never evaluated numerically, callers apply it as a copy.
// The two-photon map is the product of two one-photon maps plus the
// nonlinear correction that removes simultaneous double absorption.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <stdexcept>

#include "model.hpp"

namespace twophoton {

namespace detail {
template <class... T>
void require_finite_positions(T... xs) {
  if (!(std::isfinite(xs) && ...)) throw std::invalid_argument("kernel: non-finite position");
}
}  // namespace detail

/// Absorption-reemission amplitude -(2 gamma / c) exp(-(gamma / c)(xp - x))
/// for x <= xp, zero otherwise. At x == xp the inside limit is returned.
template <std::floating_point T>
T eval_abs_kernel(T x, T xp, const PhysicalParams& p) {
  detail::require_finite_positions(x, xp);
  if (x > xp) return T(0);
  const T k = T(p.rate());
  return T(-2) * k * std::exp(-k * (xp - x));
}

/// Nonlinear two-photon correction -(4 gamma^2 / c^2)
/// exp(-(gamma / c)(x1p + x2p - x1 - x2)) when both x1 and x2 lie strictly
/// below min(x1p, x2p); zero otherwise, including on the boundary.
template <std::floating_point T>
T eval_nonlin_kernel(T x1, T x2, T x1p, T x2p, const PhysicalParams& p) {
  detail::require_finite_positions(x1, x2, x1p, x2p);
  const T m = std::min(x1p, x2p);
  if (!(x1 < m && x2 < m)) return T(0);
  const T k = T(p.rate());
  return T(-4) * k * k * std::exp(-k * ((x1p + x2p) - (x1 + x2)));
}

}  // namespace twophoton
