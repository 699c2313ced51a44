#pragma once

// Closed-form outputs for the rectangular pulse 1/sqrt(L) on [0, L] and
// for the long-pulse limit.
//
// Every exponent below is kept non-positive, so the formulas stay finite
// for arbitrarily long pulses.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "model.hpp"

namespace twophoton {

namespace detail {
inline void require_length(double length) {
  if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("pulse length must be positive");
}
}  // namespace detail

/// One-photon output for the rectangular pulse. At the jump x = 0 the
/// `left` limit selects the reemission-tail branch; `point` and `right`
/// select the inside branch.
inline cplx rect_one_photon_out(double x, double length, const PhysicalParams& p = {}, Limit side = Limit::point) {
  detail::require_length(length);
  p.validate();
  const double k = p.rate();
  const double h = 1.0 / std::sqrt(length);
  if (x < 0.0 || (x == 0.0 && side == Limit::left))
    return 2.0 * h * (std::exp(-k * (length - x)) - std::exp(k * x));
  if (x <= length) return h * (2.0 * std::exp(-k * (length - x)) - 1.0);
  return 0.0;
}

/// Nonlinear correction for the rectangular product input; zero once
/// either coordinate exceeds L.
inline cplx rect_nonlin_out(double x1, double x2, double length, const PhysicalParams& p = {}) {
  detail::require_length(length);
  p.validate();
  if (x1 > length || x2 > length) return 0.0;
  const double k = p.rate();
  const double m = std::max({0.0, x1, x2});
  const double s = -std::expm1(-k * (length - m));
  return -(4.0 / length) * std::exp(-k * (m - x1)) * std::exp(-k * (m - x2)) * s * s;
}

/// Linear product plus nonlinear correction. Limits pick the branch of
/// each factor at x = 0, matching duplicated grid nodes.
inline cplx rect_two_photon_out(double x1, double x2, double length, const PhysicalParams& p = {},
                                Limit side1 = Limit::point, Limit side2 = Limit::point) {
  return rect_one_photon_out(x1, length, p, side1) * rect_one_photon_out(x2, length, p, side2) +
         rect_nonlin_out(x1, x2, length, p);
}

/// Output split by process on 0 <= x_i <= L: both transmitted, one
/// reemitted, both reemitted. `nonlin_part` is the share of p_iii that
/// comes from the nonlinear correction.
struct ProcessAmplitudes {
  cplx p_i, p_ii, p_iii, nonlin_part;
  cplx total() const { return p_i + p_ii + p_iii; }
};

inline ProcessAmplitudes rect_process_amplitudes(double x1, double x2, double length, const PhysicalParams& p = {}) {
  detail::require_length(length);
  p.validate();
  if (x1 < 0.0 || x2 < 0.0 || x1 > length || x2 > length)
    throw std::domain_error("process split is defined only for 0 <= x_i <= L");
  const double k = p.rate();
  // a - 1 and b - 1 with a = exp(-k (L - x)), computed without cancellation
  const double am1 = std::expm1(-k * (length - x1));
  const double bm1 = std::expm1(-k * (length - x2));
  ProcessAmplitudes r;
  r.p_i = 1.0 / length;
  r.p_ii = (2.0 / length) * am1 + (2.0 / length) * bm1;
  r.nonlin_part = rect_nonlin_out(x1, x2, length, p);
  r.p_iii = (4.0 / length) * am1 * bm1 + r.nonlin_part;
  return r;
}

/// Long-pulse amplitude 1/L - (4/L) exp(-k |x1 - x2|). Both coordinates must
/// lie strictly inside (0, L - margin); margin defaults to 2 c/gamma.
inline cplx longpulse_psi_out(double x1, double x2, double length, const PhysicalParams& p = {},
                              double margin = -1.0) {
  detail::require_length(length);
  p.validate();
  if (margin < 0.0) margin = 2.0 * p.relaxation_length();
  const double hi = length - margin;
  if (!(x1 > 0.0 && x1 < hi && x2 > 0.0 && x2 < hi))
    throw std::domain_error("long-pulse form needs 0 < x_i < L - margin");
  return 1.0 / length - (4.0 / length) * std::exp(-p.rate() * std::abs(x1 - x2));
}

/// Long-pulse normalized correlation 0.5 (1 - 4 exp(-gamma |tau|))^2.
inline double longpulse_g2(double tau, const PhysicalParams& p = {}) {
  p.validate();
  if (!std::isfinite(tau)) throw std::invalid_argument("longpulse_g2: non-finite delay");
  const double a = 1.0 - 4.0 * std::exp(-p.gamma * std::abs(tau));
  return 0.5 * a * a;
}

}  // namespace twophoton
