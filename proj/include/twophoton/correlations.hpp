#pragma once

// Second-order correlations of a two-photon output.
//
// A detector at moving-frame position x clicks at t = -x/c, so a delay tau
// pairs the coordinates (x + c tau, x).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"

namespace twophoton {

enum class CurveKind { raw, normalized };

/// Normalization of g2: the long-pulse density 2c/L, or the local
/// one-photon densities I(x) = 2c integral |Psi(x, x')|^2 dx' at both
/// detection points.
enum class G2Normalization { long_pulse, local };

struct CorrelationCurve {
  std::vector<double> tau_values;
  std::vector<double> values;
  CurveKind kind = CurveKind::normalized;
  double anchor_x = 0.0;
};

/// G2(x, tau) = 2 c^2 |Psi(x + c tau, x)|^2, bilinear between nodes.
inline double second_order_correlation(const Wavefunction2& psi, double x, double tau, const PhysicalParams& p = {}) {
  p.validate();
  const cplx v = psi.at(x + p.c * tau, x);
  return 2.0 * p.c * p.c * std::norm(v);
}

namespace detail {
/// 2c integral |Psi(x, x')|^2 dx', linear interpolation along the first axis.
inline double local_density(const Wavefunction2& psi, double x, const PhysicalParams& p) {
  const auto& g = psi.grid();
  if (!g.contains(x)) throw std::out_of_range("local_density: point outside grid");
  auto [i, w] = lerp_weights(g, x);
  std::vector<double> d(psi.n());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = std::norm((1.0 - w) * psi(i, j) + w * psi(i + 1, j));
  const std::size_t kinks[] = {i, i + 1};  // the diagonal
  return 2.0 * p.c * integrate_samples(g, d, kinks);
}
}  // namespace detail

/// Normalized correlation. With the long-pulse convention this is
/// (L^2 / 2) |Psi(x + c tau, x)|^2.
inline double normalized_g2(const Wavefunction2& psi, double x, double tau, double length,
                            const PhysicalParams& p = {}, G2Normalization norm = G2Normalization::long_pulse) {
  if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("normalized_g2: length must be positive");
  const double big = second_order_correlation(psi, x, tau, p);
  if (norm == G2Normalization::long_pulse) {
    const double density = 2.0 * p.c / length;
    return big / (density * density);
  }
  const double d1 = detail::local_density(psi, x + p.c * tau, p);
  const double d2 = detail::local_density(psi, x, p);
  if (d1 == 0.0 || d2 == 0.0) return 0.0;
  return big / (d1 * d2);
}

/// g2 on n uniformly spaced delays in [tau_min, tau_max].
inline CorrelationCurve g2_slice(const Wavefunction2& psi, double x_anchor, double tau_min, double tau_max,
                                 std::size_t n_samples, double length, const PhysicalParams& p = {},
                                 G2Normalization norm = G2Normalization::long_pulse) {
  if (n_samples < 2 || !(tau_max > tau_min)) throw std::invalid_argument("g2_slice: need n >= 2 and tau_min < tau_max");
  CorrelationCurve c;
  c.anchor_x = x_anchor;
  c.kind = CurveKind::normalized;
  c.tau_values.resize(n_samples);
  c.values.resize(n_samples);
  const double step = (tau_max - tau_min) / static_cast<double>(n_samples - 1);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double tau = i + 1 == n_samples ? tau_max : tau_min + static_cast<double>(i) * step;
    c.tau_values[i] = tau;
    c.values[i] = normalized_g2(psi, x_anchor, tau, length, p, norm);
  }
  return c;
}

/// Delays of local minima whose value falls below 1e-6 of the curve
/// maximum, refined by a parabola through the three samples around each.
inline std::vector<double> find_dip_zeros(const CorrelationCurve& curve) {
  const auto& t = curve.tau_values;
  const auto& v = curve.values;
  if (v.empty() || v.size() != t.size()) throw std::invalid_argument("find_dip_zeros: empty or malformed curve");
  const double top = *std::max_element(v.begin(), v.end());
  std::vector<double> zeros;
  if (!(top > 0.0)) return zeros;
  const double threshold = 1e-6 * top;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (!(v[i] < v[i - 1] && v[i] <= v[i + 1])) continue;
    const double h = t[i + 1] - t[i];
    const double curv = v[i - 1] - 2.0 * v[i] + v[i + 1];
    double off = 0.0, vmin = v[i];
    if (curv > 0.0) {
      off = 0.5 * (v[i - 1] - v[i + 1]) / curv;
      off = std::clamp(off, -1.0, 1.0);
      vmin = v[i] - 0.25 * (v[i - 1] - v[i + 1]) * off;
    }
    if (vmin < threshold) zeros.push_back(t[i] + off * h);
  }
  return zeros;
}

/// Writes `tau,value` rows with 17 significant digits after an optional
/// `#` comment line.
inline void write_curve_csv(std::ostream& os, const CorrelationCurve& c, const std::string& comment = {}) {
  if (!comment.empty()) os << "# " << comment << '\n';
  os << "tau,value\n";
  char buf[64];
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", c.tau_values[i], c.values[i]);
    os << buf;
  }
}

}  // namespace twophoton
