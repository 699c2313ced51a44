#pragma once

// Scattering map applied to arbitrary input wavefunctions.
//
// Piecewise-constant inputs are integrated in closed form (the kernels are
// exponentials). Sampled inputs go through TailIntegrator with the
// refinement policy. In both cases the delta part of the one-photon kernel
// is applied as a copy of the input.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "kernels.hpp"
#include "model.hpp"
#include "quadrature.hpp"

namespace twophoton {

struct PropagationDiagnostics {
  std::vector<std::string> warnings;
  RefinementReport quadrature;
  bool exact = false;  // closed-form path (piecewise-constant input)
};

template <class Psi>
struct Propagated {
  Psi psi;
  PropagationDiagnostics diagnostics;
};

/// Output of the full two-photon map with its linear and nonlinear parts.
struct TwoPhotonResult {
  Wavefunction2 total;
  Wavefunction2 linear;
  Wavefunction2 nonlinear;
  PropagationDiagnostics diagnostics;
};

/// Split of the output by interaction process: (i) both photons transmitted,
/// (ii) one absorbed and reemitted, (iii) both reemitted (including the
/// nonlinear correction, kept separately as well).
struct ProcessGrids {
  Wavefunction2 transmitted;
  Wavefunction2 single_reemission;
  Wavefunction2 double_reemission;
  Wavefunction2 nonlinear;
};

/// integral_M^inf exp(-k (x' - M)) pc(x') dx', in closed form.
inline cplx piecewise_tail(const PiecewiseConstant& pc, double m, double rate) {
  cplx acc{};
  const auto e = pc.edges();
  const auto v = pc.values();
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double b = e[k + 1];
    if (b <= m) continue;
    const double lo = std::max(m, e[k]);
    acc += v[k] * ((std::exp(-rate * (lo - m)) - std::exp(-rate * (b - m))) / rate);
  }
  return acc;
}

namespace detail {

/// Sample value honouring one-sided limits at duplicated nodes; linear
/// interpolation elsewhere, zero outside the grid.
inline cplx value_with_limit(const Grid1D& g, std::span<const cplx> f, double x, Limit side) {
  if (!g.contains(x)) return {};
  if (side == Limit::left) {
    const auto pts = g.points();
    auto it = std::lower_bound(pts.begin(), pts.end(), x);
    if (it != pts.end() && *it == x) return f[static_cast<std::size_t>(it - pts.begin())];
  }
  auto [i, w] = lerp_weights(g, x);
  if (w == 0.0) return f[i];
  return (1.0 - w) * f[i] + w * f[i + 1];
}

inline cplx input_value(const Wavefunction1& in, double x, Limit side) {
  if (const auto* pc = in.exact()) return pc->value(x, side);
  return value_with_limit(in.grid(), in.amp(), x, side);
}

inline bool is_duplicated_node(const Grid1D& g, double b) {
  const auto bp = g.breakpoints();
  return std::find(bp.begin(), bp.end(), b) != bp.end();
}

inline void check_resolution(const Wavefunction1& in, const Grid1D& out, PropagationDiagnostics& d) {
  if (const auto* pc = in.exact()) {
    const auto e = pc->edges();
    double min_width = e.back() - e.front();
    for (std::size_t k = 0; k + 1 < e.size(); ++k) min_width = std::min(min_width, e[k + 1] - e[k]);
    if (out.spacing() > min_width) {
      std::ostringstream os;
      os << "output spacing " << out.spacing() << " is coarser than the narrowest input cell " << min_width;
      d.warnings.push_back(os.str());
    }
    for (double b : e) {
      if (b > out.x_min() && b < out.x_max() && !is_duplicated_node(out, b)) {
        std::ostringstream os;
        os << "input discontinuity at x=" << b << " is not aligned to an output node";
        d.warnings.push_back(os.str());
      }
    }
  } else if (out.spacing() > in.grid().spacing() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "output spacing " << out.spacing() << " is coarser than the input spacing " << in.grid().spacing();
    d.warnings.push_back(os.str());
  }
}

inline void require_symmetric(const Wavefunction2& in) {
  if (assert_symmetry(in) != 0.0) throw std::invalid_argument("two-photon input is not exchange symmetric");
}

/// Smooth (absorption-reemission) part of the one-photon map at every node
/// of `out`: -2k * integral_x^inf exp(-k (x' - x)) in(x') dx'.
inline std::vector<cplx> smooth_part(const Wavefunction1& in, const Grid1D& out, const PhysicalParams& p,
                                     const RefinementPolicy& policy, PropagationDiagnostics& d) {
  const double k = p.rate();
  std::vector<cplx> s(out.size());
  if (const auto* pc = in.exact()) {
    for (std::size_t i = 0; i < out.size(); ++i) s[i] = -2.0 * k * piecewise_tail(*pc, out[i], k);
    d.exact = true;
    return s;
  }
  auto tail = refined_tail_integrals<cplx>(in.grid(), in.amp(), k, out.points(), policy, &d.quadrature);
  for (std::size_t i = 0; i < out.size(); ++i) s[i] = -2.0 * k * tail[i];
  return s;
}

inline std::vector<cplx> delta_part(const Wavefunction1& in, const Grid1D& out) {
  std::vector<cplx> v(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) v[i] = input_value(in, out[i], out.limit(i));
  return v;
}

/// Tail F(M) = integral_M^inf exp(-k (x' - M)) a(x') dx' of a one-photon
/// factor at every output node.
inline std::vector<cplx> factor_tail(const Wavefunction1& a, const Grid1D& out, const PhysicalParams& p,
                                     const RefinementPolicy& policy, PropagationDiagnostics& d) {
  const double k = p.rate();
  if (const auto* pc = a.exact()) {
    std::vector<cplx> t(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) t[i] = piecewise_tail(*pc, out[i], k);
    d.exact = true;
    return t;
  }
  return refined_tail_integrals<cplx>(a.grid(), a.amp(), k, out.points(), policy, &d.quadrature);
}

/// Nonlinear output from H(M) given at every output node, where
/// H(M) = integral over x1', x2' > M of exp(-k(x1'-M)) exp(-k(x2'-M)) psi_in.
inline Wavefunction2 nonlinear_from_quadrant(const Grid1D& out, const std::vector<cplx>& h, double k) {
  const std::size_t n = out.size();
  std::vector<cplx> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const std::size_t mi = std::max(i, j);
      const double m = out[mi];
      const cplx v = -4.0 * k * k * std::exp(-k * (m - out[i])) * std::exp(-k * (m - out[j])) * h[mi];
      a[i * n + j] = v;
      a[j * n + i] = v;
    }
  return Wavefunction2::from_samples(out, std::move(a));
}

struct SubNode {
  std::size_t a;
  double w;  // value = (1 - w) f[a] + w f[a + 1]
  double x;
};

inline std::vector<SubNode> sub_nodes(const Grid1D& g, int m) {
  std::vector<SubNode> s;
  const std::size_t n = g.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = g[i + 1] - g[i];
    if (h == 0.0) {
      s.push_back({i, 0.0, g[i]});
      continue;
    }
    for (int r = 0; r < m; ++r) {
      const double w = static_cast<double>(r) / m;
      s.push_back({i, w, r == 0 ? g[i] : g[i] + w * h});
    }
  }
  s.push_back({n - 1, 0.0, g[n - 1]});
  return s;
}

inline cplx sub_value(std::span<const cplx> f, const SubNode& s) {
  if (s.w == 0.0) return f[s.a];
  return (1.0 - s.w) * f[s.a] + s.w * f[s.a + 1];
}

/// H(M) at every output node for a general sampled input, by the composite
/// trapezoid rule on an m-fold refined sub-grid. O((m n)^2).
inline std::vector<cplx> quadrant_tail(const Wavefunction2& in, const Grid1D& out, double k, int m) {
  const auto& g = in.grid();
  const std::size_t n = g.size();
  const auto subs = sub_nodes(g, m);
  const std::size_t P = subs.size();
  auto row_at = [&](const SubNode& s) {
    // Interpolate along x1 first, then sample along x2 at the sub-nodes.
    std::vector<cplx> line(n);
    for (std::size_t j = 0; j < n; ++j)
      line[j] = s.w == 0.0 ? in(s.a, j) : (1.0 - s.w) * in(s.a, j) + s.w * in(s.a + 1, j);
    std::vector<cplx> r(P);
    for (std::size_t q = 0; q < P; ++q) r[q] = sub_value(line, subs[q]);
    return r;
  };
  std::vector<cplx> tail_x1(P, cplx{});  // integral along x1 from s_p, for each x2 sub-node
  std::vector<cplx> hsub(P, cplx{});
  std::vector<cplx> next = row_at(subs[P - 1]);
  for (std::size_t p = P - 1; p-- > 0;) {
    std::vector<cplx> cur = row_at(subs[p]);
    const double d = subs[p + 1].x - subs[p].x;
    if (d > 0.0) {
      const double dec = std::exp(-k * d);
      for (std::size_t q = 0; q < P; ++q) tail_x1[q] = dec * tail_x1[q] + (0.5 * d) * (cur[q] + dec * next[q]);
    }
    cplx acc{};
    for (std::size_t q = P - 1; q > p; --q) {
      const double dq = subs[q].x - subs[q - 1].x;
      if (dq == 0.0) continue;
      const double dec = std::exp(-k * dq);
      acc = dec * acc + (0.5 * dq) * (tail_x1[q - 1] + dec * tail_x1[q]);
    }
    hsub[p] = acc;
    next = std::move(cur);
  }
  // Linear interpolation of H onto the output nodes.
  std::vector<double> xs(P);
  for (std::size_t q = 0; q < P; ++q) xs[q] = subs[q].x;
  std::vector<cplx> h(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = out[i];
    if (x >= xs.back()) {
      h[i] = {};
    } else if (x <= xs.front()) {
      h[i] = std::exp(-2.0 * k * (xs.front() - x)) * hsub.front();
    } else {
      auto it = std::upper_bound(xs.begin(), xs.end(), x);
      const std::size_t q = static_cast<std::size_t>(it - xs.begin()) - 1;
      const double w = (x - xs[q]) / (xs[q + 1] - xs[q]);
      h[i] = (1.0 - w) * hsub[q] + w * hsub[q + 1];
    }
  }
  return h;
}

struct LinearParts {
  std::vector<cplx> transmitted, single, twice;  // row-major, out x out
};

/// Linear map on a general sampled input: the one-photon map along x2 and
/// then along x1, keeping delta and smooth pieces apart.
inline LinearParts linear_parts_general(const Wavefunction2& in, const Grid1D& out, const PhysicalParams& p,
                                        const RefinementPolicy& policy, PropagationDiagnostics& d) {
  const auto& g = in.grid();
  const std::size_t ni = g.size(), no = out.size();
  const double k = p.rate();
  std::vector<cplx> ad(ni * no), as(ni * no);  // after axis 2: [x1_in][x2_out]
  std::vector<cplx> line(ni);
  RefinementReport worst;
  auto apply_line = [&](std::span<const cplx> f, std::vector<cplx>& dv, std::vector<cplx>& sv) {
    RefinementReport rep;
    auto tail = refined_tail_integrals<cplx>(g, f, k, out.points(), policy, &rep);
    worst.refinements = std::max(worst.refinements, rep.refinements);
    worst.converged = worst.converged && rep.converged;
    worst.last_change = std::max(worst.last_change, rep.last_change);
    for (std::size_t q = 0; q < no; ++q) {
      dv[q] = value_with_limit(g, f, out[q], out.limit(q));
      sv[q] = -2.0 * k * tail[q];
    }
  };
  std::vector<cplx> dv(no), sv(no);
  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t j = 0; j < ni; ++j) line[j] = in(i, j);
    apply_line(line, dv, sv);
    std::copy(dv.begin(), dv.end(), ad.begin() + static_cast<std::ptrdiff_t>(i * no));
    std::copy(sv.begin(), sv.end(), as.begin() + static_cast<std::ptrdiff_t>(i * no));
  }
  LinearParts parts{std::vector<cplx>(no * no), std::vector<cplx>(no * no), std::vector<cplx>(no * no)};
  std::vector<cplx> dd(no), ds(no), sd(no), ss(no);
  for (std::size_t q = 0; q < no; ++q) {
    for (std::size_t i = 0; i < ni; ++i) line[i] = ad[i * no + q];
    apply_line(line, dd, sd);
    for (std::size_t i = 0; i < ni; ++i) line[i] = as[i * no + q];
    apply_line(line, ds, ss);
    for (std::size_t r = 0; r < no; ++r) {
      parts.transmitted[r * no + q] = dd[r];
      parts.single[r * no + q] = ds[r] + sd[r];
      parts.twice[r * no + q] = ss[r];
    }
  }
  d.quadrature = worst;
  return parts;
}

inline std::vector<cplx> outer(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const std::size_t n = a.size();
  std::vector<cplx> r(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const cplx v = a[i] * b[j] + b[i] * a[j];
      r[i * n + j] = v;
      r[j * n + i] = v;
    }
  return r;
}

inline std::vector<cplx> square(const std::vector<cplx>& a) {
  const std::size_t n = a.size();
  std::vector<cplx> r(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const cplx v = a[i] * a[j];
      r[i * n + j] = v;
      r[j * n + i] = v;
    }
  return r;
}

inline const Wavefunction1* factor_for(const Wavefunction2& in) { return in.factor(); }

inline void check_resolution2(const Wavefunction2& in, const Grid1D& out, PropagationDiagnostics& d) {
  if (const auto* f = in.factor()) {
    check_resolution(*f, out, d);
  } else if (out.spacing() > in.grid().spacing() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "output spacing " << out.spacing() << " is coarser than the input spacing " << in.grid().spacing();
    d.warnings.push_back(os.str());
  }
}

}  // namespace detail

/// Psi_out(x) = Psi_in(x) + integral_x^inf abs_kernel(x, x') Psi_in(x') dx'.
inline Propagated<Wavefunction1> apply_one_photon(const Wavefunction1& in, const Grid1D& out,
                                                  const PhysicalParams& params,
                                                  const RefinementPolicy& policy = {}) {
  params.validate();
  PropagationDiagnostics d;
  detail::check_resolution(in, out, d);
  auto delta = detail::delta_part(in, out);
  auto smooth = detail::smooth_part(in, out, params, policy, d);
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] += smooth[i];
  return {Wavefunction1::sampled(out, std::move(delta)), std::move(d)};
}

inline Propagated<Wavefunction2> apply_two_photon_linear(const Wavefunction2& in, const Grid1D& out,
                                                         const PhysicalParams& params,
                                                         const RefinementPolicy& policy = {}) {
  params.validate();
  detail::require_symmetric(in);
  if (const auto* f = in.factor()) {
    auto one = apply_one_photon(*f, out, params, policy);
    return {Wavefunction2::product(one.psi), std::move(one.diagnostics)};
  }
  PropagationDiagnostics d;
  detail::check_resolution2(in, out, d);
  auto parts = detail::linear_parts_general(in, out, params, policy, d);
  for (std::size_t k = 0; k < parts.transmitted.size(); ++k)
    parts.transmitted[k] += parts.single[k] + parts.twice[k];
  return {Wavefunction2::from_samples(out, std::move(parts.transmitted), SymmetryPolicy::average), std::move(d)};
}

inline Propagated<Wavefunction2> apply_two_photon_nonlinear(const Wavefunction2& in, const Grid1D& out,
                                                            const PhysicalParams& params,
                                                            const RefinementPolicy& policy = {}) {
  params.validate();
  detail::require_symmetric(in);
  const double k = params.rate();
  PropagationDiagnostics d;
  detail::check_resolution2(in, out, d);
  if (const auto* f = in.factor()) {
    auto t = detail::factor_tail(*f, out, params, policy, d);
    for (auto& v : t) v *= v;
    return {detail::nonlinear_from_quadrant(out, t, k), std::move(d)};
  }
  // General sampled input: refine until H(M) settles.
  std::vector<cplx> prev = detail::quadrant_tail(in, out, k, 1);
  RefinementReport rep;
  rep.converged = policy.max_refinements == 0;
  int m = 1;
  for (int r = 1; r <= policy.max_refinements; ++r) {
    m *= 2;
    auto cur = detail::quadrant_tail(in, out, k, m);
    double change = 0.0;
    for (std::size_t q = 0; q < cur.size(); ++q) change = std::max(change, 4.0 * k * k * std::abs(cur[q] - prev[q]));
    prev = std::move(cur);
    rep.refinements = r;
    rep.last_change = change;
    if (change < policy.tolerance) {
      rep.converged = true;
      break;
    }
  }
  d.quadrature = rep;
  return {detail::nonlinear_from_quadrant(out, prev, k), std::move(d)};
}

/// Full two-photon map: linear plus nonlinear part.
inline TwoPhotonResult apply_two_photon(const Wavefunction2& in, const Grid1D& out, const PhysicalParams& params,
                                        const RefinementPolicy& policy = {}) {
  auto lin = apply_two_photon_linear(in, out, params, policy);
  auto nl = apply_two_photon_nonlinear(in, out, params, policy);
  PropagationDiagnostics d = lin.diagnostics;
  for (auto& w : nl.diagnostics.warnings)
    if (std::find(d.warnings.begin(), d.warnings.end(), w) == d.warnings.end()) d.warnings.push_back(w);
  d.quadrature.refinements = std::max(d.quadrature.refinements, nl.diagnostics.quadrature.refinements);
  d.quadrature.converged = d.quadrature.converged && nl.diagnostics.quadrature.converged;
  d.quadrature.last_change = std::max(d.quadrature.last_change, nl.diagnostics.quadrature.last_change);
  d.exact = lin.diagnostics.exact && nl.diagnostics.exact;
  Wavefunction2 total = lin.psi + nl.psi;
  return {std::move(total), std::move(lin.psi), std::move(nl.psi), std::move(d)};
}

/// Process-resolved output for any input.
inline ProcessGrids decompose_two_photon(const Wavefunction2& in, const Grid1D& out, const PhysicalParams& params,
                                         const RefinementPolicy& policy = {}) {
  params.validate();
  detail::require_symmetric(in);
  PropagationDiagnostics d;
  auto nl = apply_two_photon_nonlinear(in, out, params, policy).psi;
  std::vector<cplx> t, s, w;
  if (const auto* f = in.factor()) {
    auto delta = detail::delta_part(*f, out);
    auto smooth = detail::smooth_part(*f, out, params, policy, d);
    t = detail::square(delta);
    s = detail::outer(delta, smooth);
    w = detail::square(smooth);
  } else {
    auto parts = detail::linear_parts_general(in, out, params, policy, d);
    t = std::move(parts.transmitted);
    s = std::move(parts.single);
    w = std::move(parts.twice);
  }
  const std::size_t n = out.size();
  for (std::size_t k = 0; k < n * n; ++k) w[k] += nl.amp()[k];
  auto sym = SymmetryPolicy::average;
  return {Wavefunction2::from_samples(out, std::move(t), sym), Wavefunction2::from_samples(out, std::move(s), sym),
          Wavefunction2::from_samples(out, std::move(w), sym), std::move(nl)};
}

/// Support [lo, hi] of a one-photon input: the piecewise edges, or the span
/// of nonzero samples.
inline std::pair<double, double> input_support(const Wavefunction1& in) {
  if (const auto* pc = in.exact()) return {pc->support_min(), pc->support_max()};
  const auto a = in.amp();
  std::size_t lo = 0, hi = a.size();
  while (lo < a.size() && a[lo] == cplx{}) ++lo;
  while (hi > lo && a[hi - 1] == cplx{}) --hi;
  if (lo == hi) return {in.grid().x_min(), in.grid().x_max()};
  return {in.grid()[lo], in.grid()[hi - 1]};
}

/// Output grid covering [support_min - depth * c/gamma, support_max] with
/// spacing `dx_lengths` * c/gamma, aligned to piecewise input edges.
inline Grid1D default_output_grid(const Wavefunction1& in, const PhysicalParams& p, double depth = 10.0,
                                  double dx_lengths = 0.01) {
  const auto [lo, hi] = input_support(in);
  const double ell = p.relaxation_length();
  std::vector<double> bps;
  if (const auto* pc = in.exact()) bps.assign(pc->edges().begin(), pc->edges().end());
  return Grid1D::with_spacing(lo - depth * ell, hi, dx_lengths * ell, bps);
}

}  // namespace twophoton
