#pragma once

// Lab-frame time-domain integrator for one and two photons hitting the atom.
//
// Method of characteristics with dt = dx / c: the field moves exactly one
// cell per step, so advection is exact and all error sits in the local
// atom coupling. The atom sits on the boundary between the last cell left
// of r = 0 and the first cell right of it. Per step:
//   1. the atom amplitude is updated from the field in the cell just left
//      of the atom (Crank-Nicolson in the decay term),
//   2. the field shifts one cell,
//   3. emission sqrt(2 gamma / c) * E_new is added to the cell that has
//      just crossed the atom.
// Storage is a ring buffer, so the shift is an index change plus zeroing
// the slot that leaves the domain.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "model.hpp"

namespace twophoton {

/// Placement of the pulse in the lab frame, in units of c/gamma: the pulse
/// ends `gap` before the atom, the domain extends `right` + pulse width past
/// it, and runs stop once the trailing edge is `tail` past the atom.
struct OracleLayout {
  double gap = 5.0;
  double right = 20.0;
  double tail = 15.0;
};

struct TracePoint {
  double t;
  double value;
};

template <class State>
struct OracleRun {
  State state;
  double initial_norm = 0.0;
  bool traced = false;
  std::vector<TracePoint> trace;

  /// |total_norm(final) - total_norm(initial)|.
  double norm_drift() const { return std::abs(state.total_norm() - initial_norm); }
};

namespace detail {

struct LabLayout {
  std::size_t cells = 0;
  std::size_t atom = 0;  // index of the first cell right of r = 0
  double dx = 0.0;
  double frame_offset = 0.0;
  double t_final = 0.0;
};

inline LabLayout lab_layout(double support_min, double support_max, double dx, const PhysicalParams& p,
                            const OracleLayout& lay) {
  p.validate();
  if (!(dx > 0.0) || !std::isfinite(dx)) throw std::invalid_argument("oracle: dx must be positive");
  if (!(support_max > support_min)) throw std::invalid_argument("oracle: empty pulse support");
  const double ell = p.relaxation_length();
  const double width = support_max - support_min;
  // whole cells, so the pulse's trailing edge sits on a cell boundary
  const double gap = std::ceil(lay.gap * ell / dx - 1e-9) * dx;
  LabLayout l;
  l.dx = dx;
  const auto left = static_cast<std::size_t>(std::ceil((width + gap) / dx - 1e-9));
  const auto right = static_cast<std::size_t>(std::ceil((lay.right * ell + width) / dx - 1e-9));
  l.cells = left + right;
  l.atom = left;
  l.frame_offset = support_max + gap;
  l.t_final = (width + gap + lay.tail * ell) / p.c;
  return l;
}

inline Grid1D cell_centres(const LabLayout& l) {
  const double r0 = -static_cast<double>(l.atom) * l.dx + 0.5 * l.dx;
  const double r1 = (static_cast<double>(l.cells - l.atom) - 0.5) * l.dx;
  return Grid1D(r0, r1, l.cells);
}

/// Index of the first cell right of r = 0 for a cell-centre grid.
inline std::size_t atom_index(const Grid1D& g) {
  const double left_edge = g.x_min() - 0.5 * g.spacing();
  const double k = -left_edge / g.spacing();
  const double r = std::round(k);
  if (std::abs(k - r) > 1e-6 || r < 1.0 || r >= static_cast<double>(g.size()))
    throw std::invalid_argument("oracle: the atom must sit on a cell boundary inside the domain");
  return static_cast<std::size_t>(r);
}

inline std::size_t step_count(double t0, double t_final, double dx, double c) {
  if (!(t_final >= t0)) throw std::invalid_argument("oracle: t_final is before the initial time");
  return static_cast<std::size_t>(std::llround((t_final - t0) * c / dx));
}

inline void check_dx(double dx, const Grid1D& g) {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw std::invalid_argument("oracle: dx must be positive");
  if (std::abs(dx - g.spacing()) > 1e-9 * dx) throw std::invalid_argument("oracle: dx differs from the state's cell size");
}

struct AtomStep {
  double keep, drive;
  AtomStep(const PhysicalParams& p, double dt) {
    const double h = 0.5 * p.gamma * dt;
    keep = (1.0 - h) / (1.0 + h);
    drive = -dt * std::sqrt(2.0 * p.gamma * p.c) / (1.0 + h);
  }
  cplx operator()(cplx e, cplx in) const { return keep * e + drive * in; }
};

}  // namespace detail

/// Initial one-photon state for a moving-frame pulse f supported on
/// [support_min, support_max]; f is sampled at cell centres.
inline LabState1 prepare_one_photon(const std::function<cplx(double)>& f, double support_min, double support_max,
                                    double dx, const PhysicalParams& p = {}, const OracleLayout& lay = {}) {
  const auto l = detail::lab_layout(support_min, support_max, dx, p, lay);
  LabState1 s;
  s.grid = detail::cell_centres(l);
  s.frame_offset = l.frame_offset;
  s.field.resize(l.cells);
  for (std::size_t j = 0; j < l.atom; ++j) s.field[j] = f(s.grid[j] + s.frame_offset);
  detail::require_finite(s.field, "oracle");
  return s;
}

inline LabState1 prepare_one_photon(const Wavefunction1& in, double dx, const PhysicalParams& p = {},
                                    const OracleLayout& lay = {}) {
  double lo = in.grid().x_min(), hi = in.grid().x_max();
  if (const auto* pc = in.exact()) {
    lo = pc->support_min();
    hi = pc->support_max();
    return prepare_one_photon([pc](double x) { return pc->value(x); }, lo, hi, dx, p, lay);
  }
  return prepare_one_photon([&in](double x) { return in.at(x); }, lo, hi, dx, p, lay);
}

/// Initial two-photon state for a symmetric moving-frame amplitude f with
/// both coordinates in [support_min, support_max].
inline LabState2 prepare_two_photon(const std::function<cplx(double, double)>& f, double support_min,
                                    double support_max, double dx, const PhysicalParams& p = {},
                                    const OracleLayout& lay = {}) {
  const auto l = detail::lab_layout(support_min, support_max, dx, p, lay);
  LabState2 s;
  s.grid = detail::cell_centres(l);
  s.frame_offset = l.frame_offset;
  const std::size_t n = l.cells;
  s.field2.assign(n * n, cplx{});
  s.excited1.assign(n, cplx{});
  for (std::size_t i = 0; i < l.atom; ++i)
    for (std::size_t j = i; j < l.atom; ++j) {
      const cplx v = f(s.grid[i] + s.frame_offset, s.grid[j] + s.frame_offset);
      s.field2[i * n + j] = v;
      s.field2[j * n + i] = v;
    }
  detail::require_finite(s.field2, "oracle");
  return s;
}

/// Product state factor(x1) factor(x2).
inline LabState2 prepare_two_photon(const Wavefunction1& factor, double dx, const PhysicalParams& p = {},
                                    const OracleLayout& lay = {}) {
  const auto one = prepare_one_photon(factor, dx, p, lay);
  LabState2 s;
  s.grid = one.grid;
  s.frame_offset = one.frame_offset;
  const std::size_t n = one.field.size();
  s.field2.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s.field2[i * n + j] = one.field[i] * one.field[j];
  s.excited1.assign(n, cplx{});
  return s;
}

/// Time at which a pulse prepared with `lay` has fully passed the atom.
inline double oracle_end_time(double support_min, double support_max, const PhysicalParams& p = {},
                              const OracleLayout& lay = {}) {
  const double ell = p.relaxation_length();
  return (support_max - support_min + (lay.gap + lay.tail) * ell) / p.c;
}

inline OracleRun<LabState1> run_one_photon(const LabState1& initial, double dx, double t_final,
                                           const PhysicalParams& p = {}, bool trace = false) {
  p.validate();
  detail::check_dx(dx, initial.grid);
  const std::size_t a = detail::atom_index(initial.grid);
  const std::size_t n = initial.field.size();
  if (n != initial.grid.size()) throw std::invalid_argument("oracle: field size mismatch");
  if (initial.excited != cplx{}) throw std::invalid_argument("oracle: the atom must start in the ground state");
  for (std::size_t j = a; j < n; ++j)
    if (initial.field[j] != cplx{}) throw std::invalid_argument("oracle: initial field must vanish at r >= 0");
  detail::require_finite(initial.field, "oracle");

  const std::size_t steps = detail::step_count(initial.t, t_final, dx, p.c);
  const double dt = dx / p.c;
  const detail::AtomStep atom(p, dt);
  const double g = std::sqrt(2.0 * p.gamma / p.c);

  OracleRun<LabState1> run;
  run.initial_norm = initial.total_norm();
  run.traced = trace;
  std::vector<cplx> ring = initial.field;  // physical cell j lives in slot (j - shift) mod n
  cplx e = initial.excited;
  std::size_t shift = 0;
  auto slot = [&](std::size_t j) { return (j + n - shift) % n; };
  if (trace) {
    run.trace.reserve(steps + 1);
    run.trace.push_back({initial.t, std::norm(e)});
  }
  for (std::size_t k = 0; k < steps; ++k) {
    e = atom(e, ring[slot(a - 1)]);
    shift = (shift + 1) % n;
    ring[slot(0)] = cplx{};  // the slot that left the right edge re-enters at the left
    ring[slot(a)] += g * e;
    if (trace) run.trace.push_back({initial.t + static_cast<double>(k + 1) * dt, std::norm(e)});
  }
  run.state = initial;
  run.state.t = initial.t + static_cast<double>(steps) * dt;
  run.state.excited = e;
  for (std::size_t j = 0; j < n; ++j) run.state.field[j] = ring[slot(j)];
  return run;
}

inline LabState1 evolve_one_photon(const LabState1& initial, double dx, double t_final, const PhysicalParams& p = {}) {
  return run_one_photon(initial, dx, t_final, p).state;
}

inline OracleRun<LabState2> run_two_photon(LabState2 initial, double dx, double t_final, const PhysicalParams& p = {},
                                           bool trace = false) {
  p.validate();
  detail::check_dx(dx, initial.grid);
  const std::size_t a = detail::atom_index(initial.grid);
  const std::size_t n = initial.n();
  if (initial.field2.size() != n * n || initial.excited1.size() != n)
    throw std::invalid_argument("oracle: state size mismatch");
  for (const auto& z : initial.excited1)
    if (z != cplx{}) throw std::invalid_argument("oracle: the atom must start in the ground state");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const cplx v = initial.field2[i * n + j];
      if ((i >= a || j >= a) && v != cplx{}) throw std::invalid_argument("oracle: initial field must vanish at r >= 0");
      if (v != initial.field2[j * n + i]) throw std::invalid_argument("oracle: initial field is not symmetric");
    }
  detail::require_finite(initial.field2, "oracle");

  const std::size_t steps = detail::step_count(initial.t, t_final, dx, p.c);
  const double dt = dx / p.c;
  const detail::AtomStep atom(p, dt);
  const double g = std::sqrt(2.0 * p.gamma / p.c);

  OracleRun<LabState2> run;
  run.initial_norm = initial.total_norm();
  run.traced = trace;
  const double t0 = initial.t;
  std::vector<cplx> phi = std::move(initial.field2);
  std::vector<cplx> e = std::move(initial.excited1);
  std::size_t shift = 0;
  auto slot = [&](std::size_t j) { return (j + n - shift) % n; };
  auto excited_weight = [&] {
    double s = 0.0;
    for (const auto& z : e) s += std::norm(z);
    return s * dx;
  };
  if (trace) {
    run.trace.reserve(steps + 1);
    run.trace.push_back({t0, excited_weight()});
  }
  for (std::size_t k = 0; k < steps; ++k) {
    // absorption of the photon entering from the left, other photon anywhere
    const std::size_t in_row = slot(a - 1) * n;
    for (std::size_t s = 0; s < n; ++s) e[s] = atom(e[s], phi[in_row + s]);
    shift = (shift + 1) % n;
    const std::size_t out = slot(0);
    for (std::size_t s = 0; s < n; ++s) {
      phi[out * n + s] = cplx{};
      phi[s * n + out] = cplx{};
    }
    e[out] = cplx{};
    const std::size_t c = slot(a);
    for (std::size_t s = 0; s < n; ++s) {
      if (s == c) continue;
      const cplx add = g * e[s];
      phi[c * n + s] += add;
      phi[s * n + c] += add;
    }
    phi[c * n + c] += 2.0 * g * e[c];
    if (trace) run.trace.push_back({t0 + static_cast<double>(k + 1) * dt, excited_weight()});
  }
  LabState2& s = run.state;
  s.grid = initial.grid;
  s.frame_offset = initial.frame_offset;
  s.t = t0 + static_cast<double>(steps) * dt;
  s.excited1.resize(n);
  for (std::size_t j = 0; j < n; ++j) s.excited1[j] = e[slot(j)];
  e.clear();
  e.shrink_to_fit();
  s.field2.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t si = slot(i) * n;
    for (std::size_t j = 0; j < n; ++j) s.field2[i * n + j] = phi[si + slot(j)];
  }
  return run;
}

inline LabState2 evolve_two_photon(LabState2 initial, double dx, double t_final, const PhysicalParams& p = {}) {
  return run_two_photon(std::move(initial), dx, t_final, p).state;
}

/// Per-step excitation: |E|^2 for one photon, integral of |e(r)|^2 for two.
template <class State>
const std::vector<TracePoint>& excitation_trace(const OracleRun<State>& run) {
  if (!run.traced) throw std::logic_error("excitation_trace: the run was not traced");
  return run.trace;
}

/// Moving-frame coordinates x = r - c t + frame_offset of the cell centres.
inline Grid1D moving_frame_grid(const Grid1D& cells, double t, double frame_offset, const PhysicalParams& p = {}) {
  const double shift = frame_offset - p.c * t;
  return Grid1D(cells.x_min() + shift, cells.x_max() + shift, cells.size());
}

inline Wavefunction1 far_field(const LabState1& s, const PhysicalParams& p = {}) {
  return Wavefunction1::sampled(moving_frame_grid(s.grid, s.t, s.frame_offset, p), s.field);
}

inline Wavefunction2 far_field(const LabState2& s, const PhysicalParams& p = {}) {
  return Wavefunction2::from_samples(moving_frame_grid(s.grid, s.t, s.frame_offset, p), s.field2);
}

/// sqrt(sum |a - ref|^2 / sum |ref|^2); 0 when both vanish.
inline double relative_l2(std::span<const cplx> a, std::span<const cplx> ref) {
  if (a.size() != ref.size()) throw std::invalid_argument("relative_l2: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : INFINITY;
  return std::sqrt(num / den);
}

/// Relative L2 deviation of a far field from a reference evaluated at the
/// same moving-frame points.
inline double relative_l2(const Wavefunction1& field, const std::function<cplx(double)>& ref) {
  std::vector<cplx> r(field.grid().size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = ref(field.grid()[i]);
  return relative_l2(field.amp(), r);
}

inline double relative_l2(const Wavefunction2& field, const std::function<cplx(double, double)>& ref) {
  const std::size_t n = field.n();
  const auto& g = field.grid();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const cplx r = ref(g[i], g[j]);
      num += std::norm(field(i, j) - r);
      den += std::norm(r);
    }
  if (den == 0.0) return num == 0.0 ? 0.0 : INFINITY;
  return std::sqrt(num / den);
}

}  // namespace twophoton
