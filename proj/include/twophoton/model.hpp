#pragma once

// Units, grids and wavefunction containers shared by the whole library.
//
// Lengths are measured in the moving frame x = r - c t unless stated
// otherwise. The only physical scale is the relaxation length c / gamma.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twophoton {

using cplx = std::complex<double>;

struct PhysicalParams {
  double gamma = 1.0;  // dipole relaxation rate
  double c = 1.0;      // propagation speed

  PhysicalParams() = default;
  PhysicalParams(double gamma_, double c_) : gamma(gamma_), c(c_) { validate(); }

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw std::invalid_argument("gamma must be positive and finite");
    if (!(c > 0.0) || !std::isfinite(c))
      throw std::invalid_argument("c must be positive and finite");
  }

  double relaxation_length() const { return c / gamma; }
  /// Spatial decay rate gamma / c of the reemission tail.
  double rate() const { return gamma / c; }
};

/// Which one-sided limit a sample represents. `point` is used away from
/// discontinuities.
enum class Limit { point, left, right };

/// Uniform 1D grid. Interior breakpoints (jump positions of the sampled
/// function) are stored twice: first the left-limit node, then the
/// right-limit node, forming a zero-width segment.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
      throw std::invalid_argument("Grid1D: need finite x_min < x_max");
    if (n < 2) throw std::invalid_argument("Grid1D: need at least 2 points");
    dx_ = (x_max - x_min) / static_cast<double>(n - 1);
    points_.reserve(n);
    limits_.assign(n, Limit::point);
    for (std::size_t i = 0; i < n; ++i) points_.push_back(node(i));
  }

  /// Smallest grid with at least `min_n` points on [x_min, x_max] having a
  /// node exactly at every breakpoint inside the interval. Throws if no such
  /// grid exists within `search` extra points.
  static Grid1D aligned(double x_min, double x_max, std::size_t min_n,
                        std::span<const double> breakpoints, std::size_t search = 200000) {
    std::vector<double> inside;
    for (double b : breakpoints) {
      if (!std::isfinite(b)) throw std::invalid_argument("Grid1D: non-finite breakpoint");
      if (b > x_min && b < x_max) inside.push_back(b);
    }
    std::sort(inside.begin(), inside.end());
    inside.erase(std::unique(inside.begin(), inside.end()), inside.end());
    for (std::size_t n = std::max<std::size_t>(min_n, 2); n < min_n + search; ++n) {
      const double dx = (x_max - x_min) / static_cast<double>(n - 1);
      std::vector<std::size_t> idx;
      bool ok = true;
      for (double b : inside) {
        const double t = (b - x_min) / dx;
        const double r = std::round(t);
        if (std::abs(t - r) > 1e-9 * std::max(1.0, t)) {
          ok = false;
          break;
        }
        idx.push_back(static_cast<std::size_t>(r));
      }
      if (!ok) continue;
      Grid1D g(x_min, x_max, n);
      g.insert_breakpoints(inside, idx);
      return g;
    }
    throw std::invalid_argument("Grid1D: cannot align breakpoints to a uniform grid");
  }

  /// Grid with spacing as close as possible to (not above) `dx`, aligned to
  /// the given breakpoints.
  static Grid1D with_spacing(double x_min, double x_max, double dx,
                             std::span<const double> breakpoints = {}) {
    if (!(dx > 0.0)) throw std::invalid_argument("Grid1D: spacing must be positive");
    const auto n = static_cast<std::size_t>(std::ceil((x_max - x_min) / dx - 1e-9)) + 1;
    return aligned(x_min, x_max, n, breakpoints);
  }

  /// Rebuilds a grid from a node list (as read back from CSV).
  static Grid1D from_points(std::span<const double> pts) {
    if (pts.size() < 2) throw std::invalid_argument("Grid1D: need at least 2 points");
    std::vector<double> distinct;
    std::vector<double> dups;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i > 0 && pts[i] == pts[i - 1]) {
        dups.push_back(pts[i]);
        continue;
      }
      if (i > 0 && pts[i] < pts[i - 1]) throw std::invalid_argument("Grid1D: points not sorted");
      distinct.push_back(pts[i]);
    }
    Grid1D g = aligned(distinct.front(), distinct.back(), distinct.size(), dups, 1);
    if (g.size() != pts.size()) throw std::invalid_argument("Grid1D: points are not a uniform grid");
    const double tol = 1e-9 * g.spacing();
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (std::abs(g.points_[i] - pts[i]) > tol)
        throw std::invalid_argument("Grid1D: points are not a uniform grid");
    return g;
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double spacing() const { return dx_; }
  /// Number of stored nodes (duplicated breakpoints count twice).
  std::size_t size() const { return points_.size(); }
  /// Number of distinct positions.
  std::size_t distinct_size() const { return n_; }
  double operator[](std::size_t i) const { return points_[i]; }
  Limit limit(std::size_t i) const { return limits_[i]; }
  std::span<const double> points() const { return points_; }
  std::span<const double> breakpoints() const { return breakpoints_; }

  bool contains(double x) const { return x >= x_min_ && x <= x_max_; }

  /// Index i of the nonzero-width segment [p_i, p_{i+1}] containing x. At a
  /// duplicated breakpoint the segment to the right is returned.
  std::size_t locate(double x) const {
    if (!contains(x)) throw std::out_of_range("Grid1D::locate: point outside grid");
    auto it = std::upper_bound(points_.begin(), points_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - points_.begin());
    i = (i == 0) ? 0 : i - 1;
    if (i >= points_.size() - 1) {
      i = points_.size() - 2;
      while (i > 0 && points_[i] == points_[i + 1]) --i;
    }
    return i;
  }

  bool same_nodes(const Grid1D& o) const {
    return points_ == o.points_ && limits_ == o.limits_;
  }

 private:
  double node(std::size_t i) const {
    if (i + 1 == n_) return x_max_;
    return x_min_ + static_cast<double>(i) * dx_;
  }

  void insert_breakpoints(const std::vector<double>& bps, const std::vector<std::size_t>& idx) {
    breakpoints_ = bps;
    std::vector<double> pts;
    std::vector<Limit> lim;
    pts.reserve(n_ + bps.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (k < idx.size() && idx[k] == i) {
        pts.push_back(bps[k]);
        lim.push_back(Limit::left);
        pts.push_back(bps[k]);
        lim.push_back(Limit::right);
        ++k;
      } else {
        pts.push_back(points_[i]);
        lim.push_back(Limit::point);
      }
    }
    points_ = std::move(pts);
    limits_ = std::move(lim);
  }

  double x_min_, x_max_;
  std::size_t n_;
  double dx_ = 0.0;
  std::vector<double> points_;
  std::vector<Limit> limits_;
  std::vector<double> breakpoints_;
};

/// Piecewise-constant function: values_[k] on [edges_[k], edges_[k+1]],
/// zero outside [edges_.front(), edges_.back()].
class PiecewiseConstant {
 public:
  PiecewiseConstant(std::vector<double> edges, std::vector<cplx> values)
      : edges_(std::move(edges)), values_(std::move(values)) {
    if (edges_.size() < 2 || values_.size() + 1 != edges_.size())
      throw std::invalid_argument("PiecewiseConstant: need m+1 edges for m values");
    for (std::size_t k = 0; k + 1 < edges_.size(); ++k)
      if (!(edges_[k] < edges_[k + 1]) || !std::isfinite(edges_[k + 1]))
        throw std::invalid_argument("PiecewiseConstant: edges must be finite and increasing");
    for (const auto& v : values_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::invalid_argument("PiecewiseConstant: non-finite value");
  }

  /// Unit-norm rectangle of height 1/sqrt(L) on [0, L].
  static PiecewiseConstant rectangle(double length) {
    if (!(length > 0.0) || !std::isfinite(length))
      throw std::invalid_argument("rectangle: length must be positive");
    return PiecewiseConstant({0.0, length}, {cplx(1.0 / std::sqrt(length), 0.0)});
  }

  std::span<const double> edges() const { return edges_; }
  std::span<const cplx> values() const { return values_; }
  double support_min() const { return edges_.front(); }
  double support_max() const { return edges_.back(); }

  /// Value at x. A plain point takes the right piece at interior edges and
  /// the inside value at the two outer edges (closed support).
  cplx value(double x, Limit side = Limit::point) const {
    const double lo = edges_.front(), hi = edges_.back();
    if (x < lo || x > hi) return {};
    if (side == Limit::left && x == lo) return {};
    if (side == Limit::right && x == hi) return {};
    if (x == hi) return values_.back();
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    auto k = static_cast<std::size_t>(it - edges_.begin()) - 1;
    if (side == Limit::left && edges_[k] == x && k > 0) --k;
    return values_[k];
  }

  double norm() const {
    double s = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k)
      s += std::norm(values_[k]) * (edges_[k + 1] - edges_[k]);
    return s;
  }

  PiecewiseConstant scaled(cplx alpha) const {
    auto v = values_;
    for (auto& x : v) x *= alpha;
    return PiecewiseConstant(edges_, std::move(v));
  }

 private:
  std::vector<double> edges_;
  std::vector<cplx> values_;
};

namespace detail {

inline void require_finite(std::span<const cplx> v, const char* what) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::invalid_argument(std::string(what) + ": non-finite amplitude");
}

/// Linear interpolation weights on a grid: value = (1-w) f[i] + w f[i+1].
inline std::pair<std::size_t, double> lerp_weights(const Grid1D& g, double x) {
  const std::size_t i = g.locate(x);
  const double h = g[i + 1] - g[i];
  return {i, (x - g[i]) / h};
}

}  // namespace detail

/// One-photon amplitude sampled on a grid, optionally carrying an exact
/// piecewise-constant representation of the same function.
class Wavefunction1 {
 public:
  static Wavefunction1 sampled(Grid1D grid, std::vector<cplx> amp) {
    if (amp.size() != grid.size()) throw std::invalid_argument("Wavefunction1: size mismatch");
    detail::require_finite(amp, "Wavefunction1");
    return Wavefunction1(std::move(grid), std::move(amp), std::nullopt);
  }

  /// Samples f(x, limit) at every node.
  template <class F>
  static Wavefunction1 from_function(Grid1D grid, F&& f) {
    std::vector<cplx> amp(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) amp[i] = cplx(f(grid[i], grid.limit(i)));
    return sampled(std::move(grid), std::move(amp));
  }

  static Wavefunction1 piecewise(PiecewiseConstant pc, Grid1D grid) {
    auto w = from_function(std::move(grid), [&](double x, Limit l) { return pc.value(x, l); });
    w.exact_ = std::move(pc);
    return w;
  }

  static Wavefunction1 rectangular(double length, Grid1D grid) {
    return piecewise(PiecewiseConstant::rectangle(length), std::move(grid));
  }

  const Grid1D& grid() const { return grid_; }
  std::span<const cplx> amp() const { return amp_; }
  cplx operator[](std::size_t i) const { return amp_[i]; }
  const PiecewiseConstant* exact() const { return exact_ ? &*exact_ : nullptr; }
  bool is_piecewise() const { return exact_.has_value(); }

  /// Linear interpolation of the samples; zero outside the grid.
  cplx at(double x) const {
    if (!grid_.contains(x)) return {};
    auto [i, w] = detail::lerp_weights(grid_, x);
    return (1.0 - w) * amp_[i] + w * amp_[i + 1];
  }

  Wavefunction1 scaled(cplx alpha) const {
    auto a = amp_;
    for (auto& z : a) z *= alpha;
    std::optional<PiecewiseConstant> e;
    if (exact_) e = exact_->scaled(alpha);
    return Wavefunction1(grid_, std::move(a), std::move(e));
  }

 private:
  Wavefunction1(Grid1D g, std::vector<cplx> a, std::optional<PiecewiseConstant> e)
      : grid_(std::move(g)), amp_(std::move(a)), exact_(std::move(e)) {}

  Grid1D grid_;
  std::vector<cplx> amp_;
  std::optional<PiecewiseConstant> exact_;
};

enum class SymmetryPolicy { require_exact, average };

/// Max over all pairs of |a(i,j) - a(j,i)| for a row-major n x n array.
inline double max_asymmetry(std::span<const cplx> a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("max_asymmetry: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) worst = std::max(worst, std::abs(a[i * n + j] - a[j * n + i]));
  return worst;
}

/// Bosonic two-photon amplitude on grid x grid, stored row-major with the
/// first index along x1. Every constructor produces an exactly symmetric
/// array.
class Wavefunction2 {
 public:
  static Wavefunction2 zero(Grid1D grid) {
    const std::size_t n = grid.size();
    return Wavefunction2(std::move(grid), std::vector<cplx>(n * n), std::nullopt);
  }

  /// Evaluates f(x1, l1, x2, l2) on the upper triangle and mirrors it.
  template <class F>
  static Wavefunction2 from_function(Grid1D grid, F&& f) {
    const std::size_t n = grid.size();
    std::vector<cplx> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const cplx v = f(grid[i], grid.limit(i), grid[j], grid.limit(j));
        a[i * n + j] = v;
        a[j * n + i] = v;
      }
    detail::require_finite(a, "Wavefunction2");
    return Wavefunction2(std::move(grid), std::move(a), std::nullopt);
  }

  static Wavefunction2 from_samples(Grid1D grid, std::vector<cplx> a,
                                    SymmetryPolicy policy = SymmetryPolicy::require_exact) {
    const std::size_t n = grid.size();
    if (a.size() != n * n) throw std::invalid_argument("Wavefunction2: size mismatch");
    detail::require_finite(a, "Wavefunction2");
    if (policy == SymmetryPolicy::require_exact) {
      if (max_asymmetry(a, n) != 0.0)
        throw std::invalid_argument("Wavefunction2: amplitude is not exchange symmetric");
    } else {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const cplx v = 0.5 * (a[i * n + j] + a[j * n + i]);
          a[i * n + j] = v;
          a[j * n + i] = v;
        }
    }
    return Wavefunction2(std::move(grid), std::move(a), std::nullopt);
  }

  /// Product state factor(x1) * factor(x2).
  static Wavefunction2 product(const Wavefunction1& factor) {
    const auto& g = factor.grid();
    const std::size_t n = g.size();
    std::vector<cplx> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const cplx v = factor[i] * factor[j];
        a[i * n + j] = v;
        a[j * n + i] = v;
      }
    return Wavefunction2(g, std::move(a), factor);
  }

  const Grid1D& grid() const { return grid_; }
  std::size_t n() const { return grid_.size(); }
  std::span<const cplx> amp() const { return amp_; }
  cplx operator()(std::size_t i, std::size_t j) const { return amp_[i * grid_.size() + j]; }
  /// Present when the state is known to be factor(x1) * factor(x2).
  const Wavefunction1* factor() const { return factor_ ? &*factor_ : nullptr; }

  /// Bilinear interpolation between nodes.
  cplx at(double x1, double x2) const {
    if (!grid_.contains(x1) || !grid_.contains(x2))
      throw std::out_of_range("Wavefunction2::at: point outside grid");
    auto [i, s] = detail::lerp_weights(grid_, x1);
    auto [j, t] = detail::lerp_weights(grid_, x2);
    const auto& a = *this;
    return (1 - s) * ((1 - t) * a(i, j) + t * a(i, j + 1)) + s * ((1 - t) * a(i + 1, j) + t * a(i + 1, j + 1));
  }

  Wavefunction2 scaled(cplx alpha) const {
    auto a = amp_;
    for (auto& z : a) z *= alpha;
    return Wavefunction2(grid_, std::move(a), std::nullopt);
  }

  friend Wavefunction2 operator+(const Wavefunction2& a, const Wavefunction2& b) {
    if (!a.grid_.same_nodes(b.grid_)) throw std::invalid_argument("Wavefunction2: grid mismatch");
    auto s = a.amp_;
    for (std::size_t k = 0; k < s.size(); ++k) s[k] += b.amp_[k];
    return Wavefunction2(a.grid_, std::move(s), std::nullopt);
  }

 private:
  Wavefunction2(Grid1D g, std::vector<cplx> a, std::optional<Wavefunction1> f)
      : grid_(std::move(g)), amp_(std::move(a)), factor_(std::move(f)) {}

  Grid1D grid_;
  std::vector<cplx> amp_;
  std::optional<Wavefunction1> factor_;
};

/// Integral of sampled real data over the grid: composite trapezoid on each
/// smooth segment (segments end at duplicated breakpoints) with
/// Euler-Maclaurin endpoint corrections from one-sided differences.
/// `kinks` lists extra nodes where the derivative may jump; the rule is
/// split there as well.
inline double integrate_samples(const Grid1D& g, std::span<const double> f,
                                std::span<const std::size_t> kinks = {}) {
  if (f.size() != g.size()) throw std::invalid_argument("integrate_samples: size mismatch");
  auto is_kink = [&](std::size_t i) { return std::find(kinks.begin(), kinks.end(), i) != kinks.end(); };
  double total = 0.0;
  std::size_t start = 0;
  const std::size_t n = g.size();
  while (start + 1 < n) {
    std::size_t end = start;
    while (end + 1 < n && g[end + 1] != g[end] && !(end > start && is_kink(end))) ++end;
    if (end > start) {
      const double h = g[start + 1] - g[start];
      double s = 0.5 * (f[start] + f[end]);
      for (std::size_t i = start + 1; i < end; ++i) s += f[i];
      s *= h;
      if (end - start >= 2) {
        const double d0 = (-3.0 * f[start] + 4.0 * f[start + 1] - f[start + 2]) / (2.0 * h);
        const double d1 = (3.0 * f[end] - 4.0 * f[end - 1] + f[end - 2]) / (2.0 * h);
        s -= h * h / 12.0 * (d1 - d0);
      }
      total += s;
    }
    start = (end + 1 < n && g[end + 1] != g[end]) ? end : end + 1;
  }
  return total;
}

inline double norm1(const Wavefunction1& psi) {
  if (const auto* pc = psi.exact()) return pc->norm();
  std::vector<double> d(psi.amp().size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(psi[i]);
  return integrate_samples(psi.grid(), d);
}

inline double norm2(const Wavefunction2& psi) {
  const std::size_t n = psi.n();
  std::vector<double> row(n), rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = std::norm(psi(i, j));
    // the nonlinear part depends on max(x1, x2), so rows kink on the diagonal
    const std::size_t diag[] = {i};
    rows[i] = integrate_samples(psi.grid(), row, diag);
  }
  return integrate_samples(psi.grid(), rows);
}

inline double assert_symmetry(const Wavefunction2& psi) { return max_asymmetry(psi.amp(), psi.n()); }

/// Lab-frame one-photon oracle state. The field lives on cells of width dx;
/// `grid` holds the cell centres and the atom sits on the cell boundary r = 0.
struct LabState1 {
  double t = 0.0;
  Grid1D grid{-1.0, 1.0, 2};
  std::vector<cplx> field;
  cplx excited{};
  /// Moving-frame coordinate is x = r - c t + frame_offset.
  double frame_offset = 0.0;

  double dx() const { return grid.spacing(); }
  double total_norm() const {
    double s = 0.0;
    for (const auto& z : field) s += std::norm(z);
    return s * dx() + std::norm(excited);
  }
};

/// Lab-frame two-photon oracle state. `excited1[j]` is the amplitude for the
/// atom excited with the other photon in cell j; the doubly excited amplitude
/// does not exist.
struct LabState2 {
  double t = 0.0;
  Grid1D grid{-1.0, 1.0, 2};
  std::vector<cplx> field2;  // row-major n x n, symmetric
  std::vector<cplx> excited1;
  double frame_offset = 0.0;

  std::size_t n() const { return grid.size(); }
  double dx() const { return grid.spacing(); }
  cplx phi(std::size_t i, std::size_t j) const { return field2[i * n() + j]; }
  double total_norm() const {
    double f = 0.0, e = 0.0;
    for (const auto& z : field2) f += std::norm(z);
    for (const auto& z : excited1) e += std::norm(z);
    return f * dx() * dx() + 2.0 * e * dx();
  }
};

}  // namespace twophoton
