#pragma once

// Exponentially weighted tail integrals
//
//     F(x) = integral_x^inf exp(-k (x' - x)) f(x') dx'
//
// for f given as samples on a Grid1D (linear interpolation between nodes,
// zero outside the grid). Each refinement level m evaluates the composite
// trapezoid rule on m sub-intervals per grid segment with an O(N m)
// backward recursion.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "model.hpp"

namespace twophoton {

struct RefinementReport {
  int refinements = 0;  // number of halvings beyond the base level
  bool converged = true;
  double last_change = 0.0;
};

struct RefinementPolicy {
  double tolerance = 1e-8;  // sup-norm change between successive levels
  int max_refinements = 4;
};

template <class V>
class TailIntegrator {
 public:
  TailIntegrator(const Grid1D& grid, std::span<const V> f, double rate, int subdivisions)
      : grid_(grid), f_(f), rate_(rate), m_(subdivisions) {
    const std::size_t n = grid.size();
    // tail_[i] = F at node i; sub-node values are folded into the recursion.
    tail_.assign(n, V{});
    for (std::size_t i = n - 1; i-- > 0;) {
      const double h = grid[i + 1] - grid[i];
      if (h == 0.0) {
        tail_[i] = tail_[i + 1];
        continue;
      }
      const double d = h / m_;
      const double decay = std::exp(-rate_ * d);
      V acc = tail_[i + 1];
      for (int r = m_; r-- > 0;) {
        const double wa = static_cast<double>(r) / m_;
        const double wb = static_cast<double>(r + 1) / m_;
        const V fa = (1.0 - wa) * f_[i] + wa * f_[i + 1];
        const V fb = (1.0 - wb) * f_[i] + wb * f_[i + 1];
        acc = decay * acc + (0.5 * d) * (fa + decay * fb);
      }
      tail_[i] = acc;
    }
  }

  /// F at an arbitrary x. The partial sub-interval [x, s] uses a single
  /// trapezoid panel.
  V operator()(double x) const {
    if (x >= grid_.x_max()) return V{};
    if (x < grid_.x_min()) return std::exp(-rate_ * (grid_.x_min() - x)) * tail_[0];
    const std::size_t i = grid_.locate(x);
    const double h = grid_[i + 1] - grid_[i];
    const double d = h / m_;
    const double u = (x - grid_[i]) / d;
    int r = static_cast<int>(std::floor(u));
    if (r >= m_) r = m_ - 1;
    const double s_pos = grid_[i] + (r + 1) * d;
    // F at sub-node s by stepping back from node i+1.
    V fs = tail_[i + 1];
    const double decay = std::exp(-rate_ * d);
    for (int q = m_ - 1; q > r; --q) {
      const double wa = static_cast<double>(q) / m_;
      const double wb = static_cast<double>(q + 1) / m_;
      const V fa = (1.0 - wa) * f_[i] + wa * f_[i + 1];
      const V fb = (1.0 - wb) * f_[i] + wb * f_[i + 1];
      fs = decay * fs + (0.5 * d) * (fa + decay * fb);
    }
    const double w = (x - grid_[i]) / h;
    const V fx = (1.0 - w) * f_[i] + w * f_[i + 1];
    const double ws = static_cast<double>(r + 1) / m_;
    const V fsv = (1.0 - ws) * f_[i] + ws * f_[i + 1];
    const double part = s_pos - x;
    const double e = std::exp(-rate_ * part);
    return e * fs + (0.5 * part) * (fx + e * fsv);
  }

 private:
  const Grid1D& grid_;
  std::span<const V> f_;
  double rate_;
  int m_;
  std::vector<V> tail_;
};

/// Evaluates F at each query point, doubling the sub-division count until
/// successive levels agree to policy.tolerance in sup norm.
template <class V>
std::vector<V> refined_tail_integrals(const Grid1D& grid, std::span<const V> f, double rate,
                                      std::span<const double> queries, const RefinementPolicy& policy,
                                      RefinementReport* report = nullptr) {
  auto level = [&](int m) {
    TailIntegrator<V> t(grid, f, rate, m);
    std::vector<V> out(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q) out[q] = t(queries[q]);
    return out;
  };
  std::vector<V> prev = level(1);
  RefinementReport rep;
  rep.converged = false;
  int m = 1;
  for (int r = 1; r <= policy.max_refinements; ++r) {
    m *= 2;
    std::vector<V> cur = level(m);
    double change = 0.0;
    for (std::size_t q = 0; q < cur.size(); ++q) change = std::max(change, std::abs(cur[q] - prev[q]));
    prev = std::move(cur);
    rep.refinements = r;
    rep.last_change = change;
    if (change < policy.tolerance) {
      rep.converged = true;
      break;
    }
  }
  if (policy.max_refinements == 0) rep.converged = true;
  if (report) *report = rep;
  return prev;
}

}  // namespace twophoton
