// Seidel's randomized incremental linear programming for up to four variables.
// Minimizes c.x subject to a_i.x <= b_i inside an implicit box |x_j| <= bound.
// Expected linear time in the constraint count for fixed dimension, which is all
// the solver work this project needs: Chebyshev centers, infeasibility
// certificates, and minimax descent directions.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "qsmooth/vec.hpp"

namespace qsmooth {

template <int N>
struct LpConstraint {
  std::array<double, N> a{};
  double b = 0.0;
};

enum class LpStatus { optimal, infeasible };

template <int N>
struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::array<double, N> x{};
  bool feasible() const { return status == LpStatus::optimal; }
};

namespace detail {

constexpr double kLpEps = 1e-12;

template <int N>
double lp_row_scale(const LpConstraint<N>& cn) {
  double s = std::abs(cn.b);
  for (double v : cn.a) s = std::max(s, std::abs(v));
  return std::max(s, 1.0);
}

// 1-D base case: clip the interval [-bound, bound].
template <int N>
LpResult<1> lp_solve_1d(const std::array<double, 1>& c, const std::vector<LpConstraint<1>>& cons,
                        const std::array<double, 1>& bounds) {
  double lo = -bounds[0], hi = bounds[0];
  for (const auto& cn : cons) {
    const double scale = lp_row_scale(cn);
    if (std::abs(cn.a[0]) <= kLpEps * scale) {
      if (cn.b < -kLpEps * scale) return {};
      continue;
    }
    const double v = cn.b / cn.a[0];
    if (cn.a[0] > 0.0)
      hi = std::min(hi, v);
    else
      lo = std::max(lo, v);
  }
  if (lo > hi + kLpEps * std::max(1.0, std::abs(lo))) return {};
  LpResult<1> r;
  r.status = LpStatus::optimal;
  r.x[0] = (c[0] > 0.0) ? lo : (c[0] < 0.0 ? hi : std::clamp(0.0, lo, hi));
  return r;
}

template <int N>
LpResult<N> lp_solve_rec(const std::array<double, N>& c, const std::vector<LpConstraint<N>>& cons,
                         const std::array<double, N>& bounds, std::mt19937& rng);

// Substitute variable `k` using equality eq.a . x = eq.b and recurse in N-1 vars.
template <int N>
LpResult<N> lp_solve_on_boundary(const std::array<double, N>& c,
                                 const std::vector<LpConstraint<N>>& active,
                                 const LpConstraint<N>& eq, const std::array<double, N>& bounds,
                                 std::mt19937& rng) {
  static_assert(N >= 2);
  int k = 0;
  for (int j = 1; j < N; ++j)
    if (std::abs(eq.a[j]) > std::abs(eq.a[k])) k = j;
  const double ak = eq.a[k];
  if (std::abs(ak) <= kLpEps * lp_row_scale(eq)) return {};  // degenerate row

  auto reduce_point = [&](const std::array<double, N - 1>& y) {
    std::array<double, N> x{};
    double xk = eq.b / ak;
    int jj = 0;
    for (int j = 0; j < N; ++j) {
      if (j == k) continue;
      x[j] = y[jj];
      xk -= eq.a[j] / ak * y[jj];
      ++jj;
    }
    x[k] = xk;
    return x;
  };

  // Reduced objective: c.x with x_k eliminated (constant offset dropped).
  std::array<double, N - 1> cr{};
  std::array<double, N - 1> br{};
  {
    int jj = 0;
    for (int j = 0; j < N; ++j) {
      if (j == k) continue;
      cr[jj] = c[j] - c[k] * eq.a[j] / ak;
      br[jj] = bounds[j];
      ++jj;
    }
  }

  std::vector<LpConstraint<N - 1>> red;
  red.reserve(active.size() + 2);
  auto push_reduced = [&](const LpConstraint<N>& cn) {
    LpConstraint<N - 1> r;
    int jj = 0;
    for (int j = 0; j < N; ++j) {
      if (j == k) continue;
      r.a[jj++] = cn.a[j] - cn.a[k] * eq.a[j] / ak;
    }
    r.b = cn.b - cn.a[k] * eq.b / ak;
    red.push_back(r);
  };
  for (const auto& cn : active) push_reduced(cn);
  // Keep the eliminated variable inside its box.
  {
    LpConstraint<N> up, dn;
    up.a[k] = 1.0;
    up.b = bounds[k];
    dn.a[k] = -1.0;
    dn.b = bounds[k];
    push_reduced(up);
    push_reduced(dn);
  }

  LpResult<N - 1> sub;
  if constexpr (N - 1 == 1)
    sub = lp_solve_1d<1>(cr, red, br);
  else
    sub = lp_solve_rec<N - 1>(cr, red, br, rng);
  if (!sub.feasible()) return {};
  LpResult<N> r;
  r.status = LpStatus::optimal;
  r.x = reduce_point(sub.x);
  return r;
}

template <int N>
LpResult<N> lp_solve_rec(const std::array<double, N>& c, const std::vector<LpConstraint<N>>& cons,
                         const std::array<double, N>& bounds, std::mt19937& rng) {
  LpResult<N> cur;
  cur.status = LpStatus::optimal;
  for (int j = 0; j < N; ++j) cur.x[j] = (c[j] > 0.0) ? -bounds[j] : bounds[j];

  std::vector<int> order(cons.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<LpConstraint<N>> active;
  active.reserve(cons.size());
  for (std::size_t step = 0; step < order.size(); ++step) {
    const auto& cn = cons[static_cast<std::size_t>(order[step])];
    const double scale = lp_row_scale(cn);
    const double viol = std::inner_product(cn.a.begin(), cn.a.end(), cur.x.begin(), 0.0) - cn.b;
    if (viol > kLpEps * scale) {
      if constexpr (N == 1) {
        std::vector<LpConstraint<1>> all(active.begin(), active.end());
        all.push_back(cn);
        cur = lp_solve_1d<1>(c, all, bounds);
      } else {
        cur = lp_solve_on_boundary<N>(c, active, cn, bounds, rng);
      }
      if (!cur.feasible()) return {};
    }
    active.push_back(cn);
  }
  return cur;
}

}  // namespace detail

// Minimize c.x subject to the given constraints and |x_j| <= bounds[j].
template <int N>
LpResult<N> seidel_lp(const std::array<double, N>& c, std::span<const LpConstraint<N>> cons,
                      const std::array<double, N>& bounds) {
  std::vector<LpConstraint<N>> all(cons.begin(), cons.end());
  // Deterministic shuffle; seeded by problem size so repeated runs agree.
  std::mt19937 rng(static_cast<std::uint32_t>(0x9e3779b9u ^ (all.size() * 2654435761u)));
  return detail::lp_solve_rec<N>(c, all, bounds, rng);
}

template <int N>
LpResult<N> seidel_lp(const std::array<double, N>& c, std::span<const LpConstraint<N>> cons,
                      double bound) {
  std::array<double, N> bounds;
  bounds.fill(bound);
  return seidel_lp<N>(c, cons, bounds);
}

}  // namespace qsmooth
