// Quasiconvex program solver: minimize the pointwise maximum of quasiconvex
// cost terms over a convex domain, with lexicographic tie-breaking, plus an
// independent grid-refinement oracle and GLP property checks.
//
// The solver is a primal minimax descent: at each iterate the terms within an
// activity tolerance of the maximum drive a small linear program for a feasible
// descent direction, followed by a backtracking line search on the true max.
// Correctness for quasiconvex terms over a convex domain follows because every
// local minimizer of such a max is global.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qsmooth/criteria.hpp"
#include "qsmooth/geometry.hpp"
#include "qsmooth/linprog.hpp"
#include "qsmooth/patch.hpp"

namespace qsmooth {

template <int D>
struct QuasiconvexProgram {
  ConvexRegion<D> domain;
  std::vector<CostTerm<D>> terms;
};

// Objective value with its attaining point; ordered first by t, then by the
// coordinates of x in index order.
template <int D>
struct LexValue {
  double t = kInfinity;
  Vec<D> x{};
};

template <int D>
int lex_compare(const LexValue<D>& u, const LexValue<D>& v) {
  if (u.t < v.t) return -1;
  if (u.t > v.t) return 1;
  for (int j = 0; j < D; ++j) {
    if (u.x[j] < v.x[j]) return -1;
    if (u.x[j] > v.x[j]) return 1;
  }
  return 0;
}

enum class SolveStatus { converged, iteration_cap, empty_domain };

template <int D>
struct SolverResult {
  LexValue<D> optimum;
  std::vector<int> active_terms;  // indices within activity tolerance of the max
  int iterations = 0;
  SolveStatus status = SolveStatus::empty_domain;
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 400;
  double activity_abs = 1e-8;  // active set: cost >= max - max(abs, rel*|max|)
  double activity_rel = 1e-6;
  double backtrack = 0.5;
  bool lexicographic = true;  // pull flat optima to the lexicographically least point
};

template <int D>
using CostFn = std::function<double(const Vec<D>&)>;

namespace detail {

template <int D>
double eval_max(std::span<const CostFn<D>> costs, const Vec<D>& x, std::vector<double>& values) {
  values.resize(costs.size());
  double worst = -kInfinity;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    values[i] = costs[i](x);
    worst = std::max(worst, values[i]);
  }
  return worst;
}

template <int D>
std::vector<int> active_set(std::span<const double> values, double worst, const SolveOptions& opt) {
  const double delta = std::max(opt.activity_abs, opt.activity_rel * std::abs(worst));
  std::vector<int> act;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= worst - delta) act.push_back(static_cast<int>(i));
  return act;
}

// Central-difference gradient with one-sided fallback near the +inf cliff.
template <int D>
Vec<D> numeric_gradient(const CostFn<D>& f, const Vec<D>& x, double fx, double h) {
  Vec<D> g{};
  for (int j = 0; j < D; ++j) {
    Vec<D> xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const double fp = f(xp), fm = f(xm);
    if (std::isfinite(fp) && std::isfinite(fm))
      g[j] = (fp - fm) / (2.0 * h);
    else if (std::isfinite(fp))
      g[j] = (fp - fx) / h;
    else if (std::isfinite(fm))
      g[j] = (fx - fm) / h;
    else
      g[j] = 0.0;
  }
  return g;
}

// Longest step along dir that keeps x inside every halfspace, with a small
// interior margin: hugging a wall closer than the margin makes the orientation
// gates of the cost terms flip on floating-point noise.
template <int D>
double max_feasible_step(const ConvexRegion<D>& domain, const Vec<D>& x, const Vec<D>& dir,
                         double margin = 0.0) {
  double t = kInfinity;
  for (const auto& h : domain.halfspaces) {
    const double along = dot(h.normal, dir);
    if (along > 0.0) {
      const double slack = h.slack(x) - margin * std::max(1.0, norm(h.normal));
      t = std::min(t, std::max(slack, 0.0) / along);
    }
  }
  return t;
}

// After convergence on a flat optimum, walk each coordinate down in index order
// while the objective stays within a tight band of the optimum.
template <int D>
Vec<D> lexicographic_polish(std::span<const CostFn<D>> costs, const ConvexRegion<D>& domain,
                            Vec<D> x, double fstar, double scale) {
  std::vector<double> values;
  // Tight band: only genuinely flat directions move the point, so curved
  // optima are not dragged off by the tie-break.
  const double band = 1e-15 * std::max(1.0, std::abs(fstar));
  auto acceptable = [&](const Vec<D>& p) {
    return domain.contains(p, 1e-12) && eval_max<D>(costs, p, values) <= fstar + band;
  };
  for (int j = 0; j < D; ++j) {
    Vec<D> e{};
    e[j] = -1.0;
    double step = scale;
    int guard = 0;
    while (step > 1e-12 * scale && guard++ < 200) {
      Vec<D> trial = x + e * step;
      if (acceptable(trial))
        x = trial;
      else
        step *= 0.5;
    }
  }
  return x;
}

template <int D>
SolverResult<D> solve_minimax_impl(const ConvexRegion<D>& domain, std::span<const CostFn<D>> costs,
                                   Vec<D> x, double scale, const SolveOptions& opt) {
  SolverResult<D> result;
  std::vector<double> values;
  double fx = eval_max<D>(costs, x, values);
  if (!std::isfinite(fx)) {
    // The start point may sit on the domain boundary where costs blow up; nudge
    // toward the deepest point.
    auto cc = chebyshev_center(domain);
    if (cc.feasible) {
      x = cc.center;
      fx = eval_max<D>(costs, x, values);
    }
  }

  const double grad_h = 1e-7 * scale;
  const double wall_margin = 1e-9 * scale;
  double trust = 0.25 * scale;  // box radius of the direction LP
  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    // Facets entering the direction model: every finite facet, offset by its
    // gap below the max. The offsets let the step aim at the balanced point
    // instead of stalling at kinks, and facets that blow up near the domain
    // boundary act as linearized barriers before the line search ever gets
    // there. Capped at the largest values to bound the LP size.
    std::vector<int> model;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (std::isfinite(values[i])) model.push_back(static_cast<int>(i));
    if (model.size() > 48) {
      std::nth_element(model.begin(), model.begin() + 48, model.end(),
                       [&](int a, int b) { return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)]; });
      model.resize(48);
    }

    // Direction LP: minimize beta s.t. (c_i - F) + g_i.v <= beta for modeled
    // facets and n_j.v <= 0 for near-active domain halfspaces, |v| <= trust.
    std::vector<LpConstraint<D + 1>> cons;
    cons.reserve(model.size() + domain.halfspaces.size());
    double beta_bound = 1.0;
    for (int i : model) {
      const Vec<D> g = numeric_gradient<D>(costs[static_cast<std::size_t>(i)], x,
                                           values[static_cast<std::size_t>(i)], grad_h);
      LpConstraint<D + 1> cn;
      for (int j = 0; j < D; ++j) cn.a[j] = g[j];
      cn.a[D] = -1.0;
      cn.b = fx - values[static_cast<std::size_t>(i)];
      beta_bound = std::max(beta_bound, 4.0 * (std::abs(cn.b) + norm(g) * trust * D));
      cons.push_back(cn);
    }
    for (const auto& h : domain.halfspaces) {
      const double nn = std::max(norm(h.normal), 1e-30);
      LpConstraint<D + 1> cn;
      for (int j = 0; j < D; ++j) cn.a[j] = h.normal[j] / nn;
      cn.a[D] = 0.0;
      cn.b = std::max(h.slack(x) / nn - wall_margin, 0.0);  // stay inside, first order
      cons.push_back(cn);
    }
    std::array<double, D + 1> obj{};
    obj[D] = 1.0;
    // The step box is the trust radius; the modeled-decrease variable gets a
    // box wide enough never to clamp, so the LP picks the best-balanced
    // direction rather than an arbitrary one that merely reaches the clamp.
    std::array<double, D + 1> bounds;
    bounds.fill(trust);
    bounds[D] = beta_bound;
    const auto lp = seidel_lp<D + 1>(obj, cons, bounds);
    if (!lp.feasible()) break;  // v = 0 is always feasible, so this is numeric noise

    Vec<D> dir{};
    for (int j = 0; j < D; ++j) dir[j] = lp.x[j];
    const double rate = lp.x[D];
    if (rate >= -opt.tol * std::max(1.0, std::abs(fx))) {
      // No useful descent at this radius. A genuine optimum shows no descent at
      // the full radius either; otherwise the radius was just too small.
      if (trust >= 0.2 * scale) break;
      trust = std::min(trust * 16.0, scale);
      continue;
    }
    if (norm(dir) <= 1e-16 * scale) break;

    // Backtracking line search on the true maximum; the model predicts a
    // decrease of t*|rate| at fraction t of the step.
    double t_max = max_feasible_step(domain, x, dir, wall_margin);
    if (t_max <= 0.0) {
      // Sitting exactly on a wall with the step leaning into it: project the
      // direction onto the tangent of every touching halfspace and retry.
      for (int pass = 0; pass < 2 && t_max <= 0.0; ++pass) {
        for (const auto& h : domain.halfspaces) {
          const double nn = squared_norm(h.normal);
          if (nn <= 0.0) continue;
          const double along = dot(h.normal, dir);
          if (along > 0.0 && h.slack(x) <= 2.0 * wall_margin * std::sqrt(nn) + 1e-12 * scale)
            dir -= h.normal * (along / nn);
        }
        t_max = max_feasible_step(domain, x, dir, wall_margin);
      }
      if (norm(dir) <= 1e-16 * scale || t_max <= 0.0) break;
    }
    // Stay strictly inside: landing exactly on a wall leaves no room for the
    // next iteration's probes (boundary optima are approached geometrically).
    double step = std::min(0.999 * t_max, 1.0);
    bool improved = false;
    std::vector<double> trial_values;
    while (step > 1e-14) {
      const Vec<D> trial = x + dir * step;
      const double ft = eval_max<D>(costs, trial, trial_values);
      if (ft < fx + 1e-4 * step * rate) {  // rate < 0
        x = trial;
        fx = ft;
        values = trial_values;
        improved = true;
        break;
      }
      step *= opt.backtrack;
    }
    if (!improved) break;
    // Grow the trust radius on clean full steps, track the accepted step
    // otherwise; poor models shrink until the linearization is trustworthy.
    if (step >= 0.999)
      trust = std::min(trust * 2.0, scale);
    else
      trust = std::max(2.0 * step * norm(dir), 1e-13 * scale);
  }

  if (opt.lexicographic) x = lexicographic_polish<D>(costs, domain, x, fx, scale);
  fx = eval_max<D>(costs, x, values);

  result.optimum = {fx, x};
  result.active_terms = active_set<D>(values, fx, opt);
  result.iterations = iter;
  result.status = (iter >= opt.max_iter) ? SolveStatus::iteration_cap : SolveStatus::converged;
  return result;
}

template <int D>
double domain_scale(const ConvexRegion<D>& domain) {
  double s = 1.0;
  for (const auto& h : domain.halfspaces) {
    const double n = norm(h.normal);
    if (n > 0.0) s = std::max(s, std::abs(h.offset) / n);
  }
  return s;
}

template <int D>
std::vector<CostFn<D>> weighted_costs(std::span<const CostTerm<D>> terms) {
  std::vector<CostFn<D>> costs;
  costs.reserve(terms.size());
  for (const auto& term : terms)
    costs.push_back([term](const Vec<D>& p) { return term.criterion.weight * element_cost(term, p); });
  return costs;
}

// Terms expanded into smooth facets, remembering which term each facet serves.
template <int D>
struct FacetSet {
  std::vector<CostFn<D>> costs;
  std::vector<int> parent;
};

template <int D>
FacetSet<D> facet_costs(std::span<const CostTerm<D>> terms) {
  FacetSet<D> fs;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::size_t before = fs.costs.size();
    append_cost_facets<D>(terms[i], fs.costs);
    for (std::size_t k = before; k < fs.costs.size(); ++k)
      fs.parent.push_back(static_cast<int>(i));
  }
  return fs;
}

template <int D>
void remap_active_to_terms(SolverResult<D>& result, const std::vector<int>& parent) {
  std::vector<int> terms;
  for (int facet : result.active_terms) {
    const int t = parent[static_cast<std::size_t>(facet)];
    if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
  }
  std::sort(terms.begin(), terms.end());
  result.active_terms = std::move(terms);
}

}  // namespace detail

// Callable-core solver for custom quasiconvex costs.
template <int D>
SolverResult<D> solve_minimax(const ConvexRegion<D>& domain, std::span<const CostFn<D>> costs,
                              const Vec<D>& start, const SolveOptions& opt = {}) {
  if (costs.empty()) throw std::invalid_argument("solve_minimax: no cost terms");
  auto cc = chebyshev_center(domain);
  if (!cc.feasible) {
    SolverResult<D> r;
    r.status = SolveStatus::empty_domain;
    return r;
  }
  const Vec<D> x0 = domain.contains(start, 1e-9) ? start : cc.center;
  return detail::solve_minimax_impl<D>(domain, costs, x0, detail::domain_scale(domain), opt);
}

template <int D>
SolverResult<D> solve(const QuasiconvexProgram<D>& program, const Vec<D>& start,
                      const SolveOptions& opt = {}) {
  for (const auto& term : program.terms)
    if (term.criterion.quasiconvex == Quasiconvexity::no)
      throw std::invalid_argument("solve: program contains a non-quasiconvex term; "
                                  "use the special placement solvers");
  const auto fs = detail::facet_costs<D>(program.terms);
  auto result = solve_minimax<D>(program.domain, fs.costs, start, opt);
  detail::remap_active_to_terms(result, fs.parent);
  return result;
}

// Start from the Chebyshev center of the domain.
template <int D>
SolverResult<D> solve(const QuasiconvexProgram<D>& program, const SolveOptions& opt = {}) {
  auto cc = chebyshev_center(program.domain);
  if (!cc.feasible) {
    SolverResult<D> r;
    r.status = SolveStatus::empty_domain;
    return r;
  }
  return solve(program, cc.center, opt);
}

namespace detail {

template <int D>
struct GridState {
  Vec<D> lo{}, hi{};
};

// Best feasible grid values, optionally keeping several well-separated
// incumbents so refinement can chase more than one basin of a non-quasiconvex
// objective. Separation is in units of the current cell pitch.
template <int D>
struct IncumbentSet {
  int capacity = 1;
  double separation = 0.0;
  std::vector<LexValue<D>> items;

  void offer(const LexValue<D>& cand) {
    for (auto& held : items) {
      if (distance(held.x, cand.x) < separation) {
        if (lex_compare(cand, held) < 0) held = cand;
        return;
      }
    }
    items.push_back(cand);
    std::sort(items.begin(), items.end(),
              [](const LexValue<D>& a, const LexValue<D>& b) { return lex_compare(a, b) < 0; });
    if (static_cast<int>(items.size()) > capacity) items.resize(static_cast<std::size_t>(capacity));
  }
  bool empty() const { return items.empty(); }
  const LexValue<D>& best() const { return items.front(); }
};

// One scan over a cell-centered n^D grid; returns false if no feasible cell.
// `shell`, when given, receives the best value over the outermost cell layer,
// which refinement uses to notice valleys leaving the window.
template <int D>
bool grid_scan(const ConvexRegion<D>& domain, std::span<const CostFn<D>> costs,
               const GridState<D>& box, int n, IncumbentSet<D>& incumbents, long& evaluated,
               IncumbentSet<D>* shell = nullptr) {
  Vec<D> step{};
  for (int j = 0; j < D; ++j) step[j] = (box.hi[j] - box.lo[j]) / n;
  bool any = false;

  auto visit = [&](const Vec<D>& p, bool on_shell) {
    for (const auto& h : domain.halfspaces)
      if (h.slack(p) < 0.0) return;
    double worst = -kInfinity;
    for (const auto& f : costs) {
      const double c = f(p);
      if (c == kInfinity) return;
      worst = std::max(worst, c);
    }
    ++evaluated;
    any = true;
    incumbents.offer({worst, p});
    if (shell && on_shell) shell->offer({worst, p});
  };

  if constexpr (D == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        visit({box.lo[0] + (i + 0.5) * step[0], box.lo[1] + (j + 0.5) * step[1]},
              i == 0 || j == 0 || i == n - 1 || j == n - 1);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          visit({box.lo[0] + (i + 0.5) * step[0], box.lo[1] + (j + 0.5) * step[1],
                 box.lo[2] + (k + 0.5) * step[2]},
                i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1);
  }
  return any;
}

}  // namespace detail

// Brute-force verifier: evaluates the weighted max cost on a 64x64 (x64 in 3D)
// grid over the domain's bounding box, masks infeasible cells and refines by a
// factor of four around the incumbent for `levels` rounds. Independent of the
// descent path; accurate to the final grid resolution for continuous objectives.
// `starts` > 0 pins the number of refinement seeds; 0 (default) keeps up to
// four well-separated coarse incumbents whose values are nearly tied, so flat
// landscapes get refined in every plausible basin and sharp ones stay cheap.
template <int D>
SolverResult<D> grid_oracle_minimax(const ConvexRegion<D>& domain, std::span<const CostFn<D>> costs,
                                    int levels = 3, int starts = 0) {
  SolverResult<D> result;
  const auto poly = halfspace_intersection(domain);
  if (poly.empty || poly.vertices.empty()) {
    result.status = SolveStatus::empty_domain;
    return result;
  }
  if (!poly.bounded) throw std::invalid_argument("grid_oracle: domain must be bounded");

  detail::GridState<D> box;
  box.lo = poly.vertices.front();
  box.hi = poly.vertices.front();
  for (const auto& v : poly.vertices)
    for (int j = 0; j < D; ++j) {
      box.lo[j] = std::min(box.lo[j], v[j]);
      box.hi[j] = std::max(box.hi[j], v[j]);
    }
  // Tiny margin so boundary optima stay inside cell coverage.
  double extent = 0.0;
  for (int j = 0; j < D; ++j) {
    const double pad = 1e-9 * std::max(1.0, box.hi[j] - box.lo[j]);
    box.lo[j] -= pad;
    box.hi[j] += pad;
    extent = std::max(extent, box.hi[j] - box.lo[j]);
  }

  // Refinement quadruples the resolution each round: the window shrinks by
  // 4 * (n0 / n_refine) so the pitch is always a quarter of the previous one.
  const int n0 = 64;
  const int n_refine = (D == 2) ? 64 : 32;
  const double window = 1.0 / (4.0 * n0 / n_refine);  // fraction of current box
  long evaluated = 0;

  detail::IncumbentSet<D> seeds;
  seeds.capacity = (starts > 0) ? starts : 4;
  seeds.separation = 4.0 * extent / n0;

  bool found = detail::grid_scan<D>(domain, costs, box, n0, seeds, evaluated);
  int densify = n0;
  while (!found && densify <= ((D == 2) ? 512 : 128)) {
    densify *= 2;  // thin domain: rescan the whole box at a finer pitch
    seeds.separation = 4.0 * extent / densify;
    found = detail::grid_scan<D>(domain, costs, box, densify, seeds, evaluated);
  }
  if (!found) {
    result.status = SolveStatus::empty_domain;
    return result;
  }
  if (starts == 0) {
    // Adaptive: drop coarse incumbents clearly worse than the best one.
    const double tie_band = 2e-2 * std::max(1.0, std::abs(seeds.best().t));
    std::vector<LexValue<D>> kept;
    for (const auto& s : seeds.items)
      if (s.t <= seeds.best().t + tie_band) kept.push_back(s);
    seeds.items = std::move(kept);
  }

  LexValue<D> best = seeds.best();
  for (const auto& seed : seeds.items) {
    detail::GridState<D> cur = box;
    detail::IncumbentSet<D> local;
    local.capacity = 1;
    local.items = {seed};
    for (int round = 0; round < levels; ++round) {
      auto rescan = [&](const Vec<D>& center, double shrink, detail::IncumbentSet<D>& shell) {
        detail::GridState<D> next;
        for (int j = 0; j < D; ++j) {
          const double half = 0.5 * shrink * (cur.hi[j] - cur.lo[j]);
          next.lo[j] = std::max(box.lo[j], center[j] - half);
          next.hi[j] = std::min(box.hi[j], center[j] + half);
        }
        cur = next;
        shell.items.clear();
        shell.capacity = 1;
        detail::grid_scan<D>(domain, costs, cur, n_refine, local, evaluated, &shell);
      };

      detail::IncumbentSet<D> shell;
      rescan(local.best().x, window, shell);
      // Pan while a near-flat valley leaves the window: the outer cell layer
      // then holds values close to the incumbent, so recenter there and look
      // again at the same resolution before shrinking further. Panning stops
      // as soon as it stops making headway, so flat plateaus cost one look.
      for (int pan = 0; pan < 10; ++pan) {
        if (shell.empty()) break;
        const double pan_tol = 5e-4 * std::max(1.0, std::abs(local.best().t));
        if (shell.best().t > local.best().t + pan_tol) break;
        const Vec<D> target = shell.best().x;
        const double before = local.best().t;
        rescan(target, 1.0, shell);
        if (before - local.best().t < 0.1 * pan_tol) break;
      }
    }
    if (lex_compare(local.best(), best) < 0) best = local.best();
  }

  // Hooke-Jeeves polish: exploratory axis probes plus pattern extrapolation
  // walk the shallow curved valleys that window refinement cannot traverse.
  // Derivative-free and independent of the descent solver's machinery.
  {
    const double step0 = 8.0 * extent / (n0 * std::pow(4.0, levels));
    double step = step0;
    const double step_floor = 1e-3 * step0;
    int budget = 60000;
    auto probe = [&](const Vec<D>& p) -> double {
      --budget;
      for (const auto& h : domain.halfspaces)
        if (h.slack(p) < 0.0) return kInfinity;
      double worst = -kInfinity;
      for (const auto& f : costs) {
        const double c = f(p);
        if (c == kInfinity) return kInfinity;
        worst = std::max(worst, c);
      }
      return worst;
    };
    auto explore = [&](LexValue<D> from, double s) {
      const LexValue<D> start = from;
      for (int j = 0; j < D; ++j)
        for (double sign : {1.0, -1.0}) {
          Vec<D> trial = from.x;
          trial[j] += sign * s;
          const double ft = probe(trial);
          if (ft < from.t) {
            from = {ft, trial};
            break;
          }
        }
      if (from.t < start.t) return from;
      // Axis moves all point uphill in a diagonal kinked valley; try corners.
      for (int mask = 0; mask < (1 << D); ++mask) {
        Vec<D> trial = start.x;
        for (int j = 0; j < D; ++j) trial[j] += ((mask >> j) & 1) ? s : -s;
        const double ft = probe(trial);
        if (ft < from.t) from = {ft, trial};
      }
      return from;
    };
    for (int restart = 0; restart < 4 && budget > 0; ++restart) {
      const double before_restart = best.t;
      step = step0;
      while (step > step_floor && budget > 0) {
        LexValue<D> moved = explore(best, step);
        if (moved.t < best.t) {
          // Pattern moves: keep extrapolating along the successful offset.
          while (budget > 0) {
            Vec<D> extrapolated = moved.x + (moved.x - best.x);
            best = moved;
            LexValue<D> probe_base{probe(extrapolated), extrapolated};
            if (!std::isfinite(probe_base.t)) break;
            moved = explore(probe_base, step);
            if (moved.t >= best.t) break;
          }
        } else {
          step *= 0.5;
        }
      }
      if (before_restart - best.t < 1e-12 * std::max(1.0, std::abs(best.t))) break;
    }
  }

  result.optimum = best;
  result.iterations = static_cast<int>(std::min<long>(evaluated, 1000000000L));
  result.status = SolveStatus::converged;
  std::vector<double> values;
  detail::eval_max<D>(costs, best.x, values);
  SolveOptions opt;
  result.active_terms = detail::active_set<D>(values, best.t, opt);
  return result;
}

template <int D>
SolverResult<D> grid_oracle(const QuasiconvexProgram<D>& program, int levels = 3) {
  const auto costs = detail::weighted_costs<D>(program.terms);
  auto result = grid_oracle_minimax<D>(program.domain, costs, levels);
  return result;
}

// GLP Property 1 (monotonicity under constraint insertion) and the observable
// consequence of Property 2, both checked with the grid oracle.
template <int D>
struct MonotonicityReport {
  struct Violation {
    std::size_t pair_index;
    std::string what;
  };
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

template <int D>
MonotonicityReport<D> check_glp_monotonicity(
    const QuasiconvexProgram<D>& program,
    std::span<const std::pair<std::vector<int>, std::vector<int>>> subset_pairs, int levels = 3,
    double tol = 2e-3) {
  MonotonicityReport<D> report;
  auto sub_program = [&](const std::vector<int>& idx) {
    QuasiconvexProgram<D> sub;
    sub.domain = program.domain;
    for (int i : idx) sub.terms.push_back(program.terms[static_cast<std::size_t>(i)]);
    return sub;
  };

  for (std::size_t p = 0; p < subset_pairs.size(); ++p) {
    const auto& [a_idx, b_idx] = subset_pairs[p];
    for (int i : a_idx)
      if (std::find(b_idx.begin(), b_idx.end(), i) == b_idx.end())
        throw std::invalid_argument("check_glp_monotonicity: A must be a subset of B");

    const auto fa = grid_oracle(sub_program(a_idx), levels);
    const auto fb = grid_oracle(sub_program(b_idx), levels);
    if (fa.status == SolveStatus::empty_domain || fb.status == SolveStatus::empty_domain) continue;

    const double scale = std::max({1.0, std::abs(fa.optimum.t), std::abs(fb.optimum.t)});
    if (fa.optimum.t > fb.optimum.t + tol * scale)
      report.violations.push_back({p, "f(A) > f(B)"});

    // Property 2 consequence: if x*_A lies strictly inside kappa_j(t*_A) then
    // inserting j cannot change the optimum. (The converse direction has no
    // quantitative gap, so only the safe implication is asserted.)
    for (int j : b_idx) {
      if (std::find(a_idx.begin(), a_idx.end(), j) != a_idx.end()) continue;
      const double cost_j = program.terms[static_cast<std::size_t>(j)].criterion.weight *
                            element_cost(program.terms[static_cast<std::size_t>(j)], fa.optimum.x);
      if (cost_j > fa.optimum.t - 3.0 * tol * scale) continue;  // not clearly inside
      auto with_j = a_idx;
      with_j.push_back(j);
      const auto fj = grid_oracle(sub_program(with_j), levels);
      if (fj.status == SolveStatus::empty_domain) continue;
      if (std::abs(fj.optimum.t - fa.optimum.t) > tol * scale)
        report.violations.push_back({p, "x*_A inside kappa_j(t*) but f(A+{j}) differs"});
    }
  }
  return report;
}

}  // namespace qsmooth
