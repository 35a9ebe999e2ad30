// Placement solvers for criteria whose feasible regions are bounded by lines
// and circles but are not convex: min-max angle and min-max circumradius via
// binary search with exact per-threshold feasibility, and the kernel-constrained
// Fermat-Weber point via projected Weiszfeld iteration.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qsmooth/geometry.hpp"
#include "qsmooth/patch.hpp"

namespace qsmooth {

// One constraint of a threshold arrangement; membership is a single sign test.
struct CircleLineConstraint {
  enum class Kind { halfplane, disk, disk_complement };
  Kind kind = Kind::halfplane;
  Halfspace<2> plane{};
  Ball<2> ball{};

  bool satisfied(const Vec2& p, double eps = 1e-9) const {
    switch (kind) {
      case Kind::halfplane:
        return plane.contains(p, eps);
      case Kind::disk:
        return distance(p, ball.center) <= ball.radius + eps * std::max(1.0, ball.radius);
      case Kind::disk_complement:
        return distance(p, ball.center) >= ball.radius - eps * std::max(1.0, ball.radius);
    }
    return false;
  }
};

struct CandidatePoint {
  Vec2 location{};
  std::array<int, 3> defining{-1, -1, -1};  // constraint indices witnessing the point
  int defining_count = 0;
};

struct PlacementResult {
  Vec2 point{};
  double value = kInfinity;  // achieved max angle / max circumradius
  int iterations = 0;
  bool feasible = false;
};

namespace detail {

// Circle through the endpoints of the segment (a,b) whose arc on the side of
// unit normal u sees the segment at inscribed angle theta.
inline Ball<2> inscribed_angle_circle(const Vec2& a, const Vec2& b, const Vec2& u, double theta) {
  const Vec2 mid = 0.5 * (a + b);
  const double h = 0.5 * distance(a, b);
  const double s = std::sin(theta);
  return {mid + u * (h * std::cos(theta) / s), h / s};
}

inline std::optional<Vec2> line_line(const Halfspace<2>& p, const Halfspace<2>& q) {
  Vec2 out;
  if (!solve2x2(p.normal, p.offset, q.normal, q.offset, out)) return std::nullopt;
  return out;
}

inline void line_circle(const Halfspace<2>& p, const Ball<2>& ball, std::vector<Vec2>& out) {
  const double nn = norm(p.normal);
  if (nn <= 0.0) return;
  const Vec2 n = p.normal / nn;
  const double d = (p.offset / nn) - dot(n, ball.center);  // signed distance center->line
  const double disc = ball.radius * ball.radius - d * d;
  const Vec2 foot = ball.center + n * d;
  if (disc >= 0.0) {
    const double t = std::sqrt(std::max(disc, 0.0));
    const Vec2 tang = perp(n);
    out.push_back(foot + tang * t);
    out.push_back(foot - tang * t);
  }
  // Tangency-style extrema against the line.
  out.push_back(foot);
  out.push_back(ball.center + n * ball.radius);
  out.push_back(ball.center - n * ball.radius);
}

inline void circle_circle(const Ball<2>& p, const Ball<2>& q, std::vector<Vec2>& out) {
  const Vec2 d = q.center - p.center;
  const double dist2 = squared_norm(d);
  if (dist2 <= 1e-28) return;
  const double dist = std::sqrt(dist2);
  const double a = (dist2 + p.radius * p.radius - q.radius * q.radius) / (2.0 * dist);
  const double disc = p.radius * p.radius - a * a;
  const Vec2 u = d / dist;
  const Vec2 base = p.center + u * a;
  if (disc >= 0.0) {
    const double t = std::sqrt(std::max(disc, 0.0));
    const Vec2 tang = perp(u);
    out.push_back(base + tang * t);
    out.push_back(base - tang * t);
  }
  // Extremes along the line of centers.
  out.push_back(p.center + u * p.radius);
  out.push_back(p.center - u * p.radius);
  out.push_back(q.center + u * q.radius);
  out.push_back(q.center - u * q.radius);
}

// Enumerate arrangement vertices and tangency candidates, then accept the
// threshold iff some candidate satisfies every constraint. At the optimal
// threshold the feasible set has empty interior, so its points lie on
// constraint boundaries.
inline std::optional<CandidatePoint> feasible_point(
    std::span<const CircleLineConstraint> cons, std::span<const Vec2> seeds,
    const std::function<bool(const Vec2&)>& validate, double eps = 1e-9) {
  const int n = static_cast<int>(cons.size());
  // The sign tests admit isolated degenerate points where several boundaries
  // meet tangentially (a kernel corner collapses its incident elements), so a
  // candidate must also pass direct evaluation of the thresholded measure.
  auto admissible = [&](const Vec2& p) {
    for (const auto& c : cons)
      if (!c.satisfied(p, eps)) return false;
    return !validate || validate(p);
  };

  // Interior seeds first: needed when the feasible set has volume but no
  // constraint boundary passes through the enumerated arrangement vertices.
  for (const auto& s : seeds)
    if (admissible(s)) {
      CandidatePoint cand;
      cand.location = s;
      return cand;
    }

  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      pts.clear();
      const auto& ci = cons[static_cast<std::size_t>(i)];
      const auto& cj = cons[static_cast<std::size_t>(j)];
      const bool line_i = ci.kind == CircleLineConstraint::Kind::halfplane;
      const bool line_j = cj.kind == CircleLineConstraint::Kind::halfplane;
      if (line_i && line_j) {
        if (auto p = line_line(ci.plane, cj.plane)) pts.push_back(*p);
      } else if (line_i) {
        line_circle(ci.plane, cj.ball, pts);
      } else if (line_j) {
        line_circle(cj.plane, ci.ball, pts);
      } else {
        circle_circle(ci.ball, cj.ball, pts);
      }
      for (const auto& p : pts)
        if (admissible(p)) {
          CandidatePoint cand;
          cand.location = p;
          cand.defining = {i, j, -1};
          cand.defining_count = 2;
          return cand;
        }
    }
  return std::nullopt;
}

// Convert the patch kernel to constraints shared by every threshold.
inline std::vector<CircleLineConstraint> kernel_constraints(const Patch<2>& patch) {
  std::vector<CircleLineConstraint> cons;
  cons.reserve(patch.domain.halfspaces.size());
  for (const auto& h : patch.domain.halfspaces) {
    CircleLineConstraint c;
    c.kind = CircleLineConstraint::Kind::halfplane;
    c.plane = h;
    cons.push_back(c);
  }
  return cons;
}

// Inward unit normal of the fixed edge a->b (pointing into the kernel side).
inline Vec2 inward_unit(const Vec2& a, const Vec2& b) { return normalized(perp(b - a)); }

// Max incident angle over all patch elements at position x (pi on degeneracy).
inline double patch_max_angle(const Patch<2>& patch, const Vec2& x) {
  double worst = 0.0;
  for (const auto& st : patch.stencils) {
    if (orient2d(x, st.fixed[0], st.fixed[1]) <= 0.0) return std::numbers::pi;
    const auto m = triangle_measures<2>(x, st.fixed[0], st.fixed[1]);
    worst = std::max(worst, std::max({m.angles[0], m.angles[1], m.angles[2]}));
  }
  return worst;
}

inline double patch_max_circumradius(const Patch<2>& patch, const Vec2& x) {
  double worst = 0.0;
  for (const auto& st : patch.stencils) {
    if (orient2d(x, st.fixed[0], st.fixed[1]) <= 0.0) return kInfinity;
    worst = std::max(worst, triangle_measures<2>(x, st.fixed[0], st.fixed[1]).circumradius);
  }
  return worst;
}

}  // namespace detail

// Constraints for "every incident angle of element (x,a,b) is at most theta":
// one halfplane per fixed vertex and the complement of the inscribed-angle disk
// for the angle at the moving point.
inline void max_angle_constraints(const Vec2& a, const Vec2& b, double theta,
                                  std::vector<CircleLineConstraint>& out) {
  constexpr double pi = std::numbers::pi;
  if (theta >= pi) return;  // every angle is at most pi
  const Vec2 u = detail::inward_unit(a, b);

  // Angle at fixed vertex a between rays a->b and a->x: with x on the kernel
  // side, feasibility means cross(rotate(b-a, +theta), x-a) <= 0.
  {
    CircleLineConstraint c;
    c.kind = CircleLineConstraint::Kind::halfplane;
    const Vec2 n = perp(rotate(b - a, theta));  // cross(u, w) == dot(perp(u), w)
    c.plane = {n, dot(n, a)};
    out.push_back(c);
  }
  // Angle at fixed vertex b, mirrored: cross(rotate(a-b, -theta), x-b) >= 0.
  {
    CircleLineConstraint c;
    c.kind = CircleLineConstraint::Kind::halfplane;
    const Vec2 n = -perp(rotate(a - b, -theta));
    c.plane = {n, dot(n, b)};
    out.push_back(c);
  }
  // Angle at the moving point: forbid the open inscribed-angle disk.
  {
    CircleLineConstraint c;
    c.kind = CircleLineConstraint::Kind::disk_complement;
    c.ball = detail::inscribed_angle_circle(a, b, u, theta);
    out.push_back(c);
  }
}

// Constraints for "circumradius of (x,a,b) is at most rho": the inscribed angle
// at x must lie in [asin(h/rho), pi - asin(h/rho)], a disk and a disk complement.
// Returns false when rho is smaller than half the fixed edge (infeasible).
inline bool circumradius_constraints(const Vec2& a, const Vec2& b, double rho,
                                     std::vector<CircleLineConstraint>& out) {
  const double h = 0.5 * distance(a, b);
  if (rho < h) return false;
  const Vec2 u = detail::inward_unit(a, b);
  const double alpha = std::asin(std::min(1.0, h / rho));
  if (alpha <= 1e-15) return true;  // infinitely large allowance
  {
    CircleLineConstraint c;
    c.kind = CircleLineConstraint::Kind::disk;  // angle at x >= alpha
    c.ball = detail::inscribed_angle_circle(a, b, u, alpha);
    out.push_back(c);
  }
  {
    CircleLineConstraint c;
    c.kind = CircleLineConstraint::Kind::disk_complement;  // angle at x <= pi - alpha
    c.ball = detail::inscribed_angle_circle(a, b, u, std::numbers::pi - alpha);
    out.push_back(c);
  }
  return true;
}

namespace detail {

// Sound lower bound for the minmax angle: at each fixed corner the angle to the
// kernel cannot drop below the smallest angle to any kernel vertex, and no
// triangle has all angles below pi/3.
// Does the ray v + t*dir (t > 0) meet the region?
inline bool ray_hits_region(const ConvexRegion<2>& region, const Vec2& v, const Vec2& dir) {
  double t_lo = 1e-12, t_hi = kInfinity;
  for (const auto& h : region.halfspaces) {
    const double along = dot(h.normal, dir);
    const double slack = h.slack(v);
    if (std::abs(along) <= 1e-14 * std::max(1.0, norm(h.normal))) {
      if (slack < -1e-9 * std::max(1.0, norm(h.normal))) return false;
      continue;
    }
    const double t = slack / along;
    if (along > 0.0)
      t_hi = std::min(t_hi, t);
    else
      t_lo = std::max(t_lo, t);
  }
  return t_lo <= t_hi;
}

inline double minmax_angle_lower_bound(const Patch<2>& patch) {
  double lb = std::numbers::pi / 3.0;
  const auto poly = halfspace_intersection(patch.domain);
  if (poly.vertices.empty()) return lb;
  for (const auto& st : patch.stencils) {
    for (int corner = 0; corner < 2; ++corner) {
      const Vec2& v = st.fixed[static_cast<std::size_t>(corner)];
      const Vec2& other = st.fixed[static_cast<std::size_t>(1 - corner)];
      if (patch.domain.contains(v, 1e-9)) continue;  // angle can shrink to zero
      // The fixed ray may point into the kernel cone, in which case the angle
      // at this corner can vanish.
      if (ray_hits_region(patch.domain, v, other - v)) continue;
      double best = kInfinity;
      for (const auto& k : poly.vertices) {
        if (distance(k, v) <= 1e-12) {
          best = 0.0;
          break;
        }
        best = std::min(best, angle_between(other - v, k - v));
      }
      if (std::isfinite(best)) lb = std::max(lb, best);
    }
  }
  return std::min(lb, std::numbers::pi);
}

}  // namespace detail

// Placement minimizing the maximum incident angle over the kernel, within
// tol_theta of the infimum: binary search on the angle threshold with exact
// candidate-enumeration feasibility at each threshold.
inline PlacementResult minmax_angle_place(const Patch<2>& patch, double tol_theta) {
  if (!(tol_theta > 0.0)) throw std::invalid_argument("minmax_angle_place: tol must be positive");
  auto cc = chebyshev_center(patch.domain);
  if (!cc.feasible) throw std::domain_error("minmax_angle_place: empty kernel");
  for (const auto& st : patch.stencils)
    if (st.kind != ElementKind::triangle)
      throw std::invalid_argument("minmax_angle_place: triangle patches only");

  const auto base = detail::kernel_constraints(patch);
  const std::array<Vec2, 2> seeds = {cc.center, patch.position};
  auto test = [&](double theta) -> std::optional<CandidatePoint> {
    std::vector<CircleLineConstraint> cons = base;
    for (const auto& st : patch.stencils)
      max_angle_constraints(st.fixed[0], st.fixed[1], theta, cons);
    auto validate = [&patch, theta](const Vec2& p) {
      return detail::patch_max_angle(patch, p) <= theta + 1e-9;
    };
    return detail::feasible_point(cons, seeds, validate);
  };

  PlacementResult result;
  double lo = detail::minmax_angle_lower_bound(patch);
  double hi = std::numbers::pi;
  Vec2 witness = cc.center;

  if (auto w = test(lo)) {  // the bound itself may be attained
    witness = w->location;
    hi = lo;
  } else {
    for (int it = 0; it < 60 && hi - lo > tol_theta; ++it) {
      const double mid = 0.5 * (lo + hi);
      ++result.iterations;
      if (auto w = test(mid)) {
        hi = mid;
        witness = w->location;
      } else {
        lo = mid;
      }
    }
    if (hi >= std::numbers::pi) witness = cc.center;  // everything feasible at pi
  }

  result.point = witness;
  result.value = detail::patch_max_angle(patch, witness);
  result.feasible = true;
  return result;
}

// Placement minimizing the maximum circumradius, same engine with radius
// thresholds.
inline PlacementResult minmax_circumradius_place(const Patch<2>& patch, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("minmax_circumradius_place: tol must be positive");
  auto cc = chebyshev_center(patch.domain);
  if (!cc.feasible) throw std::domain_error("minmax_circumradius_place: empty kernel");

  const auto base = detail::kernel_constraints(patch);
  const std::array<Vec2, 2> seeds = {cc.center, patch.position};
  auto test = [&](double rho) -> std::optional<CandidatePoint> {
    std::vector<CircleLineConstraint> cons = base;
    for (const auto& st : patch.stencils)
      if (!circumradius_constraints(st.fixed[0], st.fixed[1], rho, cons)) return std::nullopt;
    auto validate = [&patch, rho](const Vec2& p) {
      return detail::patch_max_circumradius(patch, p) <= rho * (1.0 + 1e-9) + 1e-12;
    };
    return detail::feasible_point(cons, seeds, validate);
  };

  PlacementResult result;
  double lo = 0.0;
  for (const auto& st : patch.stencils) lo = std::max(lo, 0.5 * distance(st.fixed[0], st.fixed[1]));
  // The Chebyshev center witnesses feasibility of its own worst circumradius.
  double hi = detail::patch_max_circumradius(patch, cc.center);
  if (!std::isfinite(hi)) hi = std::max(lo * 4.0, 1.0);
  Vec2 witness = cc.center;

  if (auto w = test(lo)) {
    witness = w->location;
  } else {
    for (int grow = 0; grow < 60 && !test(hi); ++grow) hi *= 2.0;
    for (int it = 0; it < 60 && hi - lo > tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      ++result.iterations;
      if (auto w = test(mid)) {
        hi = mid;
        witness = w->location;
      } else {
        lo = mid;
      }
    }
  }

  result.point = witness;
  result.value = detail::patch_max_circumradius(patch, witness);
  result.feasible = true;
  return result;
}

// Fermat-Weber point of the patch neighbors constrained to the kernel:
// Weiszfeld update followed by Euclidean projection, with the standard
// subgradient escape test at vertex coincidences.
template <int D>
Vec<D> weber_place(const Patch<D>& patch, double tol = 1e-10) {
  if (patch.neighbors.empty()) throw std::invalid_argument("weber_place: no neighbor sites");
  auto cc = chebyshev_center(patch.domain);
  if (!cc.feasible) throw std::domain_error("weber_place: empty kernel");
  const auto& sites = patch.neighbors;

  Vec<D> x = project_to_region(patch.domain, cc.center);
  double scale = 1.0;
  for (const auto& s : sites) scale = std::max(scale, norm(s - x));

  for (int it = 0; it < 1000; ++it) {
    Vec<D> numer{};
    double denom = 0.0;
    int at_site = -1;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const double d = distance(x, sites[i]);
      if (d <= 1e-14 * scale) {
        at_site = static_cast<int>(i);
        continue;
      }
      numer += sites[i] / d;
      denom += 1.0 / d;
    }

    Vec<D> next;
    if (at_site >= 0) {
      // Subgradient escape: move off the site only if the pull of the others
      // exceeds the unit ball of the distance term at the site.
      Vec<D> pull{};
      for (std::size_t i = 0; i < sites.size(); ++i) {
        if (static_cast<int>(i) == at_site) continue;
        pull += (sites[i] - x) / distance(x, sites[i]);
      }
      const double pn = norm(pull);
      if (pn <= 1.0 + 1e-12 || denom == 0.0) return x;  // the site is optimal
      next = x + pull * ((pn - 1.0) / (pn * denom));
    } else {
      next = numer / denom;
    }
    next = project_to_region(patch.domain, next);
    const double step = distance(next, x);
    x = next;
    if (step < tol) break;
  }
  return x;
}

}  // namespace qsmooth
