// Geometric primitives for mesh smoothing: element measures, enclosing balls,
// solid and dihedral angles, halfspace intersections, and star-polygon kernels.
// All operations are pure functions of their inputs.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "qsmooth/linprog.hpp"
#include "qsmooth/vec.hpp"

namespace qsmooth {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Closed halfspace {p : normal.p <= offset}. The normal need not be unit length.
template <int D>
struct Halfspace {
  Vec<D> normal{};
  double offset = 0.0;

  double slack(const Vec<D>& p) const { return offset - dot(normal, p); }
  bool contains(const Vec<D>& p, double eps = 1e-9) const {
    return slack(p) >= -eps * std::max(1.0, norm(normal));
  }
};

template <int D>
struct Ball {
  Vec<D> center{};
  double radius = 0.0;

  bool contains(const Vec<D>& p, double eps = 1e-12) const {
    return distance(p, center) <= radius + eps * std::max(1.0, radius);
  }
};

// Intersection of finitely many halfspaces. Emptiness is a queryable state.
template <int D>
struct ConvexRegion {
  std::vector<Halfspace<D>> halfspaces;

  bool contains(const Vec<D>& p, double eps = 1e-9) const {
    for (const auto& h : halfspaces)
      if (!h.contains(p, eps)) return false;
    return true;
  }
  void add(const Halfspace<D>& h) { halfspaces.push_back(h); }
};

struct TriangleMeasures {
  double signed_area = 0.0;  // unsigned in 3D
  double area = 0.0;
  std::array<double, 3> edge_lengths{};  // edge i is opposite vertex i
  std::array<double, 3> angles{};        // interior angle at vertex i
  std::array<double, 3> altitudes{};     // altitude from vertex i onto edge i
  double perimeter = 0.0;
  double circumradius = 0.0;  // +inf when degenerate
  double inradius = 0.0;
  double diameter = 0.0;
  bool degenerate = false;
};

namespace detail {

template <int D>
inline double angle_between(const Vec<D>& u, const Vec<D>& v) {
  double cr;
  if constexpr (D == 2)
    cr = std::abs(cross(u, v));
  else
    cr = norm(cross(u, v));
  return std::atan2(cr, dot(u, v));
}

}  // namespace detail

template <int D>
TriangleMeasures triangle_measures(const Vec<D>& a, const Vec<D>& b, const Vec<D>& c) {
  TriangleMeasures m;
  if constexpr (D == 2) {
    m.signed_area = 0.5 * orient2d(a, b, c);
    m.area = std::abs(m.signed_area);
  } else {
    m.area = 0.5 * norm(cross(b - a, c - a));
    m.signed_area = m.area;
  }
  m.edge_lengths = {distance(b, c), distance(c, a), distance(a, b)};
  m.perimeter = m.edge_lengths[0] + m.edge_lengths[1] + m.edge_lengths[2];
  m.diameter = std::max({m.edge_lengths[0], m.edge_lengths[1], m.edge_lengths[2]});
  m.angles = {detail::angle_between(b - a, c - a), detail::angle_between(c - b, a - b),
              detail::angle_between(a - c, b - c)};
  m.degenerate = (m.area == 0.0);
  const double semi = 0.5 * m.perimeter;
  m.inradius = (semi > 0.0) ? m.area / semi : 0.0;
  m.circumradius =
      m.degenerate ? kInfinity
                   : m.edge_lengths[0] * m.edge_lengths[1] * m.edge_lengths[2] / (4.0 * m.area);
  for (int i = 0; i < 3; ++i)
    m.altitudes[i] = (m.edge_lengths[i] > 0.0) ? 2.0 * m.area / m.edge_lengths[i] : 0.0;
  return m;
}

namespace detail {

inline bool circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, Ball<2>& out) {
  const double d = 2.0 * orient2d(a, b, c);
  const double scale = std::max({squared_norm(a - b), squared_norm(b - c), squared_norm(c - a)});
  if (std::abs(d) <= 1e-14 * std::max(scale, 1.0)) return false;
  const double asq = squared_norm(a), bsq = squared_norm(b), csq = squared_norm(c);
  out.center = {(asq * (b[1] - c[1]) + bsq * (c[1] - a[1]) + csq * (a[1] - b[1])) / d,
                (asq * (c[0] - b[0]) + bsq * (a[0] - c[0]) + csq * (b[0] - a[0])) / d};
  out.radius = distance(out.center, a);
  return true;
}

// Circumcenter of a triangle embedded in 3-space (center lies in the triangle's plane).
inline bool circumcircle(const Vec3& a, const Vec3& b, const Vec3& c, Ball<3>& out) {
  const Vec3 ab = b - a, ac = c - a;
  const Vec3 n = cross(ab, ac);
  const double nn = squared_norm(n);
  const double scale = std::max({squared_norm(ab), squared_norm(ac), 1.0});
  if (nn <= 1e-28 * scale * scale) return false;
  const Vec3 rel =
      (squared_norm(ac) * cross(n, ab) + squared_norm(ab) * cross(ac, n)) / (2.0 * nn);
  out.center = a + rel;
  out.radius = norm(rel);
  return true;
}

inline bool circumsphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, Ball<3>& out) {
  // Solve for center p with |p-a| = |p-b| = |p-c| = |p-d| via three linear equations.
  const Vec3 r0 = b - a, r1 = c - a, r2 = d - a;
  const double scale = std::max({squared_norm(r0), squared_norm(r1), squared_norm(r2)});
  double rhs[3] = {0.5 * squared_norm(r0), 0.5 * squared_norm(r1), 0.5 * squared_norm(r2)};
  const double det3 = dot(r0, cross(r1, r2));
  if (std::abs(det3) <= 1e-14 * std::max(1.0, scale * std::sqrt(scale))) return false;
  Vec3 rel;
  const Vec3 col0{r0[0], r1[0], r2[0]}, col1{r0[1], r1[1], r2[1]}, col2{r0[2], r1[2], r2[2]};
  const Vec3 rv{rhs[0], rhs[1], rhs[2]};
  rel[0] = dot(rv, cross(col1, col2)) / det3;
  rel[1] = dot(col0, cross(rv, col2)) / det3;
  rel[2] = dot(col0, cross(col1, rv)) / det3;
  out.center = a + rel;
  out.radius = distance(out.center, a);
  return true;
}

}  // namespace detail

// Smallest ball containing up to four points. Handles duplicates.
template <int D>
Ball<D> min_enclosing_ball(std::span<const Vec<D>> points) {
  const int n = static_cast<int>(points.size());
  if (n < 1 || n > 4) throw std::invalid_argument("min_enclosing_ball: 1-4 points required");

  double scale = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) scale = std::max(scale, distance(points[i], points[j]));
  const double eps = 1e-12 * scale;

  auto contains_all = [&](const Ball<D>& ball) {
    for (int i = 0; i < n; ++i)
      if (distance(points[i], ball.center) > ball.radius + eps) return false;
    return true;
  };

  Ball<D> best{points[0], kInfinity};
  auto consider = [&](const Ball<D>& ball) {
    if (ball.radius < best.radius && contains_all(ball)) best = ball;
  };

  for (int i = 0; i < n; ++i) consider({points[i], 0.0});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      consider({0.5 * (points[i] + points[j]), 0.5 * distance(points[i], points[j])});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Ball<D> ball;
        if (detail::circumcircle(points[i], points[j], points[k], ball)) consider(ball);
      }
  if constexpr (D == 3) {
    if (n == 4) {
      Ball<3> ball;
      if (detail::circumsphere(points[0], points[1], points[2], points[3], ball)) consider(ball);
    }
  }
  return best;
}

template <int D>
Ball<D> min_enclosing_ball(std::initializer_list<Vec<D>> points) {
  return min_enclosing_ball(std::span<const Vec<D>>(points.begin(), points.size()));
}

// Solid angle at `origin` subtended by triangle (a,b,c), in steradians.
// tan(E/2) = u.(v x w) / (1 + v.w + w.u + u.v) on unit direction vectors; the
// two-argument arctangent keeps the value correct when the denominator is <= 0.
inline double solid_angle(const Vec3& origin, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ra = a - origin, rb = b - origin, rc = c - origin;
  const double la = norm(ra), lb = norm(rb), lc = norm(rc);
  if (la == 0.0 || lb == 0.0 || lc == 0.0)
    throw std::domain_error("solid_angle: zero direction vector");
  const Vec3 u = ra / la, v = rb / lb, w = rc / lc;
  const double numerator = dot(u, cross(v, w));
  const double denominator = 1.0 + dot(v, w) + dot(w, u) + dot(u, v);
  return std::abs(2.0 * std::atan2(numerator, denominator));
}

// Dihedral angle along axis pq between faces pqr and pqs, in (0, pi).
inline double dihedral_angle(const Vec3& p, const Vec3& q, const Vec3& r, const Vec3& s) {
  const Vec3 axis = q - p;
  const double axis_len2 = squared_norm(axis);
  if (axis_len2 == 0.0) throw std::domain_error("dihedral_angle: degenerate axis");
  auto reject = [&](const Vec3& v) { return v - axis * (dot(v, axis) / axis_len2); };
  const Vec3 wr = reject(r - p), ws = reject(s - p);
  const double scale = std::max(1.0, axis_len2);
  if (squared_norm(wr) <= 1e-28 * scale || squared_norm(ws) <= 1e-28 * scale)
    throw std::domain_error("dihedral_angle: face point on axis");
  return std::atan2(norm(cross(wr, ws)), dot(wr, ws));
}

// Vertex/ray description of a halfspace intersection.
template <int D>
struct PolytopeDescription {
  bool empty = false;
  bool bounded = true;
  std::vector<Vec<D>> vertices;
  std::vector<int> infeasible_subset;  // <= D+1 halfspace indices certifying emptiness
  std::vector<Vec<D>> rays;            // recession directions when unbounded
};

// Deepest point of the region together with its depth. A negative radius means
// the region is empty; radius 0 means nonempty with empty interior.
template <int D>
struct ChebyshevResult {
  Vec<D> center{};
  double radius = -kInfinity;
  bool feasible = false;
};

template <int D>
ChebyshevResult<D> chebyshev_center(const ConvexRegion<D>& region, double bound = 1e7) {
  std::vector<LpConstraint<D + 1>> cons;
  cons.reserve(region.halfspaces.size() + 1);
  for (const auto& h : region.halfspaces) {
    LpConstraint<D + 1> cn;
    for (int j = 0; j < D; ++j) cn.a[j] = h.normal[j];
    cn.a[D] = norm(h.normal);
    cn.b = h.offset;
    cons.push_back(cn);
  }
  std::array<double, D + 1> obj{};
  obj[D] = -1.0;  // maximize depth
  auto r = seidel_lp<D + 1>(obj, cons, bound);
  ChebyshevResult<D> out;
  if (!r.feasible()) return out;
  for (int j = 0; j < D; ++j) out.center[j] = r.x[j];
  out.radius = r.x[D];
  out.feasible = out.radius >= -1e-9;
  return out;
}

namespace detail {

inline bool solve2x2(const Vec2& r0, double b0, const Vec2& r1, double b1, Vec2& out) {
  const double det = cross(r0, r1);
  const double scale = std::max({norm(r0) * norm(r1), 1e-30});
  if (std::abs(det) <= 1e-12 * scale) return false;
  out = {(b0 * r1[1] - b1 * r0[1]) / det, (r0[0] * b1 - r1[0] * b0) / det};
  return true;
}

inline bool solve3x3(const Vec3& r0, double b0, const Vec3& r1, double b1, const Vec3& r2,
                     double b2, Vec3& out) {
  const double det = dot(r0, cross(r1, r2));
  const double scale = std::max(norm(r0) * norm(r1) * norm(r2), 1e-30);
  if (std::abs(det) <= 1e-12 * scale) return false;
  const Vec3 col0{r0[0], r1[0], r2[0]}, col1{r0[1], r1[1], r2[1]}, col2{r0[2], r1[2], r2[2]};
  const Vec3 rhs{b0, b1, b2};
  out[0] = dot(rhs, cross(col1, col2)) / det;
  out[1] = dot(col0, cross(rhs, col2)) / det;
  out[2] = dot(col0, cross(col1, rhs)) / det;
  return true;
}

template <int D>
bool region_feasible(std::span<const Halfspace<D>> hs, double bound = 1e7) {
  ConvexRegion<D> r;
  r.halfspaces.assign(hs.begin(), hs.end());
  return chebyshev_center(r, bound).feasible;
}

// Search for an infeasible subsystem of at most D+1 halfspaces (Helly bound).
template <int D>
std::vector<int> infeasible_certificate(const ConvexRegion<D>& region) {
  const int n = static_cast<int>(region.halfspaces.size());
  std::vector<Halfspace<D>> sub;
  std::vector<int> idx;
  for (int size = 2; size <= D + 1; ++size) {
    idx.assign(static_cast<std::size_t>(size), 0);
    std::iota(idx.begin(), idx.end(), 0);
    if (size > n) break;
    while (true) {
      sub.clear();
      for (int i : idx) sub.push_back(region.halfspaces[static_cast<std::size_t>(i)]);
      if (!region_feasible<D>(sub)) return idx;
      int k = size - 1;
      while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - size + k) --k;
      if (k < 0) break;
      ++idx[static_cast<std::size_t>(k)];
      for (int j = k + 1; j < size; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return {};  // empty region with no small certificate should not occur (Helly)
}

template <int D>
void dedupe_points(std::vector<Vec<D>>& pts, double eps) {
  std::vector<Vec<D>> out;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : out)
      if (distance(p, q) <= eps) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(p);
  }
  pts = std::move(out);
}

}  // namespace detail

// Enumerate the vertices of a halfspace intersection (d in {2,3}). When the
// region is unbounded the description reports representative recession rays;
// callers that need a polytope add a bounding box first.
template <int D>
PolytopeDescription<D> halfspace_intersection(const ConvexRegion<D>& region) {
  PolytopeDescription<D> out;
  const auto& hs = region.halfspaces;
  const int n = static_cast<int>(hs.size());

  double scale = 1.0;
  for (const auto& h : hs) scale = std::max(scale, std::abs(h.offset) / std::max(1.0, norm(h.normal)));
  const double feas_eps = 1e-9 * scale;

  auto satisfies_all = [&](const Vec<D>& p) {
    for (const auto& h : hs)
      if (h.slack(p) < -feas_eps * std::max(1.0, norm(h.normal))) return false;
    return true;
  };

  if constexpr (D == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Vec2 p;
        if (detail::solve2x2(hs[i].normal, hs[i].offset, hs[j].normal, hs[j].offset, p) &&
            satisfies_all(p))
          out.vertices.push_back(p);
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          Vec3 p;
          if (detail::solve3x3(hs[i].normal, hs[i].offset, hs[j].normal, hs[j].offset,
                               hs[k].normal, hs[k].offset, p) &&
              satisfies_all(p))
            out.vertices.push_back(p);
        }
  }
  detail::dedupe_points(out.vertices, 1e-9 * scale);

  const bool feasible = chebyshev_center(region).feasible;
  if (!feasible) {
    out.empty = true;
    out.vertices.clear();
    out.infeasible_subset = detail::infeasible_certificate(region);
    return out;
  }

  // Recession directions: candidate rays that satisfy normal.v <= 0 for all halfspaces.
  std::vector<Vec<D>> candidates;
  if (n == 0) {
    for (int j = 0; j < D; ++j) {
      Vec<D> e{};
      e[j] = 1.0;
      candidates.push_back(e);
      candidates.push_back(-e);
    }
  }
  for (const auto& h : hs)
    if (norm(h.normal) > 0.0) candidates.push_back(-normalized(h.normal));
  if constexpr (D == 2) {
    for (const auto& h : hs) {
      const Vec2 d = perp(h.normal);
      candidates.push_back(d);
      candidates.push_back(-d);
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Vec3 d = cross(hs[i].normal, hs[j].normal);
        if (norm(d) > 1e-12) {
          candidates.push_back(d);
          candidates.push_back(-d);
        }
      }
  }
  {
    Vec<D> sum{};
    for (const auto& h : hs) sum -= h.normal;
    if (norm(sum) > 1e-12) candidates.push_back(sum);
  }
  for (auto dir : candidates) {
    dir = normalized(dir);
    bool recession = true;
    for (const auto& h : hs)
      if (dot(h.normal, dir) > 1e-9 * std::max(1.0, norm(h.normal))) {
        recession = false;
        break;
      }
    if (recession) out.rays.push_back(dir);
  }
  detail::dedupe_points(out.rays, 1e-9);
  out.bounded = out.rays.empty();
  return out;
}

// Kernel of a star-shaped polygon given in counterclockwise order: the
// intersection of the inward halfplanes of all edges. May be empty.
inline ConvexRegion<2> star_kernel(std::span<const Vec2> polygon) {
  ConvexRegion<2> region;
  const int n = static_cast<int>(polygon.size());
  region.halfspaces.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Vec2& a = polygon[static_cast<std::size_t>(i)];
    const Vec2& b = polygon[static_cast<std::size_t>((i + 1) % n)];
    const Vec2 e = b - a;
    // Interior of a ccw polygon lies left of each directed edge.
    region.add({{e[1], -e[0]}, cross(a, b)});
  }
  return region;
}

inline ConvexRegion<2> star_kernel(std::initializer_list<Vec2> polygon) {
  return star_kernel(std::span<const Vec2>(polygon.begin(), polygon.size()));
}

// Inward halfplane of the directed segment a->b (points left of it satisfy it).
inline Halfspace<2> left_halfplane(const Vec2& a, const Vec2& b) {
  const Vec2 e = b - a;
  return {{e[1], -e[0]}, cross(a, b)};
}

// Axis-aligned box as 2*D halfspaces.
template <int D>
void add_bounding_box(ConvexRegion<D>& region, const Vec<D>& center, double half_extent) {
  for (int j = 0; j < D; ++j) {
    Vec<D> e{};
    e[j] = 1.0;
    region.add({e, center[j] + half_extent});
    region.add({-e, -(center[j] - half_extent)});
  }
}

// Euclidean projection of a point onto a nonempty halfspace intersection.
// Exact for polyhedra: tries all active-constraint subsets of size <= D.
template <int D>
Vec<D> project_to_region(const ConvexRegion<D>& region, const Vec<D>& p, double eps = 1e-9) {
  if (region.contains(p, eps)) return p;
  const auto& hs = region.halfspaces;
  const int n = static_cast<int>(hs.size());
  Vec<D> best{};
  double best_d = kInfinity;
  auto consider = [&](const Vec<D>& q) {
    if (!region.contains(q, eps)) return;
    const double d = distance(p, q);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  };

  for (int i = 0; i < n; ++i) {
    const auto& h = hs[static_cast<std::size_t>(i)];
    const double nn = squared_norm(h.normal);
    if (nn <= 0.0) continue;
    consider(p - h.normal * ((dot(h.normal, p) - h.offset) / nn));
  }
  if constexpr (D == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Vec2 q;
        if (detail::solve2x2(hs[i].normal, hs[i].offset, hs[j].normal, hs[j].offset, q))
          consider(q);
      }
  } else {
    // Projection onto the line where two planes meet.
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Vec3 dirv = cross(hs[i].normal, hs[j].normal);
        if (norm(dirv) <= 1e-12) continue;
        Vec3 q0;
        // A point on the line: solve the two plane equations plus dir.x = dir.p.
        if (!detail::solve3x3(hs[i].normal, hs[i].offset, hs[j].normal, hs[j].offset, dirv,
                              dot(dirv, p), q0))
          continue;
        consider(q0);
      }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          Vec3 q;
          if (detail::solve3x3(hs[i].normal, hs[i].offset, hs[j].normal, hs[j].offset,
                               hs[k].normal, hs[k].offset, q))
            consider(q);
        }
  }
  if (best_d == kInfinity) {
    // Fall back to the deepest point; the region may have empty interior.
    auto cc = chebyshev_center(region);
    if (cc.feasible) return cc.center;
    throw std::domain_error("project_to_region: region is empty");
  }
  return best;
}

}  // namespace qsmooth
