// Shared fixtures for the test suites: seeded random element stencils, star
// patches in 2D and 3D, and small independent oracles.
#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qsmooth/mesh.hpp"
#include "qsmooth/patch.hpp"

namespace testkit {

using namespace qsmooth;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Counterclockwise star-shaped polygon around the origin: sorted angles with a
// minimum gap, radii in [0.5, 1.5]. The origin always lies in the kernel. The
// gap floor keeps adjacent boundary vertices from being nearly collinear with
// the kernel, which would force sliver elements on every placement.
inline std::vector<Vec2> random_star_polygon(Rng& rng, int min_vertices = 5, int max_vertices = 12) {
  const int n = std::uniform_int_distribution<int>(min_vertices, max_vertices)(rng);
  std::vector<double> angles(static_cast<std::size_t>(n));
  for (auto& a : angles) a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  std::sort(angles.begin(), angles.end());
  for (int i = 1; i < n; ++i)
    if (angles[static_cast<std::size_t>(i)] - angles[static_cast<std::size_t>(i - 1)] < 0.2)
      angles[static_cast<std::size_t>(i)] = angles[static_cast<std::size_t>(i - 1)] + 0.2;
  std::vector<Vec2> poly;
  poly.reserve(static_cast<std::size_t>(n));
  for (double a : angles) {
    const double r = uniform(rng, 0.5, 1.5);
    poly.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return poly;
}

inline Patch<2> random_star_patch(Rng& rng, int min_vertices = 5, int max_vertices = 12) {
  for (;;) {
    auto poly = random_star_polygon(rng, min_vertices, max_vertices);
    auto patch = make_star_patch(poly, {0.0, 0.0});
    auto cc = chebyshev_center(patch.domain);
    if (cc.feasible && cc.radius > 0.02) {
      patch.position = cc.center;
      return patch;
    }
  }
}

// Four quads around a center vertex: ring of edge-neighbors and corners with
// bounded jitter, retried until the patch admits a strictly valid placement.
inline Patch<2> random_quad_patch(Rng& rng, double jitter = 0.15) {
  for (;;) {
    std::array<Vec2, 4> mid;   // E N W S
    std::array<Vec2, 4> corner;  // NE NW SW SE
    for (int i = 0; i < 4; ++i) {
      const double a = i * std::numbers::pi / 2.0;
      mid[static_cast<std::size_t>(i)] = {std::cos(a) + uniform(rng, -jitter, jitter),
                                          std::sin(a) + uniform(rng, -jitter, jitter)};
      const double b = a + std::numbers::pi / 4.0;
      const double r = std::numbers::sqrt2;
      corner[static_cast<std::size_t>(i)] = {r * std::cos(b) + uniform(rng, -jitter, jitter),
                                             r * std::sin(b) + uniform(rng, -jitter, jitter)};
    }
    std::vector<ElementStencil<2>> stencils;
    for (int i = 0; i < 4; ++i) {
      ElementStencil<2> st;
      st.kind = ElementKind::quad;
      st.fixed[0] = mid[static_cast<std::size_t>(i)];
      st.fixed[1] = corner[static_cast<std::size_t>(i)];
      st.fixed[2] = mid[static_cast<std::size_t>((i + 1) % 4)];
      stencils.push_back(st);
    }
    try {
      auto patch = make_patch<2>(std::move(stencils), {0.0, 0.0});
      auto cc = chebyshev_center(patch.domain);
      if (!cc.feasible || cc.radius < 0.05) continue;
      patch.position = cc.center;
      bool valid = true;
      for (const auto& st : patch.stencils)
        if (element_cost<2>({make_criterion(CriterionKind::area_min), st}, patch.position) ==
            kInfinity)
          valid = false;
      if (valid) return patch;
    } catch (const std::domain_error&) {
      continue;  // degenerate fixed corner; re-roll
    }
  }
}

// Closed tetrahedral star: an equatorial ring plus a top and bottom apex, all
// jittered; the fan of 2*ring tets surrounds the center vertex.
inline Patch<3> random_tet_patch(Rng& rng, int min_ring = 3, int max_ring = 5) {
  for (;;) {
    const int ring = std::uniform_int_distribution<int>(min_ring, max_ring)(rng);
    std::vector<Vec3> eq;
    for (int i = 0; i < ring; ++i) {
      const double a = 2.0 * std::numbers::pi * i / ring + uniform(rng, -0.2, 0.2);
      const double r = uniform(rng, 0.8, 1.3);
      eq.push_back({r * std::cos(a), r * std::sin(a), uniform(rng, -0.15, 0.15)});
    }
    const Vec3 top{uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2), uniform(rng, 0.8, 1.3)};
    const Vec3 bottom{uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2), uniform(rng, -1.3, -0.8)};

    std::vector<ElementStencil<3>> stencils;
    auto add = [&](const Vec3& a, const Vec3& b, const Vec3& c) {
      ElementStencil<3> st;
      st.kind = ElementKind::tetrahedron;
      st.fixed = {a, b, c};
      stencils.push_back(st);
    };
    for (int i = 0; i < ring; ++i) {
      const Vec3& a = eq[static_cast<std::size_t>(i)];
      const Vec3& b = eq[static_cast<std::size_t>((i + 1) % ring)];
      add(a, b, top);
      add(b, a, bottom);
    }

    auto patch = make_patch<3>(std::move(stencils), {0.0, 0.0, 0.0});
    auto cc = chebyshev_center(patch.domain);
    if (!cc.feasible || cc.radius < 0.05) continue;
    patch.position = cc.center;
    bool oriented = true;
    for (const auto& st : patch.stencils)
      if (orient3d(patch.position, st.fixed[0], st.fixed[1], st.fixed[2]) <= 0.0) oriented = false;
    if (oriented) return patch;
  }
}

// Positively oriented random triangle stencil with its natural domain.
inline ElementStencil<2> random_triangle_stencil(Rng& rng) {
  for (;;) {
    ElementStencil<2> st;
    st.kind = ElementKind::triangle;
    st.fixed[0] = {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
    st.fixed[1] = {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
    if (distance(st.fixed[0], st.fixed[1]) > 0.2) return st;
  }
}

inline ElementStencil<3> random_tet_stencil(Rng& rng) {
  for (;;) {
    ElementStencil<3> st;
    st.kind = ElementKind::tetrahedron;
    for (auto& f : st.fixed)
      f = {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
    const double area = norm(cross(st.fixed[1] - st.fixed[0], st.fixed[2] - st.fixed[0]));
    if (area > 0.1) return st;
  }
}

inline ElementStencil<2> random_quad_stencil(Rng& rng) {
  for (;;) {
    // Fixed path v1 -> v2 -> v3 turning left, so a convex completion exists.
    ElementStencil<2> st;
    st.kind = ElementKind::quad;
    st.fixed[0] = {uniform(rng, 0.3, 1.2), uniform(rng, -0.6, 0.6)};
    st.fixed[1] = {uniform(rng, -0.4, 0.4), uniform(rng, 0.6, 1.4)};
    st.fixed[2] = {uniform(rng, -1.2, -0.3), uniform(rng, -0.6, 0.6)};
    if (cross(st.fixed[1] - st.fixed[0], st.fixed[2] - st.fixed[1]) > 0.1) return st;
  }
}

// Domain in which a single stencil's element stays valid, boxed.
template <int D>
inline ConvexRegion<D> stencil_domain(const ElementStencil<D>& st) {
  std::vector<ElementStencil<D>> one = {st};
  return patch_domain<D>(std::span<const ElementStencil<D>>(one));
}

// Uniform sample from a region via rejection from its bounding box.
template <int D>
inline Vec<D> sample_region(Rng& rng, const ConvexRegion<D>& region, const Vec<D>& lo,
                            const Vec<D>& hi, double shrink_eps = 1e-7) {
  for (int tries = 0; tries < 20000; ++tries) {
    Vec<D> p;
    for (int j = 0; j < D; ++j) p[j] = uniform(rng, lo[j], hi[j]);
    if (region.contains(p, -shrink_eps)) return p;  // negative slack: strict interior
  }
  throw std::runtime_error("sample_region: rejection sampling failed");
}

template <int D>
inline void region_box(const ConvexRegion<D>& region, Vec<D>& lo, Vec<D>& hi) {
  auto poly = halfspace_intersection(region);
  if (poly.vertices.empty()) throw std::runtime_error("region_box: empty region");
  lo = hi = poly.vertices.front();
  for (const auto& v : poly.vertices)
    for (int j = 0; j < D; ++j) {
      lo[j] = std::min(lo[j], v[j]);
      hi[j] = std::max(hi[j], v[j]);
    }
}

// Segment-vs-segment proper intersection test for visibility checks.
inline bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = orient2d(c, d, a);
  const double d2 = orient2d(c, d, b);
  const double d3 = orient2d(a, b, c);
  const double d4 = orient2d(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

// Every polygon vertex is visible from p (no boundary edge blocks the segment).
inline bool sees_all_vertices(std::span<const Vec2> poly, const Vec2& p) {
  const int n = static_cast<int>(poly.size());
  for (int v = 0; v < n; ++v) {
    for (int e = 0; e < n; ++e) {
      if (e == v || (e + 1) % n == v) continue;
      if (segments_cross(p, poly[static_cast<std::size_t>(v)], poly[static_cast<std::size_t>(e)],
                         poly[static_cast<std::size_t>((e + 1) % n)]))
        return false;
    }
  }
  return true;
}

}  // namespace testkit
