// A patch is one movable vertex plus the fixed vertices of its incident
// elements: the unit every placement solver operates on. Its domain is the
// kernel of the star-shaped region (plus quad diagonal constraints), clipped
// by a bounding box at ten times the patch extent.
#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "qsmooth/criteria.hpp"
#include "qsmooth/geometry.hpp"

namespace qsmooth {

template <int D>
struct Patch {
  int center_vertex = -1;  // mesh vertex index; -1 for free-standing fixtures
  Vec<D> position{};       // current moving-point location
  std::vector<ElementStencil<D>> stencils;
  ConvexRegion<D> domain;
  std::vector<Vec<D>> neighbors;  // distinct fixed vertices (Weber sites)
};

namespace detail {

// Inward halfspace of the stencil's fixed boundary: points p for which the
// element (p, fixed...) has positive orientation.
template <int D>
void append_stencil_halfspaces(const ElementStencil<D>& st, ConvexRegion<D>& region) {
  if constexpr (D == 2) {
    if (st.kind == ElementKind::triangle) {
      region.add(left_halfplane(st.fixed[0], st.fixed[1]));
    } else {
      // The corner constraints at v1 and v3 double as the star-polygon kernel
      // halfplanes of the edges (v1,v2) and (v2,v3); the diagonal adds the rest.
      for (const auto& h : quad_domain_constraints(st)) region.add(h);
    }
  } else {
    // Plane of the fixed face (a,b,c); (x,a,b,c) positive means
    // dot(cross(b-a,c-a), x-a) < 0, since orient3d(x,a,b,c) = -orient3d(a,b,c,x).
    const Vec3 n = cross(st.fixed[1] - st.fixed[0], st.fixed[2] - st.fixed[0]);
    region.add({n, dot(n, st.fixed[0])});
  }
}

}  // namespace detail

template <int D>
ConvexRegion<D> patch_domain(std::span<const ElementStencil<D>> stencils, double box_factor = 10.0) {
  ConvexRegion<D> region;
  Vec<D> lo{}, hi{};
  bool first = true;
  for (const auto& st : stencils) {
    detail::append_stencil_halfspaces(st, region);
    for (int k = 0; k < st.fixed_count(); ++k) {
      const Vec<D>& p = st.fixed[static_cast<std::size_t>(k)];
      for (int j = 0; j < D; ++j) {
        lo[j] = first ? p[j] : std::min(lo[j], p[j]);
        hi[j] = first ? p[j] : std::max(hi[j], p[j]);
      }
      first = false;
    }
  }
  if (first) throw std::invalid_argument("patch_domain: no stencils");
  double half_extent = 0.0;
  for (int j = 0; j < D; ++j) half_extent = std::max(half_extent, 0.5 * (hi[j] - lo[j]));
  add_bounding_box(region, 0.5 * (lo + hi), std::max(half_extent, 1e-9) * box_factor);
  return region;
}

template <int D>
void collect_neighbors(Patch<D>& patch) {
  patch.neighbors.clear();
  for (const auto& st : patch.stencils)
    for (int k = 0; k < st.fixed_count(); ++k) {
      const Vec<D>& p = st.fixed[static_cast<std::size_t>(k)];
      bool seen = false;
      for (const auto& q : patch.neighbors)
        if (distance(p, q) <= 1e-14) {
          seen = true;
          break;
        }
      if (!seen) patch.neighbors.push_back(p);
    }
}

// Triangle-star patch from a counterclockwise boundary polygon: one stencil per
// edge, domain = star kernel + bounding box.
inline Patch<2> make_star_patch(std::span<const Vec2> polygon, const Vec2& position) {
  Patch<2> patch;
  patch.position = position;
  const int n = static_cast<int>(polygon.size());
  if (n < 3) throw std::invalid_argument("make_star_patch: need at least 3 boundary vertices");
  for (int i = 0; i < n; ++i) {
    ElementStencil<2> st;
    st.kind = ElementKind::triangle;
    st.fixed[0] = polygon[static_cast<std::size_t>(i)];
    st.fixed[1] = polygon[static_cast<std::size_t>((i + 1) % n)];
    patch.stencils.push_back(st);
  }
  patch.domain = patch_domain<2>(patch.stencils);
  collect_neighbors(patch);
  return patch;
}

inline Patch<2> make_star_patch(std::initializer_list<Vec2> polygon, const Vec2& position) {
  return make_star_patch(std::span<const Vec2>(polygon.begin(), polygon.size()), position);
}

template <int D>
Patch<D> make_patch(std::vector<ElementStencil<D>> stencils, const Vec<D>& position) {
  Patch<D> patch;
  patch.position = position;
  patch.stencils = std::move(stencils);
  patch.domain = patch_domain<D>(patch.stencils);
  collect_neighbors(patch);
  return patch;
}

// Cost terms pairing every stencil of the patch with each applicable criterion.
template <int D>
std::vector<CostTerm<D>> make_terms(const Patch<D>& patch, std::span<const Criterion> criteria) {
  std::vector<CostTerm<D>> terms;
  for (const auto& cr : criteria)
    for (const auto& st : patch.stencils) {
      if (!cr.applies_to(st.kind))
        throw std::invalid_argument("criterion does not apply to a patch element");
      terms.push_back({cr, st});
    }
  return terms;
}

}  // namespace qsmooth
