// Quality criteria as canonical per-element cost functions with metadata.
// Canonical sense is minimization: maximize-min criteria negate their quality,
// so the placement problem is always "minimize the pointwise maximum".
// Degenerate or inverted elements cost +infinity.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qsmooth/geometry.hpp"

namespace qsmooth {

enum class ElementKind : std::uint8_t { triangle, quad, tetrahedron };

enum class Sense : std::uint8_t { minimize_max, maximize_min };

enum class Quasiconvexity : std::uint8_t { yes, no, conjectured };

enum class CriterionKind : std::uint8_t {
  min_angle,         // maximize the minimum interior angle
  max_angle_ext,     // minimize the maximum angle at fixed vertices
  max_angle,         // minimize the maximum angle (non-quasiconvex, special solver)
  area_min,          // minimize the maximum area
  area_max,          // maximize the minimum area
  ext_altitude_min,  // minimize the maximum external altitude
  ext_altitude_max,  // maximize the minimum external altitude
  int_altitude_min,  // maximize the minimum internal altitude
  edge_length,       // minimize the maximum internal edge length
  diameter,          // minimize the maximum element diameter
  aspect_ratio,      // minimize the maximum aspect ratio
  perimeter,         // minimize the maximum perimeter
  perimeter_max_min, // maximize the minimum perimeter (non-quasiconvex)
  containing_circle, // minimize the maximum containing-circle radius
  inradius,          // maximize the minimum inradius
  bank_smith,        // maximize the minimum area / sum-of-squared-edges quality
  circumradius,      // minimize the maximum circumradius (non-quasiconvex, special solver)
  quad_width,            // maximize the minimum quadrilateral width
  quad_containing_circle,// minimize the maximum quad containing circle
  quad_diameter,         // minimize the maximum quad edge/diagonal
  quad_inradius,         // maximize the minimum inscribed-circle radius (conjectured)
  volume_min,        // minimize the maximum tetrahedron volume
  volume_max,        // maximize the minimum tetrahedron volume
  altitude,          // maximize the minimum altitude at the moving point
  face_area,         // minimize the maximum face area
  total_surface,     // minimize the maximum total surface area
  total_edge_length, // minimize the maximum total edge length
  containing_sphere, // minimize the maximum containing-sphere radius
  dihedral_fixed_axis,  // minimize the maximum dihedral along fixed axes
  solid_angle_interior, // maximize the minimum solid angle at the moving point
  solid_angle_exterior, // maximize the minimum solid angle at fixed vertices
};

struct CriterionInfo {
  CriterionKind kind;
  std::string_view name;  // stable CLI string
  Sense sense;
  Quasiconvexity quasiconvex;
  std::uint8_t element_mask;  // bit per ElementKind
  int dimension;              // 2 or 3
};

namespace detail {

constexpr std::uint8_t mask(ElementKind k) { return static_cast<std::uint8_t>(1u << static_cast<int>(k)); }
constexpr std::uint8_t kTri = mask(ElementKind::triangle);
constexpr std::uint8_t kQuad = mask(ElementKind::quad);
constexpr std::uint8_t kTet = mask(ElementKind::tetrahedron);

inline constexpr CriterionInfo kCriterionTable[] = {
    {CriterionKind::min_angle, "min-angle", Sense::maximize_min, Quasiconvexity::yes, kTri | kQuad, 2},
    {CriterionKind::max_angle_ext, "max-angle-ext", Sense::minimize_max, Quasiconvexity::yes, kTri | kQuad, 2},
    {CriterionKind::max_angle, "max-angle", Sense::minimize_max, Quasiconvexity::no, kTri, 2},
    {CriterionKind::area_min, "area-min", Sense::minimize_max, Quasiconvexity::yes, kTri | kQuad, 2},
    {CriterionKind::area_max, "area-max", Sense::maximize_min, Quasiconvexity::yes, kTri | kQuad, 2},
    {CriterionKind::ext_altitude_min, "ext-altitude-min", Sense::minimize_max, Quasiconvexity::yes, kTri, 2},
    {CriterionKind::ext_altitude_max, "ext-altitude-max", Sense::maximize_min, Quasiconvexity::yes, kTri, 2},
    {CriterionKind::int_altitude_min, "int-altitude-min", Sense::maximize_min, Quasiconvexity::yes, kTri, 2},
    {CriterionKind::edge_length, "edge-length", Sense::minimize_max, Quasiconvexity::yes, kTri | kQuad | kTet, 2},
    {CriterionKind::diameter, "diameter", Sense::minimize_max, Quasiconvexity::yes, kTri, 2},
    {CriterionKind::aspect_ratio, "aspect-ratio", Sense::minimize_max, Quasiconvexity::yes, kTri, 2},
    {CriterionKind::perimeter, "perimeter", Sense::minimize_max, Quasiconvexity::yes, kTri | kQuad, 2},
    {CriterionKind::perimeter_max_min, "perimeter-max-min", Sense::maximize_min, Quasiconvexity::no, kTri, 2},
    {CriterionKind::containing_circle, "containing-circle", Sense::minimize_max, Quasiconvexity::yes, kTri, 2},
    {CriterionKind::inradius, "inradius", Sense::maximize_min, Quasiconvexity::yes, kTri, 2},
    {CriterionKind::bank_smith, "bank-smith", Sense::maximize_min, Quasiconvexity::yes, kTri, 2},
    {CriterionKind::circumradius, "circumradius", Sense::minimize_max, Quasiconvexity::no, kTri, 2},
    {CriterionKind::quad_width, "quad-width", Sense::maximize_min, Quasiconvexity::yes, kQuad, 2},
    {CriterionKind::quad_containing_circle, "quad-containing-circle", Sense::minimize_max, Quasiconvexity::yes, kQuad, 2},
    {CriterionKind::quad_diameter, "quad-diameter", Sense::minimize_max, Quasiconvexity::yes, kQuad, 2},
    {CriterionKind::quad_inradius, "quad-inradius", Sense::maximize_min, Quasiconvexity::conjectured, kQuad, 2},
    {CriterionKind::volume_min, "volume-min", Sense::minimize_max, Quasiconvexity::yes, kTet, 3},
    {CriterionKind::volume_max, "volume-max", Sense::maximize_min, Quasiconvexity::yes, kTet, 3},
    {CriterionKind::altitude, "altitude", Sense::maximize_min, Quasiconvexity::yes, kTet, 3},
    {CriterionKind::face_area, "face-area", Sense::minimize_max, Quasiconvexity::yes, kTet, 3},
    {CriterionKind::total_surface, "total-surface", Sense::minimize_max, Quasiconvexity::yes, kTet, 3},
    {CriterionKind::total_edge_length, "total-edge-length", Sense::minimize_max, Quasiconvexity::yes, kTet, 3},
    {CriterionKind::containing_sphere, "containing-sphere", Sense::minimize_max, Quasiconvexity::yes, kTet, 3},
    {CriterionKind::dihedral_fixed_axis, "dihedral-fixed-axis", Sense::minimize_max, Quasiconvexity::yes, kTet, 3},
    {CriterionKind::solid_angle_interior, "solid-angle-interior", Sense::maximize_min, Quasiconvexity::yes, kTet, 3},
    {CriterionKind::solid_angle_exterior, "solid-angle-exterior", Sense::maximize_min, Quasiconvexity::yes, kTet, 3},
};

}  // namespace detail

inline const CriterionInfo& criterion_info(CriterionKind kind) {
  for (const auto& row : detail::kCriterionTable)
    if (row.kind == kind) return row;
  throw std::invalid_argument("unknown criterion kind");
}

inline const CriterionInfo* find_criterion(std::string_view name) {
  for (const auto& row : detail::kCriterionTable)
    if (row.name == name) return &row;
  return nullptr;
}

inline std::span<const CriterionInfo> all_criteria() { return detail::kCriterionTable; }

// A quality measure descriptor: what to measure, which way to optimize it, and
// how much it weighs in a mixture.
struct Criterion {
  CriterionKind kind = CriterionKind::min_angle;
  Sense sense = Sense::maximize_min;
  double weight = 1.0;
  Quasiconvexity quasiconvex = Quasiconvexity::yes;
  std::uint8_t element_mask = 0;
  int dimension = 2;

  bool applies_to(ElementKind k) const { return element_mask & detail::mask(k); }
};

inline Criterion make_criterion(CriterionKind kind, double weight = 1.0) {
  if (!(weight > 0.0)) throw std::invalid_argument("criterion weight must be positive");
  const CriterionInfo& info = criterion_info(kind);
  return {info.kind, info.sense, weight, info.quasiconvex, info.element_mask, info.dimension};
}

// Fixed vertices of one element incident to the moving point, oriented so the
// assembled element (x, fixed...) is positively oriented. Quads store their
// three fixed vertices consecutively along the element boundary.
template <int D>
struct ElementStencil {
  ElementKind kind = ElementKind::triangle;
  std::array<Vec<D>, 3> fixed{};

  int fixed_count() const { return kind == ElementKind::triangle ? 2 : 3; }
};

template <int D>
struct CostTerm {
  Criterion criterion;
  ElementStencil<D> stencil;
};

// Normalized so the equilateral triangle scores exactly 1: 4*sqrt(3) * area
// divided by the sum of squared edge lengths. Zero for degenerate triangles.
inline double bank_smith_quality(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double area = 0.5 * std::abs(orient2d(a, b, c));
  const double sum_sq = squared_norm(a - b) + squared_norm(b - c) + squared_norm(c - a);
  if (sum_sq <= 0.0) return 0.0;
  return 4.0 * std::numbers::sqrt3 * area / sum_sq;
}

namespace detail {

// Interior angle of polygon (prev -> at -> next) at `at`.
inline double corner_angle(const Vec2& prev, const Vec2& at, const Vec2& next) {
  return angle_between(prev - at, next - at);
}

inline double quad_signed_area(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3) {
  return 0.5 * (cross(p0, p1) + cross(p1, p2) + cross(p2, p3) + cross(p3, p0));
}

// Strict convexity of the counterclockwise quad (p0..p3): every corner turns left.
inline bool quad_valid(const std::array<Vec2, 4>& q) {
  for (int i = 0; i < 4; ++i) {
    const Vec2& prev = q[static_cast<std::size_t>((i + 3) % 4)];
    const Vec2& at = q[static_cast<std::size_t>(i)];
    const Vec2& next = q[static_cast<std::size_t>((i + 1) % 4)];
    if (cross(at - prev, next - at) <= 0.0) return false;
  }
  return true;
}

inline double point_segment_line_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double len = distance(a, b);
  if (len == 0.0) return distance(p, a);
  return std::abs(cross(b - a, p - a)) / len;
}

// Minimum vertex-to-opposite-edge distance over all vertex/edge pairs of the quad.
inline double quad_width(const std::array<Vec2, 4>& q) {
  double w = kInfinity;
  for (int v = 0; v < 4; ++v)
    for (int e = 0; e < 4; ++e) {
      if (e == v || (e + 1) % 4 == v) continue;  // skip incident edges
      w = std::min(w, point_segment_line_distance(q[static_cast<std::size_t>(v)],
                                                  q[static_cast<std::size_t>(e)],
                                                  q[static_cast<std::size_t>((e + 1) % 4)]));
    }
  return w;
}

// Deepest-circle radius against three of the quad's edge halfplanes. When the
// three inward normals positively span the plane, the optimum is the circle at
// equal depth to all three lines. When they fit inside an open halfplane the
// triple imposes no bound at all; an antiparallel pair pins the radius to half
// the strip gap.
inline double quad_triple_radius(const std::array<Vec2, 4>& q, int skip) {
  Vec2 n[3];
  double b[3];
  int k = 0;
  for (int i = 0; i < 4; ++i) {
    if (i == skip) continue;
    const Vec2 a = q[static_cast<std::size_t>(i)];
    const Vec2 e = q[static_cast<std::size_t>((i + 1) % 4)] - a;
    const Vec2 inward = normalized(perp(e));
    n[k] = inward;
    b[k] = dot(inward, a);  // inside points satisfy inward.p >= b, depth = inward.p - b
    ++k;
  }

  // Positive-span test via the largest angular gap between the normals.
  double ang[3];
  for (int i = 0; i < 3; ++i) ang[i] = std::atan2(n[i][1], n[i][0]);
  std::sort(ang, ang + 3);
  const double gap = std::max({ang[1] - ang[0], ang[2] - ang[1],
                               2.0 * std::numbers::pi - (ang[2] - ang[0])});
  if (gap > std::numbers::pi + 1e-9) return kInfinity;  // unbounded triple
  if (gap > std::numbers::pi - 1e-9) {
    // An antiparallel pair: radius is half the strip gap.
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (dot(n[i], n[j]) < -1.0 + 1e-8) return -0.5 * (b[i] + b[j]);
  }

  // Cramer on the 3x3 equal-depth system n_i.c - r = b_i.
  const double det = n[0][0] * (n[1][1] - n[2][1]) - n[0][1] * (n[1][0] - n[2][0]) +
                     (n[1][0] * n[2][1] - n[1][1] * n[2][0]);
  if (std::abs(det) <= 1e-12) return kInfinity;
  const double d0 = b[0] * (n[1][1] - n[2][1]) - n[0][1] * (b[1] - b[2]) +
                    (b[1] * n[2][1] - n[1][1] * b[2]);
  const double d1 = n[0][0] * (b[1] - b[2]) - b[0] * (n[1][0] - n[2][0]) +
                    (n[1][0] * b[2] - b[1] * n[2][0]);
  const Vec2 center{d0 / det, d1 / det};
  return dot(n[0], center) - b[0];
}

// Radius of the largest circle inscribed in a convex ccw quad: the smallest of
// the four tangent-circle radii over edge triples (the binding Chebyshev basis
// of the four edge halfplanes).
inline double quad_inradius(const std::array<Vec2, 4>& q) {
  double r = kInfinity;
  for (int skip = 0; skip < 4; ++skip) r = std::min(r, quad_triple_radius(q, skip));
  return std::max(r, 0.0);
}

inline double tet_volume(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c) {
  return orient3d(x, a, b, c) / 6.0;
}

inline double tri_area3(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

template <int D>
std::array<Vec<D>, 4> assemble(const ElementStencil<D>& st, const Vec<D>& x) {
  return {x, st.fixed[0], st.fixed[1], st.fixed[2]};
}

inline double tri_cost(const Criterion& cr, const ElementStencil<2>& st, const Vec2& x) {
  const Vec2& a = st.fixed[0];
  const Vec2& b = st.fixed[1];
  const double two_area = orient2d(x, a, b);
  if (two_area <= 0.0) return kInfinity;  // degenerate or inverted

  switch (cr.kind) {
    case CriterionKind::min_angle: {
      const auto m = triangle_measures<2>(x, a, b);
      return -std::min({m.angles[0], m.angles[1], m.angles[2]});
    }
    case CriterionKind::max_angle_ext: {
      const auto m = triangle_measures<2>(x, a, b);
      return std::max(m.angles[1], m.angles[2]);
    }
    case CriterionKind::max_angle: {
      const auto m = triangle_measures<2>(x, a, b);
      return std::max({m.angles[0], m.angles[1], m.angles[2]});
    }
    case CriterionKind::area_min:
      return 0.5 * two_area;
    case CriterionKind::area_max:
      return -0.5 * two_area;
    case CriterionKind::ext_altitude_min:
      return two_area / distance(a, b);
    case CriterionKind::ext_altitude_max:
      return -two_area / distance(a, b);
    case CriterionKind::int_altitude_min: {
      // Altitudes whose bases are the internal sides (x,a) and (x,b).
      const double ha = point_segment_line_distance(b, x, a);
      const double hb = point_segment_line_distance(a, x, b);
      return -std::min(ha, hb);
    }
    case CriterionKind::edge_length:
      return std::max(distance(x, a), distance(x, b));
    case CriterionKind::diameter:
      return std::max({distance(x, a), distance(x, b), distance(a, b)});
    case CriterionKind::aspect_ratio: {
      const auto m = triangle_measures<2>(x, a, b);
      return m.diameter * m.diameter / two_area;
    }
    case CriterionKind::perimeter:
      return distance(x, a) + distance(x, b) + distance(a, b);
    case CriterionKind::perimeter_max_min:
      return -(distance(x, a) + distance(x, b) + distance(a, b));
    case CriterionKind::containing_circle:
      return min_enclosing_ball<2>({x, a, b}).radius;
    case CriterionKind::inradius: {
      const auto m = triangle_measures<2>(x, a, b);
      return -m.inradius;
    }
    case CriterionKind::bank_smith:
      return -bank_smith_quality(x, a, b);
    case CriterionKind::circumradius:
      return triangle_measures<2>(x, a, b).circumradius;
    default:
      throw std::invalid_argument("criterion does not apply to triangle elements");
  }
}

inline double quad_cost(const Criterion& cr, const ElementStencil<2>& st, const Vec2& x) {
  const std::array<Vec2, 4> q = {x, st.fixed[0], st.fixed[1], st.fixed[2]};
  if (!quad_valid(q)) return kInfinity;

  switch (cr.kind) {
    case CriterionKind::min_angle: {
      double worst = kInfinity;
      for (int i = 0; i < 4; ++i)
        worst = std::min(worst, corner_angle(q[static_cast<std::size_t>((i + 3) % 4)],
                                             q[static_cast<std::size_t>(i)],
                                             q[static_cast<std::size_t>((i + 1) % 4)]));
      return -worst;
    }
    case CriterionKind::max_angle_ext: {
      double worst = 0.0;
      for (int i = 1; i < 4; ++i)
        worst = std::max(worst, corner_angle(q[static_cast<std::size_t>((i + 3) % 4)],
                                             q[static_cast<std::size_t>(i)],
                                             q[static_cast<std::size_t>((i + 1) % 4)]));
      return worst;
    }
    case CriterionKind::area_min:
      return quad_signed_area(q[0], q[1], q[2], q[3]);
    case CriterionKind::area_max:
      return -quad_signed_area(q[0], q[1], q[2], q[3]);
    case CriterionKind::edge_length:
      return std::max(distance(x, st.fixed[0]), distance(x, st.fixed[2]));
    case CriterionKind::perimeter: {
      double p = 0.0;
      for (int i = 0; i < 4; ++i)
        p += distance(q[static_cast<std::size_t>(i)], q[static_cast<std::size_t>((i + 1) % 4)]);
      return p;
    }
    case CriterionKind::quad_width:
      return -quad_width(q);
    case CriterionKind::quad_containing_circle:
      return min_enclosing_ball<2>({q[0], q[1], q[2], q[3]}).radius;
    case CriterionKind::quad_diameter: {
      double d = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          d = std::max(d, distance(q[static_cast<std::size_t>(i)], q[static_cast<std::size_t>(j)]));
      return d;
    }
    case CriterionKind::quad_inradius:
      return -quad_inradius(q);
    default:
      throw std::invalid_argument("criterion does not apply to quadrilateral elements");
  }
}

inline double tet_cost(const Criterion& cr, const ElementStencil<3>& st, const Vec3& x) {
  const Vec3& a = st.fixed[0];
  const Vec3& b = st.fixed[1];
  const Vec3& c = st.fixed[2];
  const double vol = tet_volume(x, a, b, c);
  if (vol <= 0.0) return kInfinity;

  switch (cr.kind) {
    case CriterionKind::volume_min:
      return vol;
    case CriterionKind::volume_max:
      return -vol;
    case CriterionKind::altitude: {
      const double base = tri_area3(a, b, c);
      if (base <= 0.0) return kInfinity;
      return -3.0 * vol / base;
    }
    case CriterionKind::edge_length:
      return std::max({distance(x, a), distance(x, b), distance(x, c)});
    case CriterionKind::face_area:
      return std::max({tri_area3(x, a, b), tri_area3(x, b, c), tri_area3(x, c, a), tri_area3(a, b, c)});
    case CriterionKind::total_surface:
      return tri_area3(x, a, b) + tri_area3(x, b, c) + tri_area3(x, c, a) + tri_area3(a, b, c);
    case CriterionKind::total_edge_length:
      return distance(x, a) + distance(x, b) + distance(x, c) + distance(a, b) + distance(b, c) +
             distance(c, a);
    case CriterionKind::containing_sphere:
      return min_enclosing_ball<3>({x, a, b, c}).radius;
    case CriterionKind::dihedral_fixed_axis:
      return std::max({dihedral_angle(a, b, c, x), dihedral_angle(b, c, a, x),
                       dihedral_angle(c, a, b, x)});
    case CriterionKind::solid_angle_interior:
      return -solid_angle(x, a, b, c);
    case CriterionKind::solid_angle_exterior:
      return -std::min({solid_angle(a, b, c, x), solid_angle(b, c, a, x), solid_angle(c, a, b, x)});
    default:
      throw std::invalid_argument("criterion does not apply to tetrahedral elements");
  }
}

}  // namespace detail

// Canonical cost of one element term at moving-point position x. +infinity for
// degenerate or inverted elements; maximize-min criteria return negated quality.
template <int D>
double element_cost(const CostTerm<D>& term, const Vec<D>& x) {
  if (!term.criterion.applies_to(term.stencil.kind))
    throw std::invalid_argument("criterion/stencil element kind mismatch");
  if constexpr (D == 2) {
    if (term.stencil.kind == ElementKind::triangle)
      return detail::tri_cost(term.criterion, term.stencil, x);
    return detail::quad_cost(term.criterion, term.stencil, x);
  } else {
    return detail::tet_cost(term.criterion, term.stencil, x);
  }
}

// Weighted maximum of the term costs: the objective of the placement problem.
template <int D>
double patch_cost(std::span<const CostTerm<D>> terms, const Vec<D>& x) {
  if (terms.empty()) throw std::invalid_argument("patch_cost: empty term list");
  double worst = -kInfinity;
  for (const auto& term : terms) {
    const double c = term.criterion.weight * element_cost(term, x);
    if (c == kInfinity) return kInfinity;
    worst = std::max(worst, c);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Smooth facet decomposition. Element costs with inner min/max structure (the
// smallest of three angles, the longest of two edges, ...) are the pointwise
// maximum of smooth pieces; exposing the pieces individually lets the minimax
// solver balance exact gradients at the kinks instead of differencing across
// them. The maximum of a term's facets equals element_cost for that term.

namespace detail {

template <int D>
using FacetFn = std::function<double(const Vec<D>&)>;

template <int D>
void append_cost_facets(const CostTerm<D>& term, std::vector<FacetFn<D>>& out) {
  const Criterion cr = term.criterion;
  const ElementStencil<D> st = term.stencil;
  const double w = cr.weight;
  auto whole = [cr, st, w](const Vec<D>& x) { return w * element_cost<D>({cr, st}, x); };

  if constexpr (D == 2) {
    if (st.kind == ElementKind::triangle) {
      const Vec2 a = st.fixed[0], b = st.fixed[1];
      auto gated = [a, b](auto fn) {
        return [a, b, fn](const Vec2& x) {
          return orient2d(x, a, b) <= 0.0 ? kInfinity : fn(x);
        };
      };
      switch (cr.kind) {
        case CriterionKind::min_angle:
        case CriterionKind::max_angle:
        case CriterionKind::max_angle_ext: {
          const double sign = (cr.kind == CriterionKind::min_angle) ? -1.0 : 1.0;
          if (cr.kind != CriterionKind::max_angle_ext)
            out.push_back(gated([a, b, w, sign](const Vec2& x) {
              return sign * w * angle_between(a - x, b - x);
            }));
          out.push_back(gated([a, b, w, sign](const Vec2& x) {
            return sign * w * angle_between(x - a, b - a);
          }));
          out.push_back(gated([a, b, w, sign](const Vec2& x) {
            return sign * w * angle_between(x - b, a - b);
          }));
          return;
        }
        case CriterionKind::int_altitude_min:
          out.push_back(gated([a, b, w](const Vec2& x) {
            return -w * point_segment_line_distance(b, x, a);
          }));
          out.push_back(gated([a, b, w](const Vec2& x) {
            return -w * point_segment_line_distance(a, x, b);
          }));
          return;
        case CriterionKind::edge_length:
        case CriterionKind::diameter:
          out.push_back(gated([a, w](const Vec2& x) { return w * distance(x, a); }));
          out.push_back(gated([b, w](const Vec2& x) { return w * distance(x, b); }));
          if (cr.kind == CriterionKind::diameter)
            out.push_back(gated([a, b, w](const Vec2& x) { (void)x; return w * distance(a, b); }));
          return;
        case CriterionKind::aspect_ratio:
          out.push_back(gated([a, b, w](const Vec2& x) {
            return w * squared_norm(x - a) / orient2d(x, a, b);
          }));
          out.push_back(gated([a, b, w](const Vec2& x) {
            return w * squared_norm(x - b) / orient2d(x, a, b);
          }));
          out.push_back(gated([a, b, w](const Vec2& x) {
            return w * squared_norm(a - b) / orient2d(x, a, b);
          }));
          return;
        default:
          break;
      }
    } else {
      const Vec2 v1 = st.fixed[0], v2 = st.fixed[1], v3 = st.fixed[2];
      auto gated = [v1, v2, v3](auto fn) {
        return [v1, v2, v3, fn](const Vec2& x) {
          return quad_valid({x, v1, v2, v3}) ? fn(x) : kInfinity;
        };
      };
      switch (cr.kind) {
        case CriterionKind::min_angle: {
          const std::array<Vec2, 3> fixed = {v1, v2, v3};
          for (int i = 0; i < 4; ++i)
            out.push_back(gated([fixed, i, w](const Vec2& x) {
              const std::array<Vec2, 4> q = {x, fixed[0], fixed[1], fixed[2]};
              return -w * corner_angle(q[static_cast<std::size_t>((i + 3) % 4)],
                                       q[static_cast<std::size_t>(i)],
                                       q[static_cast<std::size_t>((i + 1) % 4)]);
            }));
          return;
        }
        case CriterionKind::max_angle_ext: {
          const std::array<Vec2, 3> fixed = {v1, v2, v3};
          for (int i = 1; i < 4; ++i)
            out.push_back(gated([fixed, i, w](const Vec2& x) {
              const std::array<Vec2, 4> q = {x, fixed[0], fixed[1], fixed[2]};
              return w * corner_angle(q[static_cast<std::size_t>((i + 3) % 4)],
                                      q[static_cast<std::size_t>(i)],
                                      q[static_cast<std::size_t>((i + 1) % 4)]);
            }));
          return;
        }
        case CriterionKind::edge_length:
          out.push_back(gated([v1, w](const Vec2& x) { return w * distance(x, v1); }));
          out.push_back(gated([v3, w](const Vec2& x) { return w * distance(x, v3); }));
          return;
        case CriterionKind::quad_diameter: {
          out.push_back(gated([v1, w](const Vec2& x) { return w * distance(x, v1); }));
          out.push_back(gated([v2, w](const Vec2& x) { return w * distance(x, v2); }));
          out.push_back(gated([v3, w](const Vec2& x) { return w * distance(x, v3); }));
          const double fixed_diag = std::max({distance(v1, v2), distance(v2, v3), distance(v1, v3)});
          out.push_back(gated([fixed_diag, w](const Vec2& x) { (void)x; return w * fixed_diag; }));
          return;
        }
        case CriterionKind::quad_width: {
          // Vertex/edge pairs involving the moving point, plus the two fixed pairs.
          auto dist_facet = [&](int vi, int e0, int e1) {
            const std::array<Vec2, 3> fixed = {v1, v2, v3};
            out.push_back(gated([fixed, vi, e0, e1, w](const Vec2& x) {
              const std::array<Vec2, 4> q = {x, fixed[0], fixed[1], fixed[2]};
              return -w * point_segment_line_distance(q[static_cast<std::size_t>(vi)],
                                                      q[static_cast<std::size_t>(e0)],
                                                      q[static_cast<std::size_t>(e1)]);
            }));
          };
          for (int vi = 0; vi < 4; ++vi)
            for (int e = 0; e < 4; ++e) {
              if (e == vi || (e + 1) % 4 == vi) continue;
              dist_facet(vi, e, (e + 1) % 4);
            }
          return;
        }
        case CriterionKind::quad_inradius: {
          const std::array<Vec2, 3> fixed = {v1, v2, v3};
          for (int skip = 0; skip < 4; ++skip)
            out.push_back(gated([fixed, skip, w](const Vec2& x) {
              const std::array<Vec2, 4> q = {x, fixed[0], fixed[1], fixed[2]};
              return -w * quad_triple_radius(q, skip);
            }));
          return;
        }
        default:
          break;
      }
    }
  } else {
    const Vec3 a = st.fixed[0], b = st.fixed[1], c = st.fixed[2];
    auto gated = [a, b, c](auto fn) {
      return [a, b, c, fn](const Vec3& x) {
        return orient3d(x, a, b, c) <= 0.0 ? kInfinity : fn(x);
      };
    };
    switch (cr.kind) {
      case CriterionKind::edge_length:
        out.push_back(gated([a, w](const Vec3& x) { return w * distance(x, a); }));
        out.push_back(gated([b, w](const Vec3& x) { return w * distance(x, b); }));
        out.push_back(gated([c, w](const Vec3& x) { return w * distance(x, c); }));
        return;
      case CriterionKind::face_area:
        out.push_back(gated([a, b, w](const Vec3& x) { return w * tri_area3(x, a, b); }));
        out.push_back(gated([b, c, w](const Vec3& x) { return w * tri_area3(x, b, c); }));
        out.push_back(gated([c, a, w](const Vec3& x) { return w * tri_area3(x, c, a); }));
        out.push_back(gated([a, b, c, w](const Vec3& x) { (void)x; return w * tri_area3(a, b, c); }));
        return;
      case CriterionKind::dihedral_fixed_axis:
        out.push_back(gated([a, b, c, w](const Vec3& x) { return w * dihedral_angle(a, b, c, x); }));
        out.push_back(gated([a, b, c, w](const Vec3& x) { return w * dihedral_angle(b, c, a, x); }));
        out.push_back(gated([a, b, c, w](const Vec3& x) { return w * dihedral_angle(c, a, b, x); }));
        return;
      case CriterionKind::solid_angle_exterior:
        out.push_back(gated([a, b, c, w](const Vec3& x) { return -w * solid_angle(a, b, c, x); }));
        out.push_back(gated([a, b, c, w](const Vec3& x) { return -w * solid_angle(b, c, a, x); }));
        out.push_back(gated([a, b, c, w](const Vec3& x) { return -w * solid_angle(c, a, b, x); }));
        return;
      default:
        break;
    }
  }
  out.push_back(whole);
}

}  // namespace detail

// Halfplanes constraining the moving point so the quadrilateral (x,v1,v2,v3)
// stays convex and counterclockwise: x on the proper side of diagonal v1v3 and
// on the convex side of the corners at v1 and v3.
inline std::vector<Halfspace<2>> quad_domain_constraints(const ElementStencil<2>& st) {
  if (st.kind != ElementKind::quad)
    throw std::invalid_argument("quad_domain_constraints: quad stencil required");
  const Vec2& v1 = st.fixed[0];
  const Vec2& v2 = st.fixed[1];
  const Vec2& v3 = st.fixed[2];
  // A reflex or flat turn at the fixed corner v2 admits no convex ccw quad.
  if (cross(v2 - v1, v3 - v2) <= 0.0)
    throw std::domain_error("quad_domain_constraints: degenerate fixed vertex triple");
  return {
      left_halfplane(v1, v3),  // corner at x convex: x left of diagonal v1->v3
      left_halfplane(v1, v2),  // corner at v1 convex
      left_halfplane(v2, v3),  // corner at v3 convex
  };
}

}  // namespace qsmooth
