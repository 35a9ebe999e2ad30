// Mesh representation, patch extraction with validity constraints, per-vertex
// smoothing, full-mesh sweeps, a guarded Laplacian baseline, and quality
// reporting. Sweeps are Gauss-Seidel in vertex-index order and deterministic.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsmooth/criteria.hpp"
#include "qsmooth/patch.hpp"
#include "qsmooth/qcp.hpp"
#include "qsmooth/special.hpp"

namespace qsmooth {

struct Element {
  ElementKind kind = ElementKind::triangle;
  std::array<int, 4> v{-1, -1, -1, -1};

  int size() const { return kind == ElementKind::triangle ? 3 : 4; }
};

struct VertexFlags {
  bool movable = true;
  int boundary_marker = 0;
};

template <int D>
struct Mesh {
  std::vector<Vec<D>> points;
  std::vector<VertexFlags> flags;
  std::vector<Element> elements;

  int vertex_count() const { return static_cast<int>(points.size()); }
  int element_count() const { return static_cast<int>(elements.size()); }
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  enum class Kind { orientation, index_range, quad_convexity, duplicate_vertex, open_star };
  Kind kind;
  int element = -1;  // or vertex for open_star
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

template <int D>
double element_orientation(const Mesh<D>& mesh, const Element& el) {
  if constexpr (D == 2) {
    const auto& p = mesh.points;
    if (el.kind == ElementKind::triangle)
      return orient2d(p[static_cast<std::size_t>(el.v[0])], p[static_cast<std::size_t>(el.v[1])],
                      p[static_cast<std::size_t>(el.v[2])]);
    // Quad: smallest corner turn; positive iff strictly convex ccw.
    double worst = kInfinity;
    for (int i = 0; i < 4; ++i) {
      const Vec2& prev = p[static_cast<std::size_t>(el.v[(i + 3) % 4])];
      const Vec2& at = p[static_cast<std::size_t>(el.v[i])];
      const Vec2& next = p[static_cast<std::size_t>(el.v[(i + 1) % 4])];
      worst = std::min(worst, cross(at - prev, next - at));
    }
    return worst;
  } else {
    const auto& p = mesh.points;
    return orient3d(p[static_cast<std::size_t>(el.v[0])], p[static_cast<std::size_t>(el.v[1])],
                    p[static_cast<std::size_t>(el.v[2])], p[static_cast<std::size_t>(el.v[3])]);
  }
}

}  // namespace detail

template <int D>
ValidationReport validate(const Mesh<D>& mesh) {
  ValidationReport report;
  const int nv = mesh.vertex_count();
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Element& el = mesh.elements[static_cast<std::size_t>(e)];
    bool in_range = true;
    for (int k = 0; k < el.size(); ++k)
      if (el.v[k] < 0 || el.v[k] >= nv) {
        report.violations.push_back({Violation::Kind::index_range, e,
                                     "element " + std::to_string(e) + " references vertex " +
                                         std::to_string(el.v[k])});
        in_range = false;
      }
    if (!in_range) continue;
    for (int a = 0; a < el.size(); ++a)
      for (int b = a + 1; b < el.size(); ++b)
        if (el.v[a] == el.v[b])
          report.violations.push_back({Violation::Kind::duplicate_vertex, e,
                                       "element " + std::to_string(e) + " repeats vertex " +
                                           std::to_string(el.v[a])});
    const double orient = detail::element_orientation(mesh, el);
    if (orient <= 0.0) {
      const bool quad = el.kind == ElementKind::quad;
      report.violations.push_back(
          {quad ? Violation::Kind::quad_convexity : Violation::Kind::orientation, e,
           std::string(quad ? "nonconvex or inverted quad " : "inverted or degenerate element ") +
               std::to_string(e)});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Patch extraction

enum class PatchStatus { ok, not_movable, open_star, empty_domain };

template <int D>
struct PatchExtraction {
  PatchStatus status = PatchStatus::ok;
  Patch<D> patch;
};

namespace detail {

// Order the incident elements' link around vertex v into oriented stencils.
// Triangles contribute the edge opposite v; quads the three-vertex path.
template <int D>
bool build_stencils(const Mesh<D>& mesh, int v, std::vector<ElementStencil<D>>& out) {
  out.clear();
  if constexpr (D == 2) {
    // Each incident element yields a directed link path; the star is closed iff
    // the paths chain into a single cycle through all of them.
    struct Segment {
      int from, to;
      ElementStencil<2> st;
    };
    std::vector<Segment> segments;
    for (const Element& el : mesh.elements) {
      int pos = -1;
      for (int k = 0; k < el.size(); ++k)
        if (el.v[k] == v) pos = k;
      if (pos < 0) continue;
      ElementStencil<2> st;
      if (el.kind == ElementKind::triangle) {
        st.kind = ElementKind::triangle;
        const int a = el.v[(pos + 1) % 3], b = el.v[(pos + 2) % 3];
        st.fixed[0] = mesh.points[static_cast<std::size_t>(a)];
        st.fixed[1] = mesh.points[static_cast<std::size_t>(b)];
        segments.push_back({a, b, st});
      } else {
        st.kind = ElementKind::quad;
        const int a = el.v[(pos + 1) % 4], b = el.v[(pos + 2) % 4], c = el.v[(pos + 3) % 4];
        st.fixed[0] = mesh.points[static_cast<std::size_t>(a)];
        st.fixed[1] = mesh.points[static_cast<std::size_t>(b)];
        st.fixed[2] = mesh.points[static_cast<std::size_t>(c)];
        segments.push_back({a, c, st});
      }
    }
    if (segments.empty()) return false;
    std::map<int, std::size_t> next;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (next.count(segments[i].from)) return false;  // non-manifold fan
      next[segments[i].from] = i;
    }
    std::vector<bool> visited(segments.size(), false);
    std::size_t cur = 0;
    for (std::size_t steps = 0; steps < segments.size(); ++steps) {
      if (visited[cur]) return false;  // fan splits into several cycles
      visited[cur] = true;
      out.push_back(segments[cur].st);
      auto it = next.find(segments[cur].to);
      if (it == next.end()) return false;  // open star
      cur = it->second;
    }
    return cur == 0 && out.size() == segments.size();
  } else {
    // Closed star around an interior vertex: every link edge is shared by
    // exactly two link faces.
    std::map<std::pair<int, int>, int> edge_use;
    for (const Element& el : mesh.elements) {
      int pos = -1;
      for (int k = 0; k < 4; ++k)
        if (el.v[k] == v) pos = k;
      if (pos < 0) continue;
      // Opposite face ordered so (v, a, b, c) keeps positive orientation.
      static constexpr int kFace[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
      const int a = el.v[kFace[pos][0]], b = el.v[kFace[pos][1]], c = el.v[kFace[pos][2]];
      ElementStencil<3> st;
      st.kind = ElementKind::tetrahedron;
      st.fixed[0] = mesh.points[static_cast<std::size_t>(a)];
      st.fixed[1] = mesh.points[static_cast<std::size_t>(b)];
      st.fixed[2] = mesh.points[static_cast<std::size_t>(c)];
      out.push_back(st);
      const std::array<std::pair<int, int>, 3> edges = {
          std::minmax(a, b), std::minmax(b, c), std::minmax(c, a)};
      for (const auto& e : edges) ++edge_use[e];
    }
    if (out.empty()) return false;
    for (const auto& [edge, uses] : edge_use)
      if (uses != 2) return false;
    return true;
  }
}

}  // namespace detail

template <int D>
PatchExtraction<D> extract_patch(const Mesh<D>& mesh, int v) {
  if (v < 0 || v >= mesh.vertex_count()) throw std::out_of_range("extract_patch: vertex index");
  PatchExtraction<D> result;
  if (!mesh.flags[static_cast<std::size_t>(v)].movable) {
    result.status = PatchStatus::not_movable;
    return result;
  }
  std::vector<ElementStencil<D>> stencils;
  if (!detail::build_stencils(mesh, v, stencils)) {
    result.status = PatchStatus::open_star;
    return result;
  }
  result.patch = make_patch<D>(std::move(stencils), mesh.points[static_cast<std::size_t>(v)]);
  result.patch.center_vertex = v;
  if (!chebyshev_center(result.patch.domain).feasible) result.status = PatchStatus::empty_domain;
  return result;
}

// ---------------------------------------------------------------------------
// Smoothing

struct SmoothConfig {
  std::vector<Criterion> criteria;
  int passes = 5;
  double tol = 1e-10;
  int max_iter = 200;
  int oracle_levels = 3;  // used only for the non-quasiconvex fallback kinds
};

namespace detail {

inline bool is_special(CriterionKind k) {
  return k == CriterionKind::max_angle || k == CriterionKind::circumradius ||
         k == CriterionKind::perimeter_max_min;
}

// Routing decision: all-quasiconvex mixtures go to the descent solver; a single
// non-quasiconvex criterion goes to its special solver; mixing both is an error.
inline void check_routing(std::span<const Criterion> criteria) {
  if (criteria.empty()) throw std::invalid_argument("smoothing: no criteria configured");
  int special = 0, quasi = 0;
  for (const auto& cr : criteria)
    (cr.quasiconvex == Quasiconvexity::no ? special : quasi)++;
  if (special > 0 && quasi > 0)
    throw std::invalid_argument(
        "smoothing: cannot mix non-quasiconvex criteria with quasiconvex ones in a mixture");
  if (special > 1)
    throw std::invalid_argument("smoothing: at most one non-quasiconvex criterion per run");
}

template <int D>
std::optional<Vec<D>> optimal_position(const Patch<D>& patch, const SmoothConfig& config) {
  check_routing(config.criteria);
  const bool special = config.criteria.front().quasiconvex == Quasiconvexity::no;
  if (!special) {
    QuasiconvexProgram<D> program{patch.domain, make_terms<D>(patch, config.criteria)};
    SolveOptions opt;
    opt.tol = config.tol;
    opt.max_iter = config.max_iter;
    auto r = solve(program, opt);
    if (r.status == SolveStatus::empty_domain) return std::nullopt;
    return r.optimum.x;
  }
  if constexpr (D == 2) {
    switch (config.criteria.front().kind) {
      case CriterionKind::max_angle:
        return minmax_angle_place(patch, std::max(config.tol, 1e-9)).point;
      case CriterionKind::circumradius:
        return minmax_circumradius_place(patch, std::max(config.tol, 1e-9)).point;
      default: {
        // Remaining non-quasiconvex kinds (max-min perimeter): grid refinement.
        const auto costs = weighted_costs<D>(make_terms<D>(patch, config.criteria));
        auto r = grid_oracle_minimax<D>(patch.domain, costs, config.oracle_levels);
        if (r.status == SolveStatus::empty_domain) return std::nullopt;
        return r.optimum.x;
      }
    }
  }
  throw std::invalid_argument("smoothing: special criteria are planar only");
}

template <int D>
bool incident_elements_valid(const Mesh<D>& mesh, int v) {
  for (const Element& el : mesh.elements) {
    bool incident = false;
    for (int k = 0; k < el.size(); ++k)
      if (el.v[k] == v) incident = true;
    if (incident && element_orientation(mesh, el) <= 0.0) return false;
  }
  return true;
}

}  // namespace detail

template <int D>
struct MoveOutcome {
  bool moved = false;
  double old_cost = kInfinity;
  double new_cost = kInfinity;
  PatchStatus patch_status = PatchStatus::ok;
};

// Relocate one vertex to the configured optimum; the move is accepted only on
// strict improvement beyond tolerance and only if all incident elements stay
// positively oriented.
template <int D>
MoveOutcome<D> smooth_vertex(Mesh<D>& mesh, int v, const SmoothConfig& config) {
  MoveOutcome<D> outcome;
  auto extraction = extract_patch(mesh, v);
  outcome.patch_status = extraction.status;
  if (extraction.status != PatchStatus::ok) return outcome;
  Patch<D>& patch = extraction.patch;

  const auto terms = make_terms<D>(patch, config.criteria);
  outcome.old_cost = patch_cost<D>(terms, patch.position);
  outcome.new_cost = outcome.old_cost;

  auto candidate = detail::optimal_position<D>(patch, config);
  if (!candidate) {
    outcome.patch_status = PatchStatus::empty_domain;
    return outcome;
  }

  const double moved_cost = patch_cost<D>(terms, *candidate);
  const double needed =
      outcome.old_cost - std::max(1e-12, 1e-9 * std::abs(outcome.old_cost));
  if (!(moved_cost < needed)) return outcome;

  const Vec<D> backup = mesh.points[static_cast<std::size_t>(v)];
  mesh.points[static_cast<std::size_t>(v)] = *candidate;
  if (!detail::incident_elements_valid(mesh, v)) {
    mesh.points[static_cast<std::size_t>(v)] = backup;
    return outcome;
  }
  outcome.moved = true;
  outcome.new_cost = moved_cost;
  return outcome;
}

// ---------------------------------------------------------------------------
// Sweeps and reporting

struct CriterionStat {
  std::string name;
  double min_before = 0.0, min_after = 0.0;
};

struct SweepStats {
  int passes_run = 0;
  long vertices_visited = 0;
  long moves_accepted = 0;
  std::vector<CriterionStat> quality;      // per-criterion global min, natural units
  std::vector<double> objective_trace;     // worst element quality cost after each pass
};

// Natural (unit-preserving) quality of a whole element under one criterion,
// used for reporting; the reduction direction follows the criterion's sense.
template <int D>
double element_quality(CriterionKind kind, const Mesh<D>& mesh, const Element& el);

namespace detail {

inline double polygon_area(std::span<const Vec2> p) {
  double a = 0.0;
  const int n = static_cast<int>(p.size());
  for (int i = 0; i < n; ++i) a += cross(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>((i + 1) % n)]);
  return 0.5 * a;
}

inline double quality_2d(CriterionKind kind, std::span<const Vec2> p) {
  const int n = static_cast<int>(p.size());
  auto corner = [&](int i) {
    return corner_angle(p[static_cast<std::size_t>((i + n - 1) % n)], p[static_cast<std::size_t>(i)],
                        p[static_cast<std::size_t>((i + 1) % n)]);
  };
  switch (kind) {
    case CriterionKind::min_angle: {
      double w = kInfinity;
      for (int i = 0; i < n; ++i) w = std::min(w, corner(i));
      return w;
    }
    case CriterionKind::max_angle:
    case CriterionKind::max_angle_ext: {
      double w = 0.0;
      for (int i = 0; i < n; ++i) w = std::max(w, corner(i));
      return w;
    }
    case CriterionKind::area_min:
    case CriterionKind::area_max:
      return std::abs(polygon_area(p));
    case CriterionKind::perimeter:
    case CriterionKind::perimeter_max_min: {
      double len = 0.0;
      for (int i = 0; i < n; ++i)
        len += distance(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>((i + 1) % n)]);
      return len;
    }
    case CriterionKind::edge_length:
    case CriterionKind::diameter:
    case CriterionKind::quad_diameter: {
      double d = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          d = std::max(d, distance(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]));
      return d;
    }
    case CriterionKind::containing_circle:
    case CriterionKind::quad_containing_circle: {
      if (n == 3) return min_enclosing_ball<2>({p[0], p[1], p[2]}).radius;
      return min_enclosing_ball<2>({p[0], p[1], p[2], p[3]}).radius;
    }
    default:
      break;
  }
  if (n == 3) {
    const auto m = triangle_measures<2>(p[0], p[1], p[2]);
    switch (kind) {
      case CriterionKind::ext_altitude_min:
      case CriterionKind::ext_altitude_max:
        return std::max({m.altitudes[0], m.altitudes[1], m.altitudes[2]});
      case CriterionKind::int_altitude_min:
        return std::min({m.altitudes[0], m.altitudes[1], m.altitudes[2]});
      case CriterionKind::aspect_ratio:
        return m.degenerate ? kInfinity : m.diameter * m.diameter / (2.0 * m.area);
      case CriterionKind::inradius:
        return m.inradius;
      case CriterionKind::bank_smith:
        return bank_smith_quality(p[0], p[1], p[2]);
      case CriterionKind::circumradius:
        return m.circumradius;
      default:
        break;
    }
  } else {
    const std::array<Vec2, 4> q = {p[0], p[1], p[2], p[3]};
    switch (kind) {
      case CriterionKind::quad_width:
        return quad_width(q);
      case CriterionKind::quad_inradius:
        return quad_inradius(q);
      default:
        break;
    }
  }
  throw std::invalid_argument("element_quality: criterion/element mismatch");
}

inline double quality_3d(CriterionKind kind, std::span<const Vec3> p) {
  const Vec3& a = p[0];
  const Vec3& b = p[1];
  const Vec3& c = p[2];
  const Vec3& d = p[3];
  switch (kind) {
    case CriterionKind::volume_min:
    case CriterionKind::volume_max:
      return std::abs(orient3d(a, b, c, d)) / 6.0;
    case CriterionKind::altitude: {
      const double vol = std::abs(orient3d(a, b, c, d)) / 6.0;
      double worst = kInfinity;
      const std::array<std::array<Vec3, 3>, 4> faces = {{{b, c, d}, {a, c, d}, {a, b, d}, {a, b, c}}};
      for (const auto& f : faces) {
        const double base = tri_area3(f[0], f[1], f[2]);
        if (base > 0.0) worst = std::min(worst, 3.0 * vol / base);
      }
      return worst;
    }
    case CriterionKind::edge_length: {
      double w = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) w = std::max(w, distance(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]));
      return w;
    }
    case CriterionKind::face_area:
      return std::max({tri_area3(b, c, d), tri_area3(a, c, d), tri_area3(a, b, d), tri_area3(a, b, c)});
    case CriterionKind::total_surface:
      return tri_area3(b, c, d) + tri_area3(a, c, d) + tri_area3(a, b, d) + tri_area3(a, b, c);
    case CriterionKind::total_edge_length: {
      double s = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) s += distance(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
      return s;
    }
    case CriterionKind::containing_sphere:
      return min_enclosing_ball<3>({a, b, c, d}).radius;
    case CriterionKind::dihedral_fixed_axis: {
      double w = 0.0;
      const std::array<std::array<Vec3, 4>, 6> axes = {{{a, b, c, d},
                                                        {a, c, b, d},
                                                        {a, d, b, c},
                                                        {b, c, a, d},
                                                        {b, d, a, c},
                                                        {c, d, a, b}}};
      for (const auto& ax : axes) w = std::max(w, dihedral_angle(ax[0], ax[1], ax[2], ax[3]));
      return w;
    }
    case CriterionKind::solid_angle_interior:
    case CriterionKind::solid_angle_exterior:
      return std::min({solid_angle(a, b, c, d), solid_angle(b, a, c, d), solid_angle(c, a, b, d),
                       solid_angle(d, a, b, c)});
    default:
      throw std::invalid_argument("element_quality: criterion/element mismatch");
  }
}

}  // namespace detail

template <int D>
double element_quality(CriterionKind kind, const Mesh<D>& mesh, const Element& el) {
  std::array<Vec<D>, 4> pts{};
  for (int k = 0; k < el.size(); ++k) pts[static_cast<std::size_t>(k)] = mesh.points[static_cast<std::size_t>(el.v[k])];
  if constexpr (D == 2)
    return detail::quality_2d(kind, std::span<const Vec2>(pts.data(), static_cast<std::size_t>(el.size())));
  else
    return detail::quality_3d(kind, std::span<const Vec3>(pts.data(), 4));
}

// Global minimum of the natural per-element quality.
template <int D>
double global_min_quality(const Mesh<D>& mesh, CriterionKind kind) {
  double worst = kInfinity;
  for (const Element& el : mesh.elements) worst = std::min(worst, element_quality<D>(kind, mesh, el));
  return worst;
}

namespace detail {

// Worst weighted element cost over the whole mesh w.r.t. its own vertex? No:
// sweeps track the worst natural quality per criterion; the objective trace
// records the per-pass global maximum of the canonical cost sense.
template <int D>
double mesh_objective(const Mesh<D>& mesh, std::span<const Criterion> criteria) {
  double worst = -kInfinity;
  for (const Element& el : mesh.elements)
    for (const auto& cr : criteria) {
      if (!cr.applies_to(el.kind)) continue;
      const double q = element_quality<D>(cr.kind, mesh, el);
      const double cost = (cr.sense == Sense::maximize_min) ? -q : q;
      worst = std::max(worst, cr.weight * cost);
    }
  return worst;
}

}  // namespace detail

template <int D>
SweepStats sweep(Mesh<D>& mesh, const SmoothConfig& config) {
  detail::check_routing(config.criteria);
  const auto report = validate(mesh);
  if (!report.ok()) throw std::invalid_argument("sweep: input mesh fails validation");

  SweepStats stats;
  for (const auto& cr : config.criteria) {
    CriterionStat qs;
    qs.name = std::string(criterion_info(cr.kind).name);
    qs.min_before = global_min_quality<D>(mesh, cr.kind);
    stats.quality.push_back(qs);
  }

  for (int pass = 0; pass < config.passes; ++pass) {
    long accepted = 0;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      if (!mesh.flags[static_cast<std::size_t>(v)].movable) continue;
      ++stats.vertices_visited;
      const auto outcome = smooth_vertex(mesh, v, config);
      if (outcome.moved) ++accepted;
    }
    stats.moves_accepted += accepted;
    ++stats.passes_run;
    stats.objective_trace.push_back(detail::mesh_objective<D>(mesh, config.criteria));
    if (accepted == 0) break;
  }

  for (std::size_t i = 0; i < config.criteria.size(); ++i)
    stats.quality[i].min_after = global_min_quality<D>(mesh, config.criteria[i].kind);
  return stats;
}

struct LaplacianConfig {
  int passes = 5;
  bool guarded = true;  // reject moves that invalidate incident elements
};

namespace detail {

template <int D>
std::vector<std::vector<int>> edge_neighbors(const Mesh<D>& mesh) {
  std::vector<std::vector<int>> nbr(static_cast<std::size_t>(mesh.vertex_count()));
  auto link = [&](int a, int b) {
    auto& la = nbr[static_cast<std::size_t>(a)];
    if (std::find(la.begin(), la.end(), b) == la.end()) la.push_back(b);
    auto& lb = nbr[static_cast<std::size_t>(b)];
    if (std::find(lb.begin(), lb.end(), a) == lb.end()) lb.push_back(a);
  };
  for (const Element& el : mesh.elements) {
    if (el.kind == ElementKind::tetrahedron) {
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) link(el.v[i], el.v[j]);
    } else {
      for (int i = 0; i < el.size(); ++i) link(el.v[i], el.v[(i + 1) % el.size()]);
    }
  }
  return nbr;
}

}  // namespace detail

// Classic Laplacian smoothing: each movable vertex moves to the centroid of its
// edge neighbors. The raw method can invalidate the mesh, so the default guard
// rejects moves that invert or degenerate an incident element.
template <int D>
SweepStats laplacian_smooth(Mesh<D>& mesh, const LaplacianConfig& config = {}) {
  const auto report = validate(mesh);
  if (!report.ok()) throw std::invalid_argument("laplacian_smooth: input mesh fails validation");

  SweepStats stats;
  CriterionStat qs;
  qs.name = "min-angle";
  if constexpr (D == 2) qs.min_before = global_min_quality<D>(mesh, CriterionKind::min_angle);
  stats.quality.push_back(qs);

  const auto neighbors = detail::edge_neighbors(mesh);
  for (int pass = 0; pass < config.passes; ++pass) {
    long accepted = 0;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      if (!mesh.flags[static_cast<std::size_t>(v)].movable) continue;
      const auto& nbr = neighbors[static_cast<std::size_t>(v)];
      if (nbr.empty()) continue;
      ++stats.vertices_visited;
      Vec<D> centroid{};
      for (int u : nbr) centroid += mesh.points[static_cast<std::size_t>(u)];
      centroid /= static_cast<double>(nbr.size());
      const Vec<D> backup = mesh.points[static_cast<std::size_t>(v)];
      if (distance(centroid, backup) <= 1e-15) continue;
      mesh.points[static_cast<std::size_t>(v)] = centroid;
      if (config.guarded && !detail::incident_elements_valid(mesh, v)) {
        mesh.points[static_cast<std::size_t>(v)] = backup;
        continue;
      }
      ++accepted;
    }
    stats.moves_accepted += accepted;
    ++stats.passes_run;
    if (accepted == 0) break;
  }
  if constexpr (D == 2) stats.quality[0].min_after = global_min_quality<D>(mesh, CriterionKind::min_angle);
  return stats;
}

// ---------------------------------------------------------------------------
// Quality report

struct QualityEntry {
  std::string criterion;
  double min = 0.0, max = 0.0, mean = 0.0;
  std::array<long, 32> histogram{};
  long count = 0;
};

template <int D>
std::vector<QualityEntry> quality_report(const Mesh<D>& mesh, std::span<const Criterion> criteria) {
  std::vector<QualityEntry> entries;
  for (const auto& cr : criteria) {
    QualityEntry entry;
    entry.criterion = std::string(criterion_info(cr.kind).name);
    std::vector<double> values;
    for (const Element& el : mesh.elements) {
      if (!cr.applies_to(el.kind)) continue;
      values.push_back(element_quality<D>(cr.kind, mesh, el));
    }
    entry.count = static_cast<long>(values.size());
    if (!values.empty()) {
      entry.min = *std::min_element(values.begin(), values.end());
      entry.max = *std::max_element(values.begin(), values.end());
      double sum = 0.0;
      for (double v : values) sum += v;
      entry.mean = sum / static_cast<double>(values.size());
      const double span = entry.max - entry.min;
      for (double v : values) {
        int bin = (span > 0.0) ? static_cast<int>((v - entry.min) / span * 32.0) : 0;
        bin = std::clamp(bin, 0, 31);
        ++entry.histogram[static_cast<std::size_t>(bin)];
      }
    }
    entries.push_back(entry);
  }
  return entries;
}

}  // namespace qsmooth
