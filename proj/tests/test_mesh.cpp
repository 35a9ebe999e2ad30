#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "qsmooth/mesh.hpp"
#include "support.hpp"

using namespace qsmooth;
using testkit::Rng;
using testkit::uniform;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

// Structured triangulation of an n x n vertex grid, unit spacing, split along
// the diagonal of each cell.
Mesh<2> grid_mesh(int n) {
  Mesh<2> mesh;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      mesh.points.push_back({double(i), double(j)});
      const bool boundary = (i == 0 || j == 0 || i == n - 1 || j == n - 1);
      mesh.flags.push_back({!boundary, boundary ? 1 : 0});
    }
  auto id = [n](int i, int j) { return j * n + i; };
  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i) {
      mesh.elements.push_back({ElementKind::triangle, {id(i, j), id(i + 1, j), id(i + 1, j + 1), -1}});
      mesh.elements.push_back({ElementKind::triangle, {id(i, j), id(i + 1, j + 1), id(i, j + 1), -1}});
    }
  return mesh;
}

// Quad grid mesh (n x n vertices).
Mesh<2> quad_grid_mesh(int n) {
  Mesh<2> mesh;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      mesh.points.push_back({double(i), double(j)});
      const bool boundary = (i == 0 || j == 0 || i == n - 1 || j == n - 1);
      mesh.flags.push_back({!boundary, boundary ? 1 : 0});
    }
  auto id = [n](int i, int j) { return j * n + i; };
  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i)
      mesh.elements.push_back({ElementKind::quad, {id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}});
  return mesh;
}

// Octahedron-like tet star: center vertex surrounded by ring + poles.
Mesh<3> tet_star_mesh(const Vec3& center, double ring_z = 0.0) {
  Mesh<3> mesh;
  mesh.points = {center,
                 {1, 0, ring_z},
                 {0, 1, ring_z},
                 {-1, 0, ring_z},
                 {0, -1, ring_z},
                 {0, 0, 1},
                 {0, 0, -1}};
  mesh.flags.push_back({true, 0});
  for (int i = 0; i < 6; ++i) mesh.flags.push_back({false, 1});
  auto add = [&](int a, int b, int c) {
    mesh.elements.push_back({ElementKind::tetrahedron, {0, a, b, c}});
  };
  // (0, ring_i, ring_{i+1}, top) and (0, ring_{i+1}, ring_i, bottom)
  for (int i = 0; i < 4; ++i) {
    const int a = 1 + i, b = 1 + (i + 1) % 4;
    add(a, b, 5);
    add(b, a, 6);
  }
  return mesh;
}

SmoothConfig min_angle_config() {
  SmoothConfig config;
  config.criteria = {make_criterion(CriterionKind::min_angle)};
  return config;
}

}  // namespace

TEST_CASE("validate: clean grid, inverted triangle, nonconvex quad, bad index") {
  auto mesh = grid_mesh(4);
  CHECK(validate(mesh).ok());

  auto inverted = mesh;
  std::swap(inverted.elements[0].v[0], inverted.elements[0].v[1]);
  const auto r1 = validate(inverted);
  REQUIRE(r1.violations.size() == 1);
  CHECK(r1.violations[0].kind == Violation::Kind::orientation);
  CHECK(r1.violations[0].element == 0);

  auto quads = quad_grid_mesh(3);
  CHECK(validate(quads).ok());
  quads.points[4] = {2.5, 2.5};  // drag the center far out: quads fold
  const auto r2 = validate(quads);
  REQUIRE_FALSE(r2.ok());
  CHECK(r2.violations[0].kind == Violation::Kind::quad_convexity);

  auto bad = mesh;
  bad.elements[2].v[1] = 99;
  const auto r3 = validate(bad);
  REQUIRE_FALSE(r3.ok());
  CHECK(r3.violations[0].kind == Violation::Kind::index_range);
}

TEST_CASE("extract patch: interior grid vertex has a hexagonal star") {
  const auto mesh = grid_mesh(4);
  // Vertex (1,1) = index 5 is interior with 6 incident triangles.
  const auto ext = extract_patch(mesh, 5);
  REQUIRE(ext.status == PatchStatus::ok);
  CHECK(ext.patch.stencils.size() == 6);
  for (const auto& st : ext.patch.stencils) CHECK(st.kind == ElementKind::triangle);
  CHECK(ext.patch.neighbors.size() == 6);
  // The kernel contains the vertex itself strictly.
  CHECK(ext.patch.domain.contains(mesh.points[5], -1e-9));
}

TEST_CASE("extract patch: quad-mesh vertex with 4 incident quads") {
  const auto mesh = quad_grid_mesh(3);
  const auto ext = extract_patch(mesh, 4);  // center of the 3x3 grid
  REQUIRE(ext.status == PatchStatus::ok);
  CHECK(ext.patch.stencils.size() == 4);
  for (const auto& st : ext.patch.stencils) CHECK(st.kind == ElementKind::quad);
  // Domain = kernel halfplanes + diagonal constraints; center must satisfy it.
  CHECK(ext.patch.domain.contains(mesh.points[4], -1e-9));
}

TEST_CASE("extract patch: boundary and fixed vertices are not smoothable") {
  const auto mesh = grid_mesh(4);
  CHECK(extract_patch(mesh, 0).status == PatchStatus::not_movable);
  auto unmarked = mesh;
  unmarked.flags[0].movable = true;  // boundary vertex wrongly marked movable
  CHECK(extract_patch(unmarked, 0).status == PatchStatus::open_star);
}

TEST_CASE("extract patch: tangled star reports an empty domain") {
  // Fan triangulation of a spiral whose kernel is empty: wherever the center
  // sits, some incident element is inverted.
  const std::vector<Vec2> spiral = {{0, 0},   {6, 0},  {6, 6},  {1, 6},  {1, 1},
                                    {2, 1},   {2, 5},  {5, 5},  {5, 2},  {3, 2},
                                    {3, 3},   {4, 3},  {4, 4},  {2.5, 4}, {2.5, 0.5},
                                    {0.5, 0.5}};
  Mesh<2> mesh;
  mesh.points.push_back({3.0, 2.5});
  mesh.flags.push_back({true, 0});
  for (const auto& p : spiral) {
    mesh.points.push_back(p);
    mesh.flags.push_back({false, 1});
  }
  const int n = static_cast<int>(spiral.size());
  for (int i = 0; i < n; ++i)
    mesh.elements.push_back({ElementKind::triangle, {0, 1 + i, 1 + (i + 1) % n, -1}});

  const auto ext = extract_patch(mesh, 0);
  REQUIRE(ext.status == PatchStatus::empty_domain);
  // Kernel emptiness certified by the halfspace-intersection certificate.
  const auto poly = halfspace_intersection(ext.patch.domain);
  CHECK(poly.empty);
  CHECK_FALSE(poly.infeasible_subset.empty());
  CHECK(poly.infeasible_subset.size() <= 3);
}

TEST_CASE("extract patch: 3D interior vertex with a closed tet star") {
  const auto mesh = tet_star_mesh({0.1, 0.05, -0.02});
  const auto ext = extract_patch(mesh, 0);
  REQUIRE(ext.status == PatchStatus::ok);
  CHECK(ext.patch.stencils.size() == 8);
  CHECK(ext.patch.domain.contains(mesh.points[0], -1e-9));
}

TEST_CASE("smooth vertex: already-optimal vertex does not move") {
  auto mesh = grid_mesh(3);  // single interior vertex at (1,1)
  auto config = min_angle_config();
  const auto first = smooth_vertex(mesh, 4, config);
  // After one successful smoothing the vertex is at its optimum; re-smoothing
  // must refuse to move it further.
  const auto second = smooth_vertex(mesh, 4, config);
  CHECK_FALSE(second.moved);
  (void)first;
}

TEST_CASE("smooth vertex: displaced square-patch center returns to the origin") {
  Mesh<2> mesh;
  mesh.points = {{0.3, 0.2}, {1, -1}, {1, 1}, {-1, 1}, {-1, -1}};
  mesh.flags.push_back({true, 0});
  for (int i = 0; i < 4; ++i) mesh.flags.push_back({false, 1});
  mesh.elements = {{ElementKind::triangle, {0, 1, 2, -1}},
                   {ElementKind::triangle, {0, 2, 3, -1}},
                   {ElementKind::triangle, {0, 3, 4, -1}},
                   {ElementKind::triangle, {0, 4, 1, -1}}};
  REQUIRE(validate(mesh).ok());
  auto config = min_angle_config();
  const auto outcome = smooth_vertex(mesh, 0, config);
  REQUIRE(outcome.moved);
  CHECK(norm(mesh.points[0]) < 1e-6);
  CHECK(outcome.new_cost < outcome.old_cost);
  CHECK(validate(mesh).ok());
}

TEST_CASE("smooth vertex: mixing quasiconvex and special criteria is a usage error") {
  auto mesh = grid_mesh(3);
  SmoothConfig config;
  config.criteria = {make_criterion(CriterionKind::max_angle),
                     make_criterion(CriterionKind::min_angle)};
  CHECK_THROWS_AS(smooth_vertex(mesh, 4, config), std::invalid_argument);
}

TEST_CASE("smooth vertex: special criterion routes to the special solver") {
  Mesh<2> mesh;
  mesh.points = {{0.3, 0.2}, {1, -1}, {1, 1}, {-1, 1}, {-1, -1}};
  mesh.flags.push_back({true, 0});
  for (int i = 0; i < 4; ++i) mesh.flags.push_back({false, 1});
  mesh.elements = {{ElementKind::triangle, {0, 1, 2, -1}},
                   {ElementKind::triangle, {0, 2, 3, -1}},
                   {ElementKind::triangle, {0, 3, 4, -1}},
                   {ElementKind::triangle, {0, 4, 1, -1}}};
  SmoothConfig config;
  config.criteria = {make_criterion(CriterionKind::max_angle)};
  const auto outcome = smooth_vertex(mesh, 0, config);
  REQUIRE(outcome.moved);
  CHECK(norm(mesh.points[0]) < 1e-5);  // square patch: minmax angle at center
}

TEST_CASE("sweep: already-optimal structured mesh accepts no moves") {
  auto mesh = grid_mesh(5);
  auto config = min_angle_config();
  // First bring it to the fixpoint, then demand idempotence.
  sweep(mesh, config);
  const auto stats = sweep(mesh, config);
  CHECK(stats.moves_accepted == 0);
}

TEST_CASE("sweep: single interior vertex equals one smooth_vertex call") {
  auto mesh_a = grid_mesh(3);
  auto mesh_b = mesh_a;
  auto config = min_angle_config();
  config.passes = 1;
  sweep(mesh_a, config);
  smooth_vertex(mesh_b, 4, config);
  CHECK(distance(mesh_a.points[4], mesh_b.points[4]) < 1e-12);
}

TEST_CASE("sweep: perturbed grid strictly improves the minimum angle") {
  auto mesh = grid_mesh(6);
  Rng rng(41);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (!mesh.flags[v].movable) continue;
    mesh.points[v] += Vec2{uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3)};
  }
  REQUIRE(validate(mesh).ok());
  const double before = global_min_quality<2>(mesh, CriterionKind::min_angle);

  auto config = min_angle_config();
  auto stats = sweep(mesh, config);
  const double after = global_min_quality<2>(mesh, CriterionKind::min_angle);
  CHECK(stats.moves_accepted > 0);
  CHECK(after > before);
  CHECK(validate(mesh).ok());
  CHECK(stats.quality[0].min_before == Approx(before));
  CHECK(stats.quality[0].min_after == Approx(after));
}

TEST_CASE("sweep: invalid input mesh is rejected before any mutation") {
  auto mesh = grid_mesh(4);
  std::swap(mesh.elements[0].v[0], mesh.elements[0].v[1]);
  auto config = min_angle_config();
  CHECK_THROWS_AS(sweep(mesh, config), std::invalid_argument);
}

TEST_CASE("sweep: topology and validity preserved across randomized runs") {
  Rng rng(42);
  for (int trial = 0; trial < 12; ++trial) {
    auto mesh = grid_mesh(5);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      if (!mesh.flags[v].movable) continue;
      mesh.points[v] += Vec2{uniform(rng, -0.25, 0.25), uniform(rng, -0.25, 0.25)};
    }
    if (!validate(mesh).ok()) continue;
    const auto elements_before = mesh.elements;

    SmoothConfig config;
    const CriterionKind kinds[] = {CriterionKind::min_angle, CriterionKind::area_max,
                                   CriterionKind::bank_smith, CriterionKind::inradius};
    config.criteria = {make_criterion(kinds[trial % 4])};
    config.passes = 2;
    sweep(mesh, config);

    REQUIRE(validate(mesh).ok());
    REQUIRE(mesh.elements.size() == elements_before.size());
    for (std::size_t e = 0; e < elements_before.size(); ++e)
      for (int k = 0; k < 4; ++k) REQUIRE(mesh.elements[e].v[k] == elements_before[e].v[k]);
  }
}

TEST_CASE("sweep: monotone worst quality for a single criterion") {
  auto mesh = grid_mesh(6);
  Rng rng(43);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (!mesh.flags[v].movable) continue;
    mesh.points[v] += Vec2{uniform(rng, -0.25, 0.25), uniform(rng, -0.25, 0.25)};
  }
  REQUIRE(validate(mesh).ok());

  auto config = min_angle_config();
  config.passes = 1;
  double last = global_min_quality<2>(mesh, CriterionKind::min_angle);
  for (int pass = 0; pass < 4; ++pass) {
    sweep(mesh, config);
    const double now = global_min_quality<2>(mesh, CriterionKind::min_angle);
    REQUIRE(now >= last - 1e-12);
    last = now;
  }
}

TEST_CASE("laplacian: symmetric hexagonal patch stays put") {
  Mesh<2> mesh;
  mesh.points = {{0, 0}};
  mesh.flags.push_back({true, 0});
  for (int i = 0; i < 6; ++i) {
    const double a = i * kPi / 3;
    mesh.points.push_back({std::cos(a), std::sin(a)});
    mesh.flags.push_back({false, 1});
  }
  for (int i = 0; i < 6; ++i)
    mesh.elements.push_back({ElementKind::triangle, {0, 1 + i, 1 + (i + 1) % 6, -1}});
  REQUIRE(validate(mesh).ok());
  laplacian_smooth(mesh);
  CHECK(norm(mesh.points[0]) < 1e-12);
}

TEST_CASE("laplacian: vertex moves to the neighbor centroid") {
  Mesh<2> mesh;
  mesh.points = {{0.2, 0.4}, {0, 0}, {2, 0}, {2, 2}, {0, 2}};
  mesh.flags.push_back({true, 0});
  for (int i = 0; i < 4; ++i) mesh.flags.push_back({false, 1});
  mesh.elements = {{ElementKind::triangle, {0, 1, 2, -1}},
                   {ElementKind::triangle, {0, 2, 3, -1}},
                   {ElementKind::triangle, {0, 3, 4, -1}},
                   {ElementKind::triangle, {0, 4, 1, -1}}};
  REQUIRE(validate(mesh).ok());
  laplacian_smooth(mesh);
  CHECK(distance(mesh.points[0], Vec2{1, 1}) < 1e-12);
}

TEST_CASE("laplacian: guard rejects a centroid outside the kernel") {
  // Nonconvex star: the centroid of the neighbors falls outside the kernel of
  // this arrowhead-like patch, so the guarded baseline must refuse.
  Mesh<2> mesh;
  mesh.points = {{2.4, 0.6}, {0, 0}, {4, 0}, {2, 3}, {2.2, 1}};
  mesh.flags.push_back({true, 0});
  for (int i = 0; i < 4; ++i) mesh.flags.push_back({false, 1});
  mesh.elements = {{ElementKind::triangle, {0, 1, 2, -1}},
                   {ElementKind::triangle, {0, 2, 3, -1}},
                   {ElementKind::triangle, {0, 3, 4, -1}},
                   {ElementKind::triangle, {0, 4, 1, -1}}};
  REQUIRE(validate(mesh).ok());
  const Vec2 centroid = 0.25 * (Vec2{0, 0} + Vec2{4, 0} + Vec2{2, 3} + Vec2{2.2, 1});

  auto guarded = mesh;
  LaplacianConfig config;
  auto stats = laplacian_smooth(guarded, config);
  CHECK(stats.moves_accepted == 0);
  CHECK(distance(guarded.points[0], mesh.points[0]) == 0.0);
  CHECK(validate(guarded).ok());

  auto raw = mesh;
  config.guarded = false;
  laplacian_smooth(raw, config);
  CHECK(distance(raw.points[0], centroid) < 1e-12);
  CHECK_FALSE(validate(raw).ok());  // the paper's caveat: raw moves can tangle
}

TEST_CASE("quality report: single-element meshes") {
  Mesh<2> equilateral;
  equilateral.points = {{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
  equilateral.flags = {{false, 1}, {false, 1}, {false, 1}};
  equilateral.elements = {{ElementKind::triangle, {0, 1, 2, -1}}};
  std::vector<Criterion> criteria = {make_criterion(CriterionKind::min_angle)};
  auto report = quality_report<2>(equilateral, criteria);
  REQUIRE(report.size() == 1);
  CHECK(report[0].min == Approx(kPi / 3));
  CHECK(report[0].max == Approx(kPi / 3));
  CHECK(report[0].count == 1);

  Mesh<2> right;
  right.points = {{0, 0}, {3, 0}, {0, 4}};
  right.flags = {{false, 1}, {false, 1}, {false, 1}};
  right.elements = {{ElementKind::triangle, {0, 1, 2, -1}}};
  criteria = {make_criterion(CriterionKind::inradius)};
  report = quality_report<2>(right, criteria);
  CHECK(report[0].min == Approx(1.0));

  // Mixed mesh: the reported min is the min over per-element evaluations.
  auto grid = grid_mesh(3);
  criteria = {make_criterion(CriterionKind::min_angle)};
  report = quality_report<2>(grid, criteria);
  double expect = kInfinity;
  for (const auto& el : grid.elements)
    expect = std::min(expect, element_quality<2>(CriterionKind::min_angle, grid, el));
  CHECK(report[0].min == Approx(expect));
  long total = 0;
  for (long c : report[0].histogram) total += c;
  CHECK(total == report[0].count);
}

TEST_CASE("3D smoothing: sliver star improves the minimum solid angle") {
  // Center vertex dragged toward a ring edge: thin tets on the near side.
  auto mesh = tet_star_mesh({0.4, 0.4, 0.0});
  REQUIRE(validate(mesh).ok());
  double before = kInfinity;
  for (const auto& el : mesh.elements)
    before = std::min(before, element_quality<3>(CriterionKind::solid_angle_interior, mesh, el));

  SmoothConfig config;
  config.criteria = {make_criterion(CriterionKind::solid_angle_interior)};
  const auto outcome = smooth_vertex(mesh, 0, config);
  REQUIRE(outcome.moved);
  REQUIRE(validate(mesh).ok());

  double after = kInfinity;
  for (const auto& el : mesh.elements)
    after = std::min(after, element_quality<3>(CriterionKind::solid_angle_interior, mesh, el));
  CHECK(after > before * 2.0);
}
