#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qsmooth/io.hpp"
#include "support.hpp"

using namespace qsmooth;
using Catch::Approx;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("qsmooth-io-" + std::to_string(::getpid()) + "-" + std::to_string(counter()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static int counter() {
    static int n = 0;
    return n++;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}

}  // namespace

TEST_CASE("read mesh: unit square with two ccw triangles") {
  TempDir dir;
  write_file(dir.file("m.node"),
             "4 2 0 1\n"
             "1 0.0 0.0 1\n"
             "2 1.0 0.0 1\n"
             "3 1.0 1.0 1\n"
             "4 0.0 1.0 1\n");
  write_file(dir.file("m.ele"),
             "2 3 0\n"
             "1 1 2 3\n"
             "2 1 3 4\n");
  const auto any = read_mesh(dir.file("m.node"), dir.file("m.ele"));
  const auto& mesh = std::get<Mesh<2>>(any);
  REQUIRE(mesh.vertex_count() == 4);
  REQUIRE(mesh.element_count() == 2);
  CHECK(validate(mesh).ok());
  for (const auto& el : mesh.elements) CHECK(el.kind == ElementKind::triangle);
}

TEST_CASE("read mesh: zero-based indexing autodetected") {
  TempDir dir;
  write_file(dir.file("m.node"),
             "3 2 0 0\n"
             "0 0 0\n"
             "1 1 0\n"
             "2 0 1\n");
  write_file(dir.file("m.ele"),
             "1 3 0\n"
             "0 0 1 2\n");
  const auto any = read_mesh(dir.file("m.node"), dir.file("m.ele"));
  const auto& mesh = std::get<Mesh<2>>(any);
  CHECK(mesh.elements[0].v[0] == 0);
  CHECK(mesh.elements[0].v[2] == 2);
}

TEST_CASE("read mesh: comments and boundary flags") {
  TempDir dir;
  write_file(dir.file("m.node"),
             "# a comment line\n"
             "4 2 0 1\n"
             "1 0 0 1\n"
             "2 2 0 0\n"
             "3 2 2 1\n"
             "4 0 2 0\n");
  write_file(dir.file("m.ele"),
             "2 3 0  # trailing comment\n"
             "1 1 2 3\n"
             "2 1 3 4\n");
  const auto any = read_mesh(dir.file("m.node"), dir.file("m.ele"));
  const auto& mesh = std::get<Mesh<2>>(any);
  // Marker 1 vertices are fixed; all four are on the topological boundary, so
  // even marker-0 vertices end up immovable.
  for (const auto& f : mesh.flags) CHECK_FALSE(f.movable);
}

TEST_CASE("write/read roundtrip preserves the numeric content exactly") {
  TempDir dir;
  Mesh<2> mesh;
  testkit::Rng rng(51);
  for (int i = 0; i < 9; ++i) {
    mesh.points.push_back({testkit::uniform(rng, -1, 1) * 1e3, testkit::uniform(rng, -1, 1) / 7.0});
    mesh.flags.push_back({i >= 4, i < 4 ? 1 : 0});
  }
  // A fan around vertex 8 keeps the fixture small; validity is not required
  // for the roundtrip contract.
  for (int i = 0; i < 8; ++i)
    mesh.elements.push_back({ElementKind::triangle, {8, i, (i + 1) % 8, -1}});

  write_mesh(mesh, dir.file("w.node"), dir.file("w.ele"));
  const auto back = std::get<Mesh<2>>(read_mesh(dir.file("w.node"), dir.file("w.ele")));
  REQUIRE(back.vertex_count() == mesh.vertex_count());
  REQUIRE(back.element_count() == mesh.element_count());
  for (int i = 0; i < mesh.vertex_count(); ++i) {
    CHECK(back.points[i][0] == mesh.points[i][0]);  // bitwise through %.17g
    CHECK(back.points[i][1] == mesh.points[i][1]);
    CHECK(back.flags[i].boundary_marker == mesh.flags[i].boundary_marker);
  }
  for (int e = 0; e < mesh.element_count(); ++e)
    for (int k = 0; k < 3; ++k) CHECK(back.elements[e].v[k] == mesh.elements[e].v[k]);

  // Second roundtrip is byte-identical.
  write_mesh(back, dir.file("w2.node"), dir.file("w2.ele"));
  std::ifstream a(dir.file("w.node")), b(dir.file("w2.node"));
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("write/read roundtrip: quads carry their kind annotation") {
  TempDir dir;
  Mesh<2> mesh;
  mesh.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int i = 0; i < 4; ++i) mesh.flags.push_back({false, 1});
  mesh.elements = {{ElementKind::quad, {0, 1, 2, 3}}};
  write_mesh(mesh, dir.file("q.node"), dir.file("q.ele"));
  const auto back = std::get<Mesh<2>>(read_mesh(dir.file("q.node"), dir.file("q.ele")));
  CHECK(back.elements[0].kind == ElementKind::quad);
}

TEST_CASE("read mesh: 3D tetrahedra") {
  TempDir dir;
  write_file(dir.file("t.node"),
             "5 3 0 1\n"
             "1 0 0 0 0\n"
             "2 1 0 0 1\n"
             "3 0 1 0 1\n"
             "4 0 0 1 1\n"
             "5 0.25 0.25 0.25 1\n");
  write_file(dir.file("t.ele"),
             "4 4 0\n"
             "1 5 2 3 4\n"
             "2 5 1 4 3\n"
             "3 5 1 2 4\n"
             "4 5 1 3 2\n");
  const auto any = read_mesh(dir.file("t.node"), dir.file("t.ele"));
  const auto& mesh = std::get<Mesh<3>>(any);
  REQUIRE(mesh.element_count() == 4);
  for (const auto& el : mesh.elements) CHECK(el.kind == ElementKind::tetrahedron);
  CHECK(validate(mesh).ok());
}

TEST_CASE("read mesh: out-of-range vertex index names the line") {
  TempDir dir;
  write_file(dir.file("m.node"),
             "4 2 0 0\n"
             "1 0 0\n"
             "2 1 0\n"
             "3 1 1\n"
             "4 0 1\n");
  write_file(dir.file("m.ele"),
             "1 3 0\n"
             "1 1 2 99\n");
  try {
    read_mesh(dir.file("m.node"), dir.file("m.ele"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line_number == 2);
    CHECK(std::string(e.what()).find("99") != std::string::npos);
  }
}

TEST_CASE("read mesh: count mismatch and bad dimension are parse errors") {
  TempDir dir;
  write_file(dir.file("m.node"),
             "3 2 0 0\n"
             "1 0 0\n"
             "2 1 0\n");
  write_file(dir.file("m.ele"), "0 3 0\n");
  CHECK_THROWS_AS(read_mesh(dir.file("m.node"), dir.file("m.ele")), ParseError);

  write_file(dir.file("d.node"),
             "1 5 0 0\n"
             "1 0 0 0 0 0\n");
  CHECK_THROWS_AS(read_mesh(dir.file("d.node"), dir.file("m.ele")), ParseError);

  CHECK_THROWS_AS(read_mesh(dir.file("missing.node"), dir.file("m.ele")), ParseError);
}

TEST_CASE("patch fixture: boundary polygon form") {
  TempDir dir;
  write_file(dir.file("square.json"),
             R"({"dimension": 2,
                 "boundary": [[1,-1],[1,1],[-1,1],[-1,-1]],
                 "center": [0.3, 0.2]})");
  const auto any = read_patch_fixture(dir.file("square.json"));
  const auto& patch = std::get<Patch<2>>(any);
  REQUIRE(patch.stencils.size() == 4);
  CHECK(patch.position[0] == Approx(0.3));
  CHECK(patch.neighbors.size() == 4);
}

TEST_CASE("patch fixture: stencil form with tetrahedra") {
  TempDir dir;
  write_file(dir.file("tet.json"),
             R"({"dimension": 3,
                 "stencils": [
                   {"kind": "tet", "fixed": [[1,0,0],[0,1,0],[0,0,1]]},
                   {"kind": "tet", "fixed": [[0,1,0],[1,0,0],[0,0,-1]]}
                 ],
                 "center": [0.2, 0.2, 0.0]})");
  const auto any = read_patch_fixture(dir.file("tet.json"));
  const auto& patch = std::get<Patch<3>>(any);
  REQUIRE(patch.stencils.size() == 2);
  CHECK(patch.neighbors.size() == 4);
}

TEST_CASE("patch fixture: malformed input is a parse error") {
  TempDir dir;
  write_file(dir.file("bad.json"), "{ not json");
  CHECK_THROWS_AS(read_patch_fixture(dir.file("bad.json")), ParseError);
  write_file(dir.file("empty.json"), R"({"dimension": 2})");
  CHECK_THROWS_AS(read_patch_fixture(dir.file("empty.json")), ParseError);
  write_file(dir.file("short.json"),
             R"({"dimension": 2, "stencils": [{"kind": "quad", "fixed": [[0,0],[1,0]]}]})");
  CHECK_THROWS_AS(read_patch_fixture(dir.file("short.json")), ParseError);
}

TEST_CASE("report serialization: sweep stats and quality entries") {
  SweepStats stats;
  stats.passes_run = 2;
  stats.vertices_visited = 10;
  stats.moves_accepted = 3;
  stats.objective_trace = {0.5, 0.25};
  stats.quality.push_back({"min-angle", 0.4, 0.7});
  const auto j = to_json(stats);
  CHECK(j["passes_run"] == 2);
  CHECK(j["quality"][0]["criterion"] == "min-angle");
  CHECK(j["quality"][0]["min_after"] == 0.7);

  std::vector<QualityEntry> report(1);
  report[0].criterion = "inradius";
  report[0].count = 2;
  report[0].min = 0.5;
  report[0].max = 1.0;
  report[0].mean = 0.75;
  const std::string csv = to_csv(report);
  CHECK(csv.find("criterion,count,min,max,mean") == 0);
  CHECK(csv.find("inradius,2,0.5,1,0.75") != std::string::npos);
}
