// Triangle-style .node/.ele mesh files, JSON patch fixtures, and JSON/CSV
// report serialization. Indexing base (0 or 1) is autodetected from the first
// index line; coordinates round-trip at 17 significant digits.
#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qsmooth/mesh.hpp"
#include "qsmooth/patch.hpp"

namespace qsmooth {

struct ParseError : std::runtime_error {
  ParseError(const std::string& path, int line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_number(line) {}
  int line_number;
};

using AnyMesh = std::variant<Mesh<2>, Mesh<3>>;

namespace detail {

struct LineReader {
  std::istream& in;
  std::string path;
  int line_number = 0;
  std::string current;

  // Next content line with comments ('#' to end of line) stripped.
  bool next(std::string& out) {
    while (std::getline(in, current)) {
      ++line_number;
      std::string body = current;
      if (auto pos = body.find('#'); pos != std::string::npos) body.erase(pos);
      std::istringstream probe(body);
      std::string tok;
      if (probe >> tok) {
        out = body;
        return true;
      }
    }
    return false;
  }
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Header comments carried by an element file (the writer emits "# kind: quad"
// to disambiguate planar four-node elements).
inline AnyMesh read_mesh(const std::string& node_path, const std::string& ele_path) {
  std::ifstream node_in(node_path);
  if (!node_in) throw ParseError(node_path, 0, "cannot open file");
  detail::LineReader nodes{node_in, node_path};

  std::string line;
  if (!nodes.next(line)) throw ParseError(node_path, nodes.line_number, "missing header");
  long nvert = 0;
  int dim = 0, nattr = 0, nmark = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> nvert >> dim)) throw ParseError(node_path, nodes.line_number, "bad node header");
    hs >> nattr >> nmark;
  }
  if (dim != 2 && dim != 3) throw ParseError(node_path, nodes.line_number, "dimension must be 2 or 3");

  std::vector<std::array<double, 3>> coords;
  std::vector<int> markers;
  int index_base = -1;
  for (long i = 0; i < nvert; ++i) {
    if (!nodes.next(line))
      throw ParseError(node_path, nodes.line_number, "vertex count mismatch: expected " +
                                                         std::to_string(nvert) + " vertices");
    std::istringstream vs(line);
    long idx;
    if (!(vs >> idx)) throw ParseError(node_path, nodes.line_number, "bad vertex line");
    if (index_base < 0) {
      if (idx != 0 && idx != 1)
        throw ParseError(node_path, nodes.line_number, "first vertex index must be 0 or 1");
      index_base = static_cast<int>(idx);
    }
    std::array<double, 3> p{};
    for (int j = 0; j < dim; ++j)
      if (!(vs >> p[static_cast<std::size_t>(j)]))
        throw ParseError(node_path, nodes.line_number, "missing coordinate");
    double skip;
    for (int j = 0; j < nattr; ++j) vs >> skip;
    int marker = 0;
    if (nmark > 0) vs >> marker;
    coords.push_back(p);
    markers.push_back(marker);
  }

  std::ifstream ele_in(ele_path);
  if (!ele_in) throw ParseError(ele_path, 0, "cannot open file");
  // Scan raw lines for a "# kind: quad" annotation before stripping comments.
  bool quad_hint = false;
  {
    std::ifstream probe(ele_path);
    std::string raw;
    while (std::getline(probe, raw))
      if (raw.find("# kind: quad") != std::string::npos) quad_hint = true;
  }
  detail::LineReader eles{ele_in, ele_path};
  if (!eles.next(line)) throw ParseError(ele_path, eles.line_number, "missing header");
  long nele = 0;
  int npe = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> nele >> npe)) throw ParseError(ele_path, eles.line_number, "bad element header");
  }
  if (npe != 3 && npe != 4) throw ParseError(ele_path, eles.line_number, "nodes per element must be 3 or 4");
  if (quad_hint && dim != 2) throw ParseError(ele_path, eles.line_number, "quad elements require dimension 2");

  ElementKind kind = ElementKind::triangle;
  if (npe == 4) kind = (dim == 2) ? ElementKind::quad : ElementKind::tetrahedron;
  if (npe == 3 && dim == 3)
    throw ParseError(ele_path, eles.line_number, "triangle elements require dimension 2");

  std::vector<Element> elements;
  for (long e = 0; e < nele; ++e) {
    if (!eles.next(line))
      throw ParseError(ele_path, eles.line_number, "element count mismatch: expected " +
                                                       std::to_string(nele) + " elements");
    std::istringstream es(line);
    long idx;
    if (!(es >> idx)) throw ParseError(ele_path, eles.line_number, "bad element line");
    Element el;
    el.kind = kind;
    for (int k = 0; k < npe; ++k) {
      long v;
      if (!(es >> v)) throw ParseError(ele_path, eles.line_number, "missing vertex index");
      v -= index_base;
      if (v < 0 || v >= nvert)
        throw ParseError(ele_path, eles.line_number,
                         "vertex index " + std::to_string(v + index_base) + " out of range");
      el.v[k] = static_cast<int>(v);
    }
    elements.push_back(el);
  }

  auto fill = [&]<int D>(Mesh<D>& mesh) {
    mesh.points.reserve(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
      Vec<D> p{};
      for (int j = 0; j < D; ++j) p[j] = coords[i][static_cast<std::size_t>(j)];
      mesh.points.push_back(p);
      mesh.flags.push_back({markers[i] == 0, markers[i]});
    }
    mesh.elements = elements;
    // Vertices on the topological boundary are never movable, markers or not.
    std::map<std::vector<int>, int> face_use;
    for (const Element& el : mesh.elements) {
      if constexpr (D == 2) {
        for (int i = 0; i < el.size(); ++i) {
          std::vector<int> edge = {el.v[i], el.v[(i + 1) % el.size()]};
          std::sort(edge.begin(), edge.end());
          ++face_use[edge];
        }
      } else {
        static constexpr int kFace[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
        for (const auto& f : kFace) {
          std::vector<int> face = {el.v[f[0]], el.v[f[1]], el.v[f[2]]};
          std::sort(face.begin(), face.end());
          ++face_use[face];
        }
      }
    }
    for (const auto& [face, uses] : face_use)
      if (uses == 1)
        for (int v : face) mesh.flags[static_cast<std::size_t>(v)].movable = false;
  };

  if (dim == 2) {
    Mesh<2> mesh;
    fill(mesh);
    return mesh;
  }
  Mesh<3> mesh;
  fill(mesh);
  return mesh;
}

template <int D>
void write_mesh(const Mesh<D>& mesh, const std::string& node_path, const std::string& ele_path) {
  std::ofstream node_out(node_path);
  if (!node_out) throw std::runtime_error("cannot write " + node_path);
  node_out << mesh.vertex_count() << ' ' << D << " 0 1\n";
  for (int i = 0; i < mesh.vertex_count(); ++i) {
    node_out << (i + 1);
    for (int j = 0; j < D; ++j) node_out << ' ' << detail::format_double(mesh.points[static_cast<std::size_t>(i)][j]);
    node_out << ' ' << mesh.flags[static_cast<std::size_t>(i)].boundary_marker << '\n';
  }

  std::ofstream ele_out(ele_path);
  if (!ele_out) throw std::runtime_error("cannot write " + ele_path);
  const bool quad = !mesh.elements.empty() && mesh.elements.front().kind == ElementKind::quad;
  if (quad) ele_out << "# kind: quad\n";
  const int npe = mesh.elements.empty() ? 3 : mesh.elements.front().size();
  ele_out << mesh.element_count() << ' ' << npe << " 0\n";
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Element& el = mesh.elements[static_cast<std::size_t>(e)];
    ele_out << (e + 1);
    for (int k = 0; k < el.size(); ++k) ele_out << ' ' << (el.v[k] + 1);
    ele_out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Patch fixtures

using AnyPatch = std::variant<Patch<2>, Patch<3>>;

// JSON schema:
//   { "dimension": 2,
//     "boundary": [[x,y], ...],            // ccw star polygon (triangle patches)
//     "stencils": [{"kind": "quad", "fixed": [[..],[..],[..]]}, ...],
//     "center": [x, y],                    // optional current position
//     "expected": {...} }                  // opaque block for test fixtures
inline AnyPatch read_patch_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  const int dim = doc.value("dimension", 2);
  if (dim != 2 && dim != 3) throw ParseError(path, 0, "dimension must be 2 or 3");

  auto parse_vec = [&]<int D>(const nlohmann::json& arr, Vec<D>& out) {
    if (!arr.is_array() || arr.size() != D) throw ParseError(path, 0, "bad coordinate tuple");
    for (int j = 0; j < D; ++j) out[j] = arr[static_cast<std::size_t>(j)].get<double>();
  };

  auto build = [&]<int D>() -> AnyPatch {
    std::vector<ElementStencil<D>> stencils;
    if (doc.contains("boundary")) {
      if constexpr (D == 2) {
        std::vector<Vec2> poly;
        for (const auto& item : doc["boundary"]) {
          Vec2 p;
          parse_vec.template operator()<2>(item, p);
          poly.push_back(p);
        }
        Vec2 center{};
        if (doc.contains("center"))
          parse_vec.template operator()<2>(doc["center"], center);
        else
          for (const auto& p : poly) center += p / static_cast<double>(poly.size());
        Patch<2> patch = make_star_patch(poly, center);
        return patch;
      } else {
        throw ParseError(path, 0, "boundary polygons are planar; use stencils for 3D patches");
      }
    }
    if (!doc.contains("stencils")) throw ParseError(path, 0, "fixture needs boundary or stencils");
    for (const auto& item : doc["stencils"]) {
      ElementStencil<D> st;
      const std::string kind = item.value("kind", D == 2 ? "triangle" : "tetrahedron");
      if (kind == "triangle")
        st.kind = ElementKind::triangle;
      else if (kind == "quad")
        st.kind = ElementKind::quad;
      else if (kind == "tetrahedron" || kind == "tet")
        st.kind = ElementKind::tetrahedron;
      else
        throw ParseError(path, 0, "unknown stencil kind " + kind);
      const auto& fixed = item["fixed"];
      const int expect = (st.kind == ElementKind::triangle) ? 2 : 3;
      if (static_cast<int>(fixed.size()) != expect)
        throw ParseError(path, 0, "stencil needs " + std::to_string(expect) + " fixed vertices");
      for (int k = 0; k < expect; ++k)
        parse_vec.template operator()<D>(fixed[static_cast<std::size_t>(k)], st.fixed[static_cast<std::size_t>(k)]);
      stencils.push_back(st);
    }
    Vec<D> center{};
    bool has_center = doc.contains("center");
    if (has_center) parse_vec.template operator()<D>(doc["center"], center);
    Patch<D> patch = make_patch<D>(std::move(stencils), center);
    if (!has_center) {
      auto cc = chebyshev_center(patch.domain);
      if (cc.feasible) patch.position = cc.center;
    }
    return patch;
  };

  if (dim == 2) return build.template operator()<2>();
  return build.template operator()<3>();
}

// ---------------------------------------------------------------------------
// Report serialization

inline nlohmann::json to_json(const SweepStats& stats) {
  nlohmann::json j;
  j["passes_run"] = stats.passes_run;
  j["vertices_visited"] = stats.vertices_visited;
  j["moves_accepted"] = stats.moves_accepted;
  j["objective_trace"] = stats.objective_trace;
  nlohmann::json q = nlohmann::json::array();
  for (const auto& entry : stats.quality)
    q.push_back({{"criterion", entry.name},
                 {"min_before", entry.min_before},
                 {"min_after", entry.min_after}});
  j["quality"] = q;
  return j;
}

inline nlohmann::json to_json(const std::vector<QualityEntry>& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& entry : report) {
    nlohmann::json j;
    j["criterion"] = entry.criterion;
    j["count"] = entry.count;
    j["min"] = entry.min;
    j["max"] = entry.max;
    j["mean"] = entry.mean;
    j["histogram"] = entry.histogram;
    arr.push_back(j);
  }
  return arr;
}

inline std::string to_csv(const std::vector<QualityEntry>& report) {
  std::string out = "criterion,count,min,max,mean\n";
  for (const auto& entry : report) {
    out += entry.criterion + ',' + std::to_string(entry.count) + ',' +
           detail::format_double(entry.min) + ',' + detail::format_double(entry.max) + ',' +
           detail::format_double(entry.mean) + '\n';
  }
  return out;
}

inline nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : report.violations) arr.push_back(v.message);
  return nlohmann::json{{"ok", report.ok()}, {"violations", arr}};
}

}  // namespace qsmooth
