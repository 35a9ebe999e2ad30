// Command-line driver: smoothing sweeps, quality reports, single-patch
// placement, oracle cross-checks, and mesh validation over Triangle-style
// .node/.ele files and JSON patch fixtures.
//
// Exit codes: 0 success, 1 validation/parse failure, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsmooth/io.hpp"
#include "qsmooth/mesh.hpp"
#include "qsmooth/qcp.hpp"
#include "qsmooth/special.hpp"

namespace {

using namespace qsmooth;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string valid_criterion_names() {
  std::string names;
  for (const auto& row : all_criteria()) {
    if (!names.empty()) names += ", ";
    names += row.name;
  }
  return names;
}

// "name[:weight],name[:weight],..."
std::vector<Criterion> parse_criteria(const std::string& spec) {
  std::vector<Criterion> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = spec.find(',', pos);
    std::string item = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = (comma == std::string::npos) ? spec.size() + 1 : comma + 1;
    if (item.empty()) continue;
    double weight = 1.0;
    if (const std::size_t colon = item.find(':'); colon != std::string::npos) {
      try {
        weight = std::stod(item.substr(colon + 1));
      } catch (const std::exception&) {
        throw UsageError("bad weight in criterion '" + item + "'");
      }
      item.erase(colon);
    }
    const CriterionInfo* info = find_criterion(item);
    if (!info)
      throw UsageError("unknown criterion '" + item + "' (valid: " + valid_criterion_names() + ")");
    if (!(weight > 0.0)) throw UsageError("criterion weight must be positive");
    out.push_back(make_criterion(info->kind, weight));
  }
  if (out.empty()) throw UsageError("no criteria given");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <int D>
void check_criteria_dimension(const Mesh<D>&, std::span<const Criterion> criteria) {
  for (const auto& cr : criteria)
    if (cr.dimension != D)
      throw UsageError(std::string("criterion '") + std::string(criterion_info(cr.kind).name) +
                       "' does not apply to a " + std::to_string(D) + "D mesh");
}

int cmd_smooth(const std::string& node, const std::string& ele, const std::string& criteria_spec,
               int passes, double tol, const std::string& out_prefix, bool laplacian,
               bool unguarded, long seed) {
  AnyMesh any = read_mesh(node, ele);
  nlohmann::json stats_json;
  stats_json["seed"] = seed;

  auto run = [&]<int D>(Mesh<D>& mesh) {
    SweepStats stats;
    if (laplacian || unguarded) {
      LaplacianConfig config;
      config.passes = passes;
      config.guarded = !unguarded;
      stats = laplacian_smooth(mesh, config);
    } else {
      SmoothConfig config;
      config.criteria = parse_criteria(criteria_spec);
      check_criteria_dimension(mesh, config.criteria);
      config.passes = passes;
      config.tol = tol;
      stats = sweep(mesh, config);
    }
    write_mesh(mesh, out_prefix + ".node", out_prefix + ".ele");
    stats_json.update(to_json(stats));
  };
  std::visit([&](auto& mesh) { run(mesh); }, any);

  std::ofstream stats_out(out_prefix + ".stats.json");
  stats_out << stats_json.dump(2) << '\n';
  std::cout << stats_json.dump(2) << '\n';
  return 0;
}

int cmd_quality(const std::string& node, const std::string& ele, const std::string& criteria_spec,
                const std::string& format) {
  AnyMesh any = read_mesh(node, ele);
  const auto criteria = parse_criteria(criteria_spec);
  std::visit(
      [&]<int D>(const Mesh<D>& mesh) {
        check_criteria_dimension(mesh, criteria);
        const auto report = quality_report<D>(mesh, criteria);
        if (format == "csv")
          std::cout << to_csv(report);
        else
          std::cout << to_json(report).dump(2) << '\n';
      },
      any);
  return 0;
}

template <int D>
void print_placement(const Vec<D>& point, double objective) {
  std::cout << "point";
  for (int j = 0; j < D; ++j) std::cout << ' ' << fmt(point[j]);
  std::cout << "\nobjective " << fmt(objective) << '\n';
}

int cmd_place(const std::string& fixture, const std::string& criteria_spec, double tol) {
  AnyPatch any = read_patch_fixture(fixture);
  const auto criteria = parse_criteria(criteria_spec);
  std::visit(
      [&]<int D>(const Patch<D>& patch) {
        for (const auto& cr : criteria)
          if (cr.dimension != D)
            throw UsageError("criterion dimension does not match the patch fixture");
        SmoothConfig config;
        config.criteria = criteria;
        config.tol = tol;
        auto position = detail::optimal_position<D>(patch, config);
        if (!position) throw std::domain_error("patch domain is empty");
        const auto terms = make_terms<D>(patch, criteria);
        print_placement<D>(*position, patch_cost<D>(terms, *position));
      },
      any);
  return 0;
}

int cmd_oracle(const std::string& fixture, const std::string& criteria_spec, int levels) {
  AnyPatch any = read_patch_fixture(fixture);
  const auto criteria = parse_criteria(criteria_spec);
  std::visit(
      [&]<int D>(const Patch<D>& patch) {
        for (const auto& cr : criteria)
          if (cr.dimension != D)
            throw UsageError("criterion dimension does not match the patch fixture");
        const auto terms = make_terms<D>(patch, criteria);
        const auto costs = detail::weighted_costs<D>(std::span<const CostTerm<D>>(terms));
        auto r = grid_oracle_minimax<D>(patch.domain, costs, levels);
        if (r.status == SolveStatus::empty_domain) throw std::domain_error("patch domain is empty");
        print_placement<D>(r.optimum.x, r.optimum.t);
      },
      any);
  return 0;
}

int cmd_validate(const std::string& node, const std::string& ele) {
  AnyMesh any = read_mesh(node, ele);
  int rc = 0;
  std::visit(
      [&]<int D>(const Mesh<D>& mesh) {
        const auto report = validate(mesh);
        std::cout << to_json(report).dump(2) << '\n';
        rc = report.ok() ? 0 : 1;
      },
      any);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qsmooth: optimal vertex placement mesh smoothing"};
  app.require_subcommand(1);

  std::string node_path, ele_path, out_prefix = "smoothed", criteria_spec, fixture_path;
  std::string format = "json";
  int passes = 5, levels = 3;
  double tol = 1e-10;
  bool laplacian = false, unguarded = false;
  long seed = 0;

  auto* smooth = app.add_subcommand("smooth", "run smoothing sweeps and write the result");
  smooth->add_option("--node", node_path)->required();
  smooth->add_option("--ele", ele_path)->required();
  smooth->add_option("--criterion", criteria_spec, "name[:weight][,name[:weight]...]");
  smooth->add_option("--passes", passes);
  smooth->add_option("--tol", tol);
  smooth->add_option("--out", out_prefix);
  smooth->add_flag("--laplacian", laplacian, "guarded Laplacian baseline");
  smooth->add_flag("--unguarded-laplacian", unguarded, "raw Laplacian; may invalidate the mesh");
  smooth->add_option("--seed", seed);

  auto* quality = app.add_subcommand("quality", "per-criterion quality report");
  quality->add_option("--node", node_path)->required();
  quality->add_option("--ele", ele_path)->required();
  quality->add_option("--criterion", criteria_spec)->required();
  quality->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));

  auto* place = app.add_subcommand("place", "optimal placement for one patch fixture");
  place->add_option("--patch", fixture_path)->required();
  place->add_option("--criterion", criteria_spec)->required();
  place->add_option("--tol", tol);

  auto* oracle = app.add_subcommand("oracle", "grid-refinement oracle for one patch fixture");
  oracle->add_option("--patch", fixture_path)->required();
  oracle->add_option("--criterion", criteria_spec)->required();
  oracle->add_option("--levels", levels);

  auto* validate_cmd = app.add_subcommand("validate", "mesh validation report");
  validate_cmd->add_option("--node", node_path)->required();
  validate_cmd->add_option("--ele", ele_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (smooth->parsed()) {
      if (!laplacian && !unguarded && criteria_spec.empty())
        throw UsageError("smooth requires --criterion unless --laplacian is given");
      return cmd_smooth(node_path, ele_path, criteria_spec, passes, tol, out_prefix, laplacian,
                        unguarded, seed);
    }
    if (quality->parsed()) return cmd_quality(node_path, ele_path, criteria_spec, format);
    if (place->parsed()) return cmd_place(fixture_path, criteria_spec, tol);
    if (oracle->parsed()) return cmd_oracle(fixture_path, criteria_spec, levels);
    if (validate_cmd->parsed()) return cmd_validate(node_path, ele_path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
