// Command line front end: eikonal solves, geodesic extraction, benchmark
// tables, basis reduction and stencil validation.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fmlbr/bench.hpp"
#include "fmlbr/cases.hpp"
#include "fmlbr/geodesic.hpp"
#include "fmlbr/lbr.hpp"
#include "fmlbr/solver.hpp"

namespace {

using namespace fmlbr;

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::istringstream is(csv);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> out;
  std::istringstream is(csv);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

SpdTensor tensor_from_entries(const std::vector<double>& e) {
  if (e.size() == 1) return SpdTensor(1, std::span<const double>(e.data(), 1));
  if (e.size() == 3) return SpdTensor::from_rows_2d(e[0], e[1], e[2]);
  if (e.size() == 6) return SpdTensor::from_rows_3d(e[0], e[1], e[2], e[3], e[4], e[5]);
  throw std::invalid_argument("expected 1, 3 or 6 tensor entries (upper triangle, row by row)");
}

struct CaseArgs {
  std::string case_name = "surface";
  double theta = 0;
  double kappa = 10;
  double angle = 0;
  int n = 0;
  std::string dims_csv;
};

CaseSpec resolve_case(const CaseArgs& a) {
  std::optional<SpdTensor> constant;
  if (a.case_name == "constant") {
    // eigenvalues (1, 1/kappa^2[, 1]), small axis rotated by angle
    const double lam = 1.0 / (a.kappa * a.kappa);
    const double c = std::cos(a.angle), s = std::sin(a.angle);
    constant = SpdTensor::from_eigen(2, {Vec3{c, s, 0}, Vec3{-s, c, 0}, Vec3{}}, {lam, 1.0, 0});
  }
  return make_case(a.case_name, a.theta, constant);
}

std::array<int, 3> resolve_dims(const CaseSpec& spec, const CaseArgs& a) {
  std::array<int, 3> dims = spec.default_dims;
  if (!a.dims_csv.empty()) {
    const std::vector<int> v = parse_ints(a.dims_csv);
    if (int(v.size()) != spec.dim) throw std::invalid_argument("--dims: wrong axis count");
    for (int i = 0; i < spec.dim; ++i) dims[i] = v[i];
  } else if (a.n > 0) {
    dims[0] = dims[1] = a.n;
    if (spec.dim == 3) dims[2] = int(std::lround(1.36 * a.n));
  }
  for (int i = spec.dim; i < 3; ++i) dims[i] = 1;
  return dims;
}

void add_case_options(CLI::App* cmd, CaseArgs& a) {
  cmd->add_option("--case", a.case_name,
                  "surface | surface-rotated | seismic | spiral2d | spiral3d | constant");
  cmd->add_option("--theta", a.theta, "rotation angle in radians (surface-rotated)");
  cmd->add_option("--kappa", a.kappa, "anisotropy ratio (constant case)");
  cmd->add_option("--angle", a.angle, "fast-axis angle in radians (constant case)");
  cmd->add_option("--n", a.n, "nodes per axis (3d cases scale the last axis)");
  cmd->add_option("--dims", a.dims_csv, "explicit dims, e.g. 200,200,272");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisotropic eikonal solver with lattice-basis-reduced stencils"};
  app.require_subcommand(1);

  // solve
  CaseArgs solve_args;
  std::string solve_solver = "fmlbr";
  double solve_tol = 1e-8;
  std::string solve_seed_node, solve_out, solve_pgm;
  double solve_band = 0.1;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve a case and write the field");
  add_case_options(solve_cmd, solve_args);
  solve_cmd->add_option("--solver", solve_solver, "fmlbr | fm4 | fm8 | fm6 | fm26 | agsi");
  solve_cmd->add_option("--tol", solve_tol, "AGSI stopping tolerance");
  solve_cmd->add_option("--seed-node", solve_seed_node, "seed node indices i,j[,k] (value 0)");
  solve_cmd->add_option("--out", solve_out, "output field file");
  solve_cmd->add_option("--pgm", solve_pgm, "level-band image output (2d)");
  solve_cmd->add_option("--band", solve_band, "level-band width for --pgm");

  // geodesic
  CaseArgs geo_args;
  std::string geo_solver = "fmlbr";
  std::string geo_start, geo_out;
  CLI::App* geo_cmd = app.add_subcommand("geodesic", "extract a minimal path");
  add_case_options(geo_cmd, geo_args);
  geo_cmd->add_option("--solver", geo_solver, "field solver (fmlbr recommended)");
  geo_cmd->add_option("--start", geo_start, "start point x,y[,z] (default: case specific)");
  geo_cmd->add_option("--out", geo_out, "output polyline CSV");

  // bench
  CaseArgs bench_args;
  std::vector<std::string> bench_solvers = {"fmlbr", "fm8", "agsi"};
  int bench_ref_n = 0;
  std::string bench_ref_solver = "fmlbr";
  double bench_tol = 1e-8;
  std::string bench_out;
  CLI::App* bench_cmd = app.add_subcommand("bench", "compare solvers against a reference");
  add_case_options(bench_cmd, bench_args);
  bench_cmd->add_option("--solver", bench_solvers, "solvers to run");
  bench_cmd->add_option("--ref-n", bench_ref_n, "reference nodes per axis (default 4x)");
  bench_cmd->add_option("--ref-solver", bench_ref_solver, "reference solver (fmlbr | agsi)");
  bench_cmd->add_option("--tol", bench_tol, "AGSI stopping tolerance");
  bench_cmd->add_option("--out", bench_out, "CSV output file");

  // reduce
  std::string reduce_entries;
  CLI::App* reduce_cmd = app.add_subcommand("reduce", "reduced basis of a tensor, as CSV");
  reduce_cmd->add_option("--entries", reduce_entries,
                         "upper-triangle entries, e.g. 1,0.9,1 or 6 values in 3d")
      ->required();

  // validate-stencil
  std::string validate_entries;
  int validate_samples = 1024;
  CLI::App* validate_cmd = app.add_subcommand("validate-stencil", "mesh axiom report for a tensor");
  validate_cmd->add_option("--entries", validate_entries, "upper-triangle entries")->required();
  validate_cmd->add_option("--samples", validate_samples, "cone-coverage samples");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) {
      const CaseSpec spec = resolve_case(solve_args);
      const std::array<int, 3> dims = resolve_dims(spec, solve_args);
      const MetricGrid grid = sample_metric(spec, dims);
      std::vector<Seed> seeds;
      if (!solve_seed_node.empty()) {
        const std::vector<int> c = parse_ints(solve_seed_node);
        if (int(c.size()) != spec.dim) throw std::invalid_argument("--seed-node: wrong axis count");
        IVec3 node{};
        for (int i = 0; i < spec.dim; ++i) node[i] = c[i];
        if (!grid.in_grid(node)) throw std::invalid_argument("--seed-node: outside the grid");
        seeds = {Seed{grid.index(node), 0.0}};
      } else {
        seeds = case_seeds(spec, grid, true);
      }
      const DistanceField field = run_solver(solve_solver, grid, seeds, solve_tol);
      std::cout << "solved " << case_name(spec.id) << " with " << solve_solver << " on "
                << dims[0] << 'x' << dims[1];
      if (spec.dim == 3) std::cout << 'x' << dims[2];
      std::cout << " in " << field.stats.wall_seconds << " s, max value " << field.max_finite()
                << ", unreached " << field.stats.unreached << '\n';
      if (!solve_out.empty()) write_field(solve_out, field, grid);
      if (!solve_pgm.empty()) render_levels(solve_pgm, field, solve_band);
      return 0;
    }

    if (*geo_cmd) {
      const CaseSpec spec = resolve_case(geo_args);
      const std::array<int, 3> dims = resolve_dims(spec, geo_args);
      const MetricGrid grid = sample_metric(spec, dims);
      const std::vector<Seed> seeds = case_seeds(spec, grid, true);
      if (geo_solver != "fmlbr")
        throw std::invalid_argument("geodesic extraction uses the fmlbr solver");
      const GridStencils stencils = build_grid_stencils(grid);
      const DistanceField field = solve_fmlbr(grid, seeds, &stencils);
      Vec3 start = spec.geodesic_start;
      if (!geo_start.empty()) {
        const std::vector<double> v = parse_doubles(geo_start);
        if (int(v.size()) != spec.dim) throw std::invalid_argument("--start: wrong axis count");
        for (int i = 0; i < spec.dim; ++i) start[i] = v[i];
      }
      const std::int64_t start_node = grid.index(grid.nearest_node(start));
      const Path path = extract_path(field, stencils, grid, start_node);
      const double len = path_metric_length(path, grid);
      std::cout << "path with " << path.points.size() << " points, metric length " << len
                << ", field value at start " << field.values[start_node] << ", max offset "
                << path.max_offset_norm << '\n';
      if (!geo_out.empty()) write_path_csv(geo_out, path, spec.dim);
      return 0;
    }

    if (*bench_cmd) {
      const CaseSpec spec = resolve_case(bench_args);
      RunCaseOptions options;
      options.dims = resolve_dims(spec, bench_args);
      if (bench_ref_n > 0) {
        options.ref_dims[0] = options.ref_dims[1] = bench_ref_n;
        if (spec.dim == 3) options.ref_dims[2] = int(std::lround(1.36 * bench_ref_n));
      }
      options.ref_solver = bench_ref_solver;
      options.agsi_tol = bench_tol;
      const std::vector<BenchResult> results = run_case(spec, bench_solvers, options);
      print_results_table(std::cout, results);
      if (!bench_out.empty()) {
        std::ofstream os(bench_out);
        write_results_csv(os, results);
      }
      return 0;
    }

    if (*reduce_cmd) {
      const SpdTensor M = tensor_from_entries(parse_doubles(reduce_entries));
      const LatticeBasis basis = reduce_basis(M);
      std::cout << "vector,components,norm\n";
      for (int i = 0; i < basis.dim; ++i) {
        std::cout << "u" << (i + 1) << ',';
        for (int a = 0; a < basis.dim; ++a)
          std::cout << basis.vectors[i][a] << (a + 1 < basis.dim ? ' ' : ',');
        std::cout << norm(M, basis.vectors[i], basis.dim) << '\n';
      }
      return 0;
    }

    if (*validate_cmd) {
      const SpdTensor M = tensor_from_entries(parse_doubles(validate_entries));
      const StencilMesh mesh = build_reduced_mesh(M);
      const MeshValidation report = validate_mesh(M, mesh, validate_samples);
      const auto [gamma, kappa_mesh] = mesh_anisotropy_bound(mesh);
      std::cout << "simplices: " << mesh.simplices.size()
                << ", vertices: " << mesh.vertex_set().size() << '\n';
      std::cout << "(a) coverage: " << (report.covers ? "pass" : "FAIL") << " ("
                << report.cover_failures << '/' << report.cover_samples << " bad samples)\n";
      std::cout << "(b) unimodular: " << (report.unimodular ? "pass" : "FAIL") << '\n';
      std::cout << "(c) acute: " << (report.acute ? "pass" : "FAIL") << '\n';
      std::cout << "gamma " << gamma << ", mesh anisotropy bound " << kappa_mesh << '\n';
      return report.pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
