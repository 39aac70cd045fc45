#ifndef FMLBR_BENCH_HPP
#define FMLBR_BENCH_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "fmlbr/cases.hpp"
#include "fmlbr/geodesic.hpp"
#include "fmlbr/solver.hpp"

namespace fmlbr {

struct BenchResult {
  std::string case_id;
  std::string solver_id;
  std::array<int, 3> dims{};
  double time_seconds = 0;
  double linf = 0;
  double l1 = 0;
  std::int64_t unreached = 0;
  std::int64_t heap_pushes = 0;
  std::int64_t heap_pops = 0;
};

struct ErrorNorms {
  double linf = 0;
  double l1 = 0;
  std::int64_t skipped = 0;  // nodes excluded (unreached in field or reference)
};

/// Compares a field against a reference solved on a finer grid over the same
/// box; the reference is evaluated at field nodes by multilinear
/// interpolation. Unreached nodes are excluded and counted.
ErrorNorms error_norms(const DistanceField& field, const MetricGrid& field_grid,
                       const DistanceField& reference, const MetricGrid& reference_grid);

struct RunCaseOptions {
  std::array<int, 3> dims{};       // zero: case default
  std::array<int, 3> ref_dims{};   // zero: 4x the dims
  std::string ref_solver = "fmlbr";
  double agsi_tol = 1e-8;
  bool snap_seed_value = true;     // seed value = local norm of the snap offset
};

std::vector<Seed> case_seeds(const CaseSpec& spec, const MetricGrid& grid,
                             bool snap_seed_value);

DistanceField run_solver(const std::string& solver_id, const MetricGrid& grid,
                         const std::vector<Seed>& seeds, double agsi_tol = 1e-8);

/// Solves the case with each listed solver and reports errors against the
/// reference field. FM-LBR timings include the stencil construction.
std::vector<BenchResult> run_case(const CaseSpec& spec, const std::vector<std::string>& solvers,
                                  const RunCaseOptions& options = {});

void write_results_csv(std::ostream& os, const std::vector<BenchResult>& results);
/// Table with errors multiplied by 100 for readability.
void print_results_table(std::ostream& os, const std::vector<BenchResult>& results);

/// Field file: text header "EIKFIELD 1 <d> <n1..nd> <min1 max1 .. mind maxd>"
/// then row-major little-endian IEEE float64 values, x fastest.
void write_field(const std::string& path, const DistanceField& field, const MetricGrid& grid);
struct LoadedField {
  int dim = 0;
  std::array<int, 3> dims{};
  Vec3 lo{}, hi{};
  std::vector<double> values;
};
LoadedField read_field(const std::string& path);

void write_path_csv(const std::string& path, const Path& p, int dim);

/// Binary PGM of the level bands of a 2d field: 255 where
/// frac(d / band) < 0.1, 0 elsewhere, 128 for unreached nodes.
void render_levels(const std::string& path, const DistanceField& field, double band);

}  // namespace fmlbr

#endif
