#include "fmlbr/bench.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fmlbr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// multilinear interpolation of a reference field at a physical point;
// returns +inf when an interpolation corner is unreached
double interp_field(const DistanceField& ref, const MetricGrid& grid, const Vec3& p) {
  const int d = grid.dim();
  IVec3 base{};
  Vec3 frac{};
  for (int a = 0; a < d; ++a) {
    double t = (p[a] - grid.lower()[a]) / grid.spacing()[a];
    t = std::clamp(t, 0.0, double(grid.dims()[a] - 1));
    int i = int(std::floor(t));
    i = std::min(i, grid.dims()[a] - 2);
    base[a] = i;
    frac[a] = t - i;
  }
  double acc = 0;
  for (int c = 0; c < (1 << d); ++c) {
    double w = 1;
    IVec3 node = base;
    for (int a = 0; a < d; ++a) {
      if (c & (1 << a)) {
        node[a] += 1;
        w *= frac[a];
      } else {
        w *= 1 - frac[a];
      }
    }
    if (w == 0) continue;
    const double v = ref.values[grid.index(node)];
    if (!std::isfinite(v)) return kInf;
    acc += w * v;
  }
  return acc;
}

}  // namespace

ErrorNorms error_norms(const DistanceField& field, const MetricGrid& field_grid,
                       const DistanceField& reference, const MetricGrid& reference_grid) {
  if (field_grid.dim() != reference_grid.dim())
    throw std::invalid_argument("error_norms: dimension mismatch");
  for (int a = 0; a < field_grid.dim(); ++a) {
    if (std::abs(field_grid.lower()[a] - reference_grid.lower()[a]) > 1e-12 ||
        std::abs(field_grid.upper()[a] - reference_grid.upper()[a]) > 1e-12)
      throw std::invalid_argument("error_norms: domain mismatch");
    if (reference_grid.dims()[a] < field_grid.dims()[a])
      throw std::invalid_argument("error_norms: reference resolution below field resolution");
  }
  ErrorNorms out;
  double sum = 0;
  std::int64_t counted = 0;
  for (std::int64_t i = 0; i < field.node_count(); ++i) {
    const double v = field.values[i];
    if (!std::isfinite(v)) {
      ++out.skipped;
      continue;
    }
    const double r = interp_field(reference, reference_grid, field_grid.position(field_grid.coords(i)));
    if (!std::isfinite(r)) {
      ++out.skipped;
      continue;
    }
    const double e = std::abs(v - r);
    out.linf = std::max(out.linf, e);
    sum += e;
    ++counted;
  }
  out.l1 = counted ? sum / double(counted) : 0.0;
  return out;
}

std::vector<Seed> case_seeds(const CaseSpec& spec, const MetricGrid& grid, bool snap_seed_value) {
  const IVec3 node = grid.nearest_node(spec.seed_point);
  Seed s;
  s.node = grid.index(node);
  s.value = 0;
  if (snap_seed_value) {
    // anchor the source at the continuous point: charge the snap offset at
    // the local norm so runs at different resolutions share one source
    const Vec3 pos = grid.position(node);
    Vec3 off{};
    for (int a = 0; a < grid.dim(); ++a) off[a] = pos[a] - spec.seed_point[a];
    s.value = norm(case_metric(spec, spec.seed_point), off, grid.dim());
  }
  return {s};
}

DistanceField run_solver(const std::string& solver_id, const MetricGrid& grid,
                         const std::vector<Seed>& seeds, double agsi_tol) {
  if (solver_id == "fmlbr") return solve_fmlbr(grid, seeds);
  if (solver_id == "fm4") return solve_fixed_stencil(grid, FixedStencil::FM4, seeds);
  if (solver_id == "fm8") return solve_fixed_stencil(grid, FixedStencil::FM8, seeds);
  if (solver_id == "fm6") return solve_fixed_stencil(grid, FixedStencil::FM6, seeds);
  if (solver_id == "fm26") return solve_fixed_stencil(grid, FixedStencil::FM26, seeds);
  if (solver_id == "agsi") return solve_agsi(grid, seeds, agsi_tol);
  throw std::invalid_argument("unknown solver: " + solver_id);
}

std::vector<BenchResult> run_case(const CaseSpec& spec, const std::vector<std::string>& solvers,
                                  const RunCaseOptions& options) {
  std::array<int, 3> dims = options.dims;
  if (dims[0] == 0) dims = spec.default_dims;
  std::array<int, 3> ref_dims = options.ref_dims;
  if (ref_dims[0] == 0)
    for (int a = 0; a < spec.dim; ++a) ref_dims[a] = 4 * dims[a];
  for (int a = spec.dim; a < 3; ++a) ref_dims[a] = 1;

  const MetricGrid ref_grid = sample_metric(spec, ref_dims);
  const DistanceField reference =
      run_solver(options.ref_solver, ref_grid, case_seeds(spec, ref_grid, options.snap_seed_value),
                 options.agsi_tol);

  const MetricGrid grid = sample_metric(spec, dims);
  const std::vector<Seed> seeds = case_seeds(spec, grid, options.snap_seed_value);

  std::vector<BenchResult> out;
  for (const std::string& solver : solvers) {
    const DistanceField field = run_solver(solver, grid, seeds, options.agsi_tol);
    const ErrorNorms err = error_norms(field, grid, reference, ref_grid);
    BenchResult r;
    r.case_id = case_name(spec.id);
    r.solver_id = solver;
    r.dims = dims;
    r.time_seconds = field.stats.wall_seconds;
    r.linf = err.linf;
    r.l1 = err.l1;
    r.unreached = field.stats.unreached;
    r.heap_pushes = field.stats.heap_pushes;
    r.heap_pops = field.stats.heap_pops;
    out.push_back(r);
  }
  return out;
}

void write_results_csv(std::ostream& os, const std::vector<BenchResult>& results) {
  os << "case,solver,nx,ny,nz,time_s,linf,l1,unreached\n";
  for (const auto& r : results) {
    os << r.case_id << ',' << r.solver_id << ',' << r.dims[0] << ',' << r.dims[1] << ','
       << (r.dims[2] > 0 ? r.dims[2] : 1) << ',' << std::setprecision(6) << r.time_seconds << ','
       << std::setprecision(12) << r.linf << ',' << r.l1 << ',' << r.unreached << '\n';
  }
}

void print_results_table(std::ostream& os, const std::vector<BenchResult>& results) {
  os << "case              solver   time(s)    Linf*100     L1*100  unreached\n";
  for (const auto& r : results) {
    os << std::left << std::setw(18) << r.case_id << std::setw(9) << r.solver_id << std::right
       << std::fixed << std::setprecision(3) << std::setw(8) << r.time_seconds
       << std::setprecision(4) << std::setw(12) << 100.0 * r.linf << std::setw(11)
       << 100.0 * r.l1 << std::setw(11) << r.unreached << '\n';
    os.unsetf(std::ios::fixed);
  }
}

void write_field(const std::string& path, const DistanceField& field, const MetricGrid& grid) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_field: cannot open " + path);
  std::ostringstream header;
  header << "EIKFIELD 1 " << grid.dim();
  for (int a = 0; a < grid.dim(); ++a) header << ' ' << grid.dims()[a];
  header << std::setprecision(17);
  for (int a = 0; a < grid.dim(); ++a)
    header << ' ' << grid.lower()[a] << ' ' << grid.upper()[a];
  header << '\n';
  os << header.str();
  static_assert(std::endian::native == std::endian::little, "field files are little-endian");
  os.write(reinterpret_cast<const char*>(field.values.data()),
           std::streamsize(field.values.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write_field: write failed for " + path);
}

LoadedField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_field: cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_field: missing header in " + path);
  std::istringstream hs(line);
  std::string magic;
  int version = 0;
  LoadedField out;
  hs >> magic >> version >> out.dim;
  if (magic != "EIKFIELD" || version != 1 || out.dim < 1 || out.dim > 3)
    throw std::runtime_error("read_field: bad header in " + path);
  std::int64_t n = 1;
  for (int a = 0; a < out.dim; ++a) {
    hs >> out.dims[a];
    n *= out.dims[a];
  }
  for (int a = 0; a < out.dim; ++a) hs >> out.lo[a] >> out.hi[a];
  if (!hs || n <= 0) throw std::runtime_error("read_field: bad header in " + path);
  out.values.resize(n);
  is.read(reinterpret_cast<char*>(out.values.data()), std::streamsize(n * sizeof(double)));
  if (is.gcount() != std::streamsize(n * sizeof(double)))
    throw std::runtime_error("read_field: payload size does not match header in " + path);
  char extra;
  if (is.read(&extra, 1))
    throw std::runtime_error("read_field: trailing bytes after payload in " + path);
  return out;
}

void write_path_csv(const std::string& path, const Path& p, int dim) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_path_csv: cannot open " + path);
  os << (dim == 3 ? "x,y,z\n" : "x,y\n");
  os << std::setprecision(17);
  for (const Vec3& pt : p.points) {
    os << pt[0] << ',' << pt[1];
    if (dim == 3) os << ',' << pt[2];
    os << '\n';
  }
}

void render_levels(const std::string& path, const DistanceField& field, double band) {
  if (field.dim != 2) throw std::invalid_argument("render_levels: 2d fields only");
  if (!(band > 0)) throw std::invalid_argument("render_levels: band width must be positive");
  const int nx = field.dims[0], ny = field.dims[1];
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("render_levels: cannot open " + path);
  os << "P5\n" << nx << ' ' << ny << "\n255\n";
  std::vector<unsigned char> row(nx);
  for (int y = ny - 1; y >= 0; --y) {  // image rows top to bottom
    for (int x = 0; x < nx; ++x) {
      const double v = field.values[std::int64_t(y) * nx + x];
      if (!std::isfinite(v)) {
        row[x] = 128;
      } else {
        const double frac = v / band - std::floor(v / band);
        row[x] = frac < 0.1 ? 255 : 0;
      }
    }
    os.write(reinterpret_cast<const char*>(row.data()), nx);
  }
  if (!os) throw std::runtime_error("render_levels: write failed for " + path);
}

}  // namespace fmlbr
