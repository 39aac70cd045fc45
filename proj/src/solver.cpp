#include "fmlbr/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace fmlbr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct HeapEntry {
  double value;
  std::int64_t node;
  bool operator>(const HeapEntry& o) const {
    if (value != o.value) return value > o.value;
    return node > o.node;  // deterministic pops on equal keys
  }
};

using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>>;

DistanceField make_field(const MetricGrid& metric, const std::vector<Seed>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("solver: empty seed set");
  DistanceField f;
  f.dim = metric.dim();
  f.dims = metric.dims();
  f.values.assign(metric.node_count(), kInf);
  f.is_seed.assign(metric.node_count(), 0);
  f.accept_rank.assign(metric.node_count(), -1);
  f.seeds = seeds;
  for (const Seed& s : seeds) {
    if (s.node < 0 || s.node >= metric.node_count())
      throw std::invalid_argument("solver: seed node out of range");
    if (!(s.value >= 0) || !std::isfinite(s.value))
      throw std::invalid_argument("solver: seed value must be finite and nonnegative");
    f.values[s.node] = std::min(f.values[s.node], s.value);
    f.is_seed[s.node] = 1;
  }
  return f;
}

// Dijkstra loop shared by the FM-LBR and the fixed-stencil solvers. The
// neighbor enumeration and the filtered update dispatch on the source kind.
template <class Reversed, class Update>
void run_dijkstra(DistanceField& f, Reversed&& reversed_of, Update&& update) {
  MinHeap heap;
  std::vector<std::uint8_t> accepted(f.values.size(), 0);
  for (const Seed& s : f.seeds) {
    heap.push({f.values[s.node], s.node});
    ++f.stats.heap_pushes;
  }
  double last_accepted = -kInf;
  while (!heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    ++f.stats.heap_pops;
    if (accepted[top.node] || top.value != f.values[top.node]) {
      ++f.stats.stale_pops;
      continue;
    }
    accepted[top.node] = 1;
    f.accept_rank[top.node] = std::int32_t(f.stats.accepted++);
    if (top.value < last_accepted) f.stats.monotone_acceptance = false;
    last_accepted = top.value;

    reversed_of(top.node, [&](std::int64_t x) {
      if (accepted[x] || f.is_seed[x]) return;
      ++f.stats.updates;
      const double val = update(x, accepted.data(), top.node);
      if (val < f.values[x]) {
        f.values[x] = val;
        heap.push({val, x});
        ++f.stats.heap_pushes;
      }
    });
  }
  for (std::int64_t i = 0; i < f.node_count(); ++i)
    if (!std::isfinite(f.values[i])) ++f.stats.unreached;
}

StencilMesh fixed_mesh(FixedStencil kind) {
  switch (kind) {
    case FixedStencil::FM4:
      return classical_mesh(StencilKind::FM4);
    case FixedStencil::FM8:
      return classical_mesh(StencilKind::FM8);
    case FixedStencil::FM6:
      return classical_mesh(StencilKind::FM6);
    default:
      return classical_mesh(StencilKind::FM26);
  }
}

}  // namespace

double DistanceField::max_finite() const {
  double m = 0;
  for (double v : values)
    if (std::isfinite(v)) m = std::max(m, v);
  return m;
}

DistanceField solve_fmlbr(const MetricGrid& metric, const std::vector<Seed>& seeds,
                          const GridStencils* prebuilt) {
  const auto t0 = Clock::now();
  GridStencils local;
  const GridStencils* stencils = prebuilt;
  if (!stencils) {
    local = build_grid_stencils(metric);
    stencils = &local;
  }
  const double t_prep = seconds_since(t0);

  DistanceField f = make_field(metric, seeds);
  f.stats.preprocess_seconds = t_prep;
  run_dijkstra(
      f,
      [&](std::int64_t y, auto&& visit) {
        for (std::int32_t x : stencils->reversed(y)) visit(x);
      },
      [&](std::int64_t x, const std::uint8_t* accepted, std::int64_t y) {
        UpdateFilter filter{accepted, y};
        return stencil_update(f.values, x, *stencils, metric, filter, true).value;
      });
  f.stats.wall_seconds = seconds_since(t0);
  return f;
}

DistanceField solve_fixed_stencil(const MetricGrid& metric, FixedStencil kind,
                                  const std::vector<Seed>& seeds) {
  const int d = metric.dim();
  const StencilMesh mesh = fixed_mesh(kind);
  if (mesh.dim != d) throw std::invalid_argument("solve_fixed_stencil: stencil dimension mismatch");

  const auto t0 = Clock::now();
  const std::vector<IVec3> verts = mesh.vertex_set();  // point-symmetric
  DistanceField f = make_field(metric, seeds);
  run_dijkstra(
      f,
      [&](std::int64_t y, auto&& visit) {
        const IVec3 c = metric.coords(y);
        for (const IVec3& v : verts) {
          IVec3 pos{};
          for (int a = 0; a < d; ++a) pos[a] = c[a] + v[a];
          if (metric.in_grid(pos)) visit(metric.index(pos));
        }
      },
      [&](std::int64_t x, const std::uint8_t* accepted, std::int64_t y) {
        UpdateFilter filter{accepted, y};
        return stencil_update(f.values, x, mesh, metric, filter, true).value;
      });
  f.stats.wall_seconds = seconds_since(t0);
  return f;
}

StencilMesh agsi_ring_mesh(int dim) {
  // simplices of the Kuhn (sorted-coordinate) triangulation incident to a
  // node, expressed as offsets: 6 triangles in 2d, 24 tetrahedra in 3d
  StencilMesh out;
  out.dim = dim;
  if (dim == 1) return axis_mesh(1);
  constexpr int kPerm2[2][2] = {{0, 1}, {1, 0}};
  constexpr int kPerm3[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  const int ncells = 1 << dim;
  const int nperm = (dim == 2) ? 2 : 6;
  for (int cell = 0; cell < ncells; ++cell) {
    IVec3 base{};  // lower corner of an incident cell, relative to the node
    for (int a = 0; a < dim; ++a) base[a] = (cell & (1 << a)) ? -1 : 0;
    for (int p = 0; p < nperm; ++p) {
      std::array<IVec3, 4> chain{};
      chain[0] = base;
      for (int i = 0; i < dim; ++i) {
        chain[i + 1] = chain[i];
        const int axis = (dim == 2) ? kPerm2[p][i] : kPerm3[p][i];
        chain[i + 1][axis] += 1;
      }
      int zero_at = -1;
      for (int i = 0; i <= dim; ++i)
        if (chain[i] == IVec3{0, 0, 0}) zero_at = i;
      if (zero_at < 0) continue;
      std::array<IVec3, 3> simp{};
      int k = 0;
      for (int i = 0; i <= dim; ++i)
        if (i != zero_at) simp[k++] = chain[i];
      bool dup = false;
      for (const auto& t : out.simplices) {
        bool same = true;
        for (int i = 0; i < dim && same; ++i) {
          bool found = false;
          for (int j = 0; j < dim && !found; ++j) found = (t[j] == simp[i]);
          same = found;
        }
        if (same) dup = true;
      }
      if (!dup) out.simplices.push_back(simp);
    }
  }
  return out;
}

DistanceField solve_agsi(const MetricGrid& metric, const std::vector<Seed>& seeds, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("solve_agsi: tol must be positive");
  const int d = metric.dim();
  const StencilMesh ring = agsi_ring_mesh(d);
  const std::vector<IVec3> verts = ring.vertex_set();

  const auto t0 = Clock::now();
  DistanceField f = make_field(metric, seeds);
  const std::int64_t n = f.node_count();
  const std::int64_t update_cap = 1000 * n;

  // queue of nodes whose value just decreased, popped by current value;
  // popping a node relaxes the neighbors whose stencil contains it
  std::vector<double> pending(n, kInf);
  MinHeap heap;
  auto enqueue = [&](std::int64_t node, double priority) {
    if (priority >= pending[node]) return;
    pending[node] = priority;
    heap.push({priority, node});
    ++f.stats.heap_pushes;
  };
  // corrections below the working threshold are not propagated immediately;
  // the threshold tightens round by round down to tol, and each round ends
  // with a residual sweep that requeues what the previous round postponed.
  // This caps the length of small-correction cascades without changing the
  // fixed point: the final rounds run at the requested tolerance.
  double threshold = std::max(tol, 1e-3);
  auto relax = [&](std::int64_t y) {
    if (f.is_seed[y]) return;
    ++f.stats.updates;
    const double val = stencil_update(f.values, y, ring, metric).value;
    if (val < f.values[y]) {
      const bool significant = f.values[y] - val > threshold;
      f.values[y] = val;
      if (significant) enqueue(y, val);
    }
  };
  for (const Seed& s : f.seeds) enqueue(s.node, f.values[s.node]);

  while (true) {
    while (!heap.empty()) {
      const HeapEntry top = heap.top();
      heap.pop();
      ++f.stats.heap_pops;
      if (top.value > pending[top.node]) {
        ++f.stats.stale_pops;
        continue;
      }
      pending[top.node] = kInf;
      if (f.stats.updates > update_cap)
        throw std::runtime_error("solve_agsi: update cap exceeded (no convergence)");
      const IVec3 c = metric.coords(top.node);
      for (const IVec3& v : verts) {
        IVec3 pos{};
        for (int a = 0; a < d; ++a) pos[a] = c[a] + v[a];
        if (metric.in_grid(pos)) relax(metric.index(pos));
      }
    }
    // sweep the residual at the working threshold, requeue what is left,
    // then tighten; exit once the requested tolerance holds everywhere
    bool clean = true;
    for (std::int64_t z = 0; z < n; ++z) {
      if (f.is_seed[z] || !std::isfinite(f.values[z])) continue;
      const double val = stencil_update(f.values, z, ring, metric).value;
      if (std::abs(val - f.values[z]) > threshold) {
        f.values[z] = std::min(f.values[z], val);
        enqueue(z, f.values[z]);
        clean = false;
      }
    }
    if (clean) {
      if (threshold <= tol) break;
      threshold = std::max(tol, threshold * 1e-2);
    }
  }
  for (std::int64_t i = 0; i < n; ++i)
    if (!std::isfinite(f.values[i])) ++f.stats.unreached;
  f.stats.wall_seconds = seconds_since(t0);
  return f;
}

double fixed_point_residual(const DistanceField& field, const GridStencils& stencils,
                            const MetricGrid& metric) {
  double worst = 0;
  for (std::int64_t z = 0; z < field.node_count(); ++z) {
    if (field.is_seed[z] || !std::isfinite(field.values[z])) continue;
    const double val = stencil_update(field.values, z, stencils, metric).value;
    worst = std::max(worst, std::abs(val - field.values[z]));
  }
  return worst;
}

double fixed_point_residual(const DistanceField& field, const StencilMesh& mesh,
                            const MetricGrid& metric) {
  double worst = 0;
  for (std::int64_t z = 0; z < field.node_count(); ++z) {
    if (field.is_seed[z] || !std::isfinite(field.values[z])) continue;
    const double val = stencil_update(field.values, z, mesh, metric).value;
    worst = std::max(worst, std::abs(val - field.values[z]));
  }
  return worst;
}

double agsi_residual(const DistanceField& field, const MetricGrid& metric) {
  return fixed_point_residual(field, agsi_ring_mesh(metric.dim()), metric);
}

}  // namespace fmlbr
