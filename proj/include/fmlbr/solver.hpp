#ifndef FMLBR_SOLVER_HPP
#define FMLBR_SOLVER_HPP

#include <cstdint>
#include <vector>

#include "fmlbr/hopflax.hpp"
#include "fmlbr/stencil.hpp"

namespace fmlbr {

struct Seed {
  std::int64_t node = 0;
  double value = 0;
};

struct SolveStats {
  std::int64_t heap_pushes = 0;
  std::int64_t heap_pops = 0;
  std::int64_t stale_pops = 0;
  std::int64_t updates = 0;       // Hopf-Lax evaluations
  std::int64_t accepted = 0;
  std::int64_t unreached = 0;     // non-seed nodes left at +inf
  double wall_seconds = 0;
  double preprocess_seconds = 0;  // stencil construction (FM-LBR)
  bool monotone_acceptance = true;
};

/// Distance values plus solver bookkeeping. Values at seed nodes equal the
/// seed values; unreached nodes hold +inf.
struct DistanceField {
  int dim = 0;
  std::array<int, 3> dims{};
  std::vector<double> values;
  std::vector<Seed> seeds;
  std::vector<std::uint8_t> is_seed;
  std::vector<std::int32_t> accept_rank;  // acceptance order, -1 if unreached
  SolveStats stats;

  std::int64_t node_count() const { return std::int64_t(values.size()); }
  double max_finite() const;
};

enum class FixedStencil { FM4, FM8, FM6, FM26 };

/// Single-pass Dijkstra resolution with the reduced per-node stencils.
/// Accepted values are nondecreasing and the output is a fixed point of the
/// unfiltered update operator on every finite non-seed node.
DistanceField solve_fmlbr(const MetricGrid& metric, const std::vector<Seed>& seeds,
                          const GridStencils* prebuilt = nullptr);

/// Same Dijkstra loop with one of the classical fixed meshes. Runs for any
/// metric; no consistency guarantee beyond the mesh anisotropy bound.
DistanceField solve_fixed_stencil(const MetricGrid& metric, FixedStencil kind,
                                  const std::vector<Seed>& seeds);

/// Adaptive Gauss-Seidel iteration on the trivial grid triangulation ring,
/// driven by a priority queue; stops when no update decreases a value by
/// more than tol and the residual is below tol everywhere.
DistanceField solve_agsi(const MetricGrid& metric, const std::vector<Seed>& seeds,
                         double tol = 1e-8);

/// Max |Lambda(d, z) - d(z)| over finite non-seed nodes.
double fixed_point_residual(const DistanceField& field, const GridStencils& stencils,
                            const MetricGrid& metric);
double fixed_point_residual(const DistanceField& field, const StencilMesh& mesh,
                            const MetricGrid& metric);
/// Residual of the AGSI update operator over the ring stencil.
double agsi_residual(const DistanceField& field, const MetricGrid& metric);

/// The AGSI ring stencil: simplices of the trivial (Kuhn) grid triangulation
/// incident to a node, as offsets (6 triangles in 2d, 24 tetrahedra in 3d).
StencilMesh agsi_ring_mesh(int dim);

}  // namespace fmlbr

#endif
