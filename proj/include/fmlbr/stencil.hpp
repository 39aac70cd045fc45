#ifndef FMLBR_STENCIL_HPP
#define FMLBR_STENCIL_HPP

#include <cstdint>
#include <vector>

#include "fmlbr/grid.hpp"
#include "fmlbr/lbr.hpp"
#include "fmlbr/tensor.hpp"

namespace fmlbr {

/// Simplicial fan around the origin: each simplex is given by its d nonzero
/// integer vertex offsets, the origin vertex being implicit.
struct StencilMesh {
  int dim = 0;
  std::vector<std::array<IVec3, 3>> simplices;  // unused vertex rows zero

  std::vector<IVec3> vertex_set() const;  // distinct nonzero vertices, first occurrence order
};

/// Mesh built from an M-reduced basis: 2 segments (d=1), 6 triangles (d=2),
/// 24 tetrahedra (d=3, sign/permutation normalized by parity case).
StencilMesh build_reduced_mesh(const SpdTensor& M);

/// Product mesh of two lower-dimensional meshes on complementary axis sets
/// (block-diagonal metric composition).
StencilMesh compose_meshes(const StencilMesh& a, std::span<const int> axes_a,
                           const StencilMesh& b, std::span<const int> axes_b);

/// Axis-aligned mesh: product of the 1d two-segment mesh over all axes
/// (4 triangles in 2d, 8 tetrahedra in 3d).
StencilMesh axis_mesh(int dim);

enum class StencilKind { FM4, FM8, FM6, FM26 };
StencilMesh classical_mesh(StencilKind kind);
int stencil_kind_dim(StencilKind kind);

struct MeshValidation {
  bool covers = false;        // (a) union is a neighborhood of the origin
  bool unimodular = false;    // (b) lattice vertices, |det| = 1 per simplex
  bool acute = false;         // (c) pairwise M-scalar products >= 0
  int cover_samples = 0;
  int cover_failures = 0;
  int det_failures = 0;
  int acute_failures = 0;

  bool pass() const { return covers && unimodular && acute; }
};

/// Checks the three reduced-mesh axioms; (a) by sampling random unit
/// directions (boundary-grazing directions within 1e-9 are resampled).
MeshValidation validate_mesh(const SpdTensor& M, const StencilMesh& mesh,
                             int samples = 1024, unsigned rng_seed = 1234);

/// (gamma, kappa): gamma = min cosine over vertex pairs sharing a simplex,
/// kappa = sqrt((1+gamma)/(1-gamma)); +inf when gamma >= 1 (degenerate).
std::pair<double, double> mesh_anisotropy_bound(const StencilMesh& mesh);

/// Per-node clipped stencils plus the transposed adjacency.
/// Vertex offsets are stored as 16-bit integers; simplex vertex references
/// are 4-bit indices into the node's vertex list, packed into one uint16.
class GridStencils {
 public:
  int dim = 0;
  std::array<int, 3> dims{};
  std::vector<std::uint32_t> vert_start;     // n+1
  std::vector<std::int16_t> vert_offsets;    // dim entries per vertex
  std::vector<std::uint32_t> simplex_start;  // n+1
  std::vector<std::uint16_t> simplex_verts;  // packed vertex indices
  std::vector<std::uint32_t> rev_start;      // n+1
  std::vector<std::int32_t> rev_nodes;
  std::int64_t empty_nodes = 0;     // nodes whose clipped stencil is empty
  std::int64_t total_vertices = 0;  // sum of per-node vertex counts
  std::int64_t total_simplices = 0;
  int max_vertices_per_node = 0;

  int vertex_count(std::int64_t node) const {
    return int(vert_start[node + 1] - vert_start[node]);
  }
  int simplex_count(std::int64_t node) const {
    return int(simplex_start[node + 1] - simplex_start[node]);
  }
  IVec3 vertex_offset(std::int64_t node, int v) const {
    const std::int16_t* p = vert_offsets.data() + std::size_t(vert_start[node] + v) * dim;
    IVec3 o{};
    for (int a = 0; a < dim; ++a) o[a] = p[a];
    return o;
  }
  // vertex indices (into the node's vertex list) of simplex s
  std::array<int, 3> simplex(std::int64_t node, int s) const {
    const std::uint16_t packed = simplex_verts[simplex_start[node] + s];
    return {packed & 0xF, (packed >> 4) & 0xF, (packed >> 8) & 0xF};
  }
  std::span<const std::int32_t> reversed(std::int64_t node) const {
    return {rev_nodes.data() + rev_start[node], rev_nodes.data() + rev_start[node + 1]};
  }
};

/// FM-LBR preprocessing: per node, the mesh of the spacing-rescaled tensor
/// (axis mesh when the tensor is exactly diagonal), clipped to the grid, and
/// the reversed stencils by transposition.
GridStencils build_grid_stencils(const MetricGrid& metric);

}  // namespace fmlbr

#endif
