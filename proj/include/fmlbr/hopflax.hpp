#ifndef FMLBR_HOPFLAX_HPP
#define FMLBR_HOPFLAX_HPP

#include <array>
#include <cstdint>
#include <span>

#include "fmlbr/grid.hpp"
#include "fmlbr/stencil.hpp"

namespace fmlbr {

/// Solution of the local causal quadratic on one facet: the update value,
/// the barycentric weights and the facet identity (simplex index plus the
/// subset of its vertices that carries positive weight).
struct FacetSolution {
  double value = 0;
  int k = 0;                          // number of vertices with weight
  std::array<double, 3> weights{};    // aligned with offsets[0..k)
  std::array<IVec3, 3> offsets{};     // integer vertex offsets of the facet
  int simplex = -1;                   // index within the node's stencil

  bool reached() const { return k > 0; }
};

/// Minimizes ||sum_i a_i v_i||_M + sum_i a_i delta_i over the unit simplex,
/// where gram[i][j] = v_i^T M v_j (SPD, k x k, k <= 3). The interior
/// stationary point solves the scalar quadratic ||d 1 - Delta||_{gram^-1} = 1;
/// when it has nonpositive weights or no admissible root the minimum is taken
/// over the proper sub-facets (exact by convexity).
struct FacetResult {
  double value = 0;
  std::uint8_t mask = 0;            // vertices carrying positive weight
  std::array<double, 3> weights{};  // aligned with the k input slots
};
FacetResult facet_solve(const double gram[3][3], const double* delta, int k);

struct UpdateFilter {
  const std::uint8_t* accepted = nullptr;  // per-node flags; null = unfiltered
  std::int64_t must_contain = -1;          // node that must lie on the facet
};

/// Hopf-Lax update at a node over stored per-node stencils. Facets whose
/// vertices carry infinite values are excluded; with a filter, only facets
/// made of accepted vertices and containing the given node are considered.
/// Returns an unreached solution (k = 0, value = +inf) when no facet
/// qualifies.
///
/// With causal = true, interior facet solutions are admitted only when the
/// update value exceeds every vertex value (the classical fast-marching
/// root selection). On meshes that satisfy the acuteness axiom the two
/// variants coincide; the solvers use the causal one.
FacetSolution stencil_update(std::span<const double> values, std::int64_t node,
                             const GridStencils& stencils, const MetricGrid& metric,
                             const UpdateFilter& filter = {}, bool causal = false);

/// Same update over a single mesh shared by every node (classical stencils,
/// AGSI ring); simplices reaching outside the grid are dropped.
FacetSolution stencil_update(std::span<const double> values, std::int64_t node,
                             const StencilMesh& mesh, const MetricGrid& metric,
                             const UpdateFilter& filter = {}, bool causal = false);

}  // namespace fmlbr

#endif
