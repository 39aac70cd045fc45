#ifndef FMLBR_GEODESIC_HPP
#define FMLBR_GEODESIC_HPP

#include <vector>

#include "fmlbr/solver.hpp"

namespace fmlbr {

/// Piecewise linear minimal path: grid nodes x_i with small physical
/// correction offsets u_i; the polyline joins the points x_i + u_i. Field
/// values along the nodes decrease strictly down to a seed.
struct Path {
  std::vector<std::int64_t> nodes;
  std::vector<Vec3> offsets;  // u_i, physical; u_0 = 0
  std::vector<Vec3> points;   // position(x_i) + u_i
  double max_offset_norm = 0;
};

struct Direction {
  Vec3 v{};  // physical descent direction estimate at the node
  int k = 0;
  std::array<std::int64_t, 3> facet_nodes{};
  std::array<double, 3> weights{};
};

/// Recomputes the unfiltered update argmin at z from the converged field and
/// returns v(z) = sum_i alpha_i (z_i - z) with the facet vertices and
/// weights. Throws for seeds and unreached nodes.
Direction direction_at(const DistanceField& field, std::int64_t z,
                       const GridStencils& stencils, const MetricGrid& metric);

/// Offset-corrected descent through stencil facets, from a start node down
/// to a seed. Each step advances along v(x_i) to the closest facet vertex
/// (closed-form point-to-ray projection) and keeps the residual as the next
/// correction offset.
Path extract_path(const DistanceField& field, const GridStencils& stencils,
                  const MetricGrid& metric, std::int64_t start);

/// Piecewise-linear length under the metric: midpoint rule per segment with
/// the tensor interpolated at the segment midpoint.
double path_metric_length(const Path& path, const MetricGrid& metric);

}  // namespace fmlbr

#endif
