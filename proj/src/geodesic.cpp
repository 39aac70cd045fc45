#include "fmlbr/geodesic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fmlbr {

Direction direction_at(const DistanceField& field, std::int64_t z,
                       const GridStencils& stencils, const MetricGrid& metric) {
  if (field.is_seed[z]) throw std::invalid_argument("direction_at: node is a seed");
  if (!std::isfinite(field.values[z]))
    throw std::invalid_argument("direction_at: node was not reached");
  const FacetSolution sol = stencil_update(field.values, z, stencils, metric);
  if (!sol.reached()) throw std::runtime_error("direction_at: no admissible facet");

  const int d = metric.dim();
  const IVec3 c = metric.coords(z);
  Direction dir;
  dir.k = sol.k;
  for (int i = 0; i < sol.k; ++i) {
    IVec3 pos{};
    for (int a = 0; a < d; ++a) pos[a] = c[a] + sol.offsets[i][a];
    dir.facet_nodes[i] = metric.index(pos);
    dir.weights[i] = sol.weights[i];
    for (int a = 0; a < d; ++a) dir.v[a] += sol.weights[i] * sol.offsets[i][a] * metric.spacing()[a];
  }
  if (euclid_norm(dir.v, d) == 0.0)
    throw std::runtime_error("direction_at: degenerate zero direction");
  return dir;
}

Path extract_path(const DistanceField& field, const GridStencils& stencils,
                  const MetricGrid& metric, std::int64_t start) {
  if (!std::isfinite(field.values[start]))
    throw std::invalid_argument("extract_path: start node was not reached");
  const int d = metric.dim();

  Path path;
  std::int64_t x = start;
  Vec3 u{};
  path.nodes.push_back(x);
  path.offsets.push_back(u);
  path.points.push_back(metric.position(metric.coords(x)));

  const std::int64_t step_cap = field.node_count();
  std::int64_t steps = 0;
  while (!field.is_seed[x]) {
    if (++steps > step_cap) throw std::runtime_error("extract_path: step limit exceeded");
    const Direction dir = direction_at(field, x, stencils, metric);

    Vec3 p{};
    const Vec3 xpos = metric.position(metric.coords(x));
    for (int a = 0; a < d; ++a) p[a] = xpos[a] + u[a];
    const double vv = dot(dir.v, dir.v, d);

    // best (lambda, j): advance along v, project onto the ray, score the
    // residual to each facet vertex
    int best_j = -1;
    double best_score = std::numeric_limits<double>::infinity();
    double best_lambda = 0;
    for (int j = 0; j < dir.k; ++j) {
      const Vec3 q = metric.position(metric.coords(dir.facet_nodes[j]));
      Vec3 pq{};
      for (int a = 0; a < d; ++a) pq[a] = q[a] - p[a];
      const double lambda = std::max(0.0, dot(pq, dir.v, d) / vv);
      double score = 0;
      for (int a = 0; a < d; ++a) {
        const double r = p[a] + lambda * dir.v[a] - q[a];
        score += r * r;
      }
      if (score < best_score) {
        best_score = score;
        best_j = j;
        best_lambda = lambda;
      }
    }

    const std::int64_t next = dir.facet_nodes[best_j];
    if (!(field.values[next] < field.values[x]))
      throw std::runtime_error("extract_path: descent stalled (no strict decrease)");
    const Vec3 q = metric.position(metric.coords(next));
    for (int a = 0; a < d; ++a) u[a] = p[a] + best_lambda * dir.v[a] - q[a];
    x = next;
    path.nodes.push_back(x);
    path.offsets.push_back(u);
    Vec3 pt{};
    for (int a = 0; a < d; ++a) pt[a] = q[a] + u[a];
    path.points.push_back(pt);
    path.max_offset_norm = std::max(path.max_offset_norm, euclid_norm(u, d));
  }
  return path;
}

double path_metric_length(const Path& path, const MetricGrid& metric) {
  if (path.points.empty()) throw std::invalid_argument("path_metric_length: empty path");
  const int d = metric.dim();
  double length = 0;
  for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
    const Vec3& a = path.points[i];
    const Vec3& b = path.points[i + 1];
    Vec3 mid{}, seg{};
    for (int t = 0; t < d; ++t) {
      mid[t] = 0.5 * (a[t] + b[t]);
      seg[t] = b[t] - a[t];
    }
    const SpdTensor M = metric.interpolated_tensor(mid);
    length += norm(M, seg, d);
  }
  return length;
}

}  // namespace fmlbr
