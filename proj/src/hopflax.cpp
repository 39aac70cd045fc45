#include "fmlbr/hopflax.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fmlbr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDiscClamp = 1e-14;

// interior stationary point on the sub-facet selected by mask; returns false
// when the root is inadmissible or some weight is nonpositive
bool interior_solve(const double gram[3][3], const double* delta, int k, std::uint8_t mask,
                    bool causal, FacetResult& out) {
  int idx[3];
  int kk = 0;
  for (int i = 0; i < k; ++i)
    if (mask & (1 << i)) idx[kk++] = i;

  if (kk == 1) {
    const int i = idx[0];
    out.value = delta[i] + std::sqrt(gram[i][i]);
    out.mask = mask;
    out.weights = {};
    out.weights[i] = 1.0;
    return true;
  }

  double G[3][3] = {};
  for (int a = 0; a < kk; ++a)
    for (int b = 0; b < kk; ++b) G[a][b] = gram[idx[a]][idx[b]];

  double Q[3][3];  // G^-1
  if (kk == 2) {
    const double det = G[0][0] * G[1][1] - G[0][1] * G[1][0];
    if (!(det > 0)) throw std::invalid_argument("facet_solve: gram matrix not positive definite");
    Q[0][0] = G[1][1] / det;
    Q[0][1] = Q[1][0] = -G[0][1] / det;
    Q[1][1] = G[0][0] / det;
  } else {
    const double c00 = G[1][1] * G[2][2] - G[1][2] * G[2][1];
    const double c01 = G[1][2] * G[2][0] - G[1][0] * G[2][2];
    const double c02 = G[1][0] * G[2][1] - G[1][1] * G[2][0];
    const double det = G[0][0] * c00 + G[0][1] * c01 + G[0][2] * c02;
    if (!(det > 0)) throw std::invalid_argument("facet_solve: gram matrix not positive definite");
    Q[0][0] = c00 / det;
    Q[0][1] = Q[1][0] = c01 / det;
    Q[0][2] = Q[2][0] = c02 / det;
    Q[1][1] = (G[0][0] * G[2][2] - G[0][2] * G[2][0]) / det;
    Q[1][2] = Q[2][1] = (G[0][2] * G[1][0] - G[0][0] * G[1][2]) / det;
    Q[2][2] = (G[0][0] * G[1][1] - G[0][1] * G[1][0]) / det;
  }

  // shifted variable t = value - max(delta) for conditioning
  double dmax = -kInf;
  for (int a = 0; a < kk; ++a) dmax = std::max(dmax, delta[idx[a]]);
  double dq[3];
  for (int a = 0; a < kk; ++a) dq[a] = delta[idx[a]] - dmax;

  double a_sum = 0, b_sum = 0, c_sum = 0;
  for (int a = 0; a < kk; ++a)
    for (int b = 0; b < kk; ++b) {
      a_sum += Q[a][b];
      b_sum += Q[a][b] * dq[b];
      c_sum += dq[a] * Q[a][b] * dq[b];
    }
  double disc = b_sum * b_sum - a_sum * (c_sum - 1.0);
  if (disc < -kDiscClamp) return false;
  disc = std::max(disc, 0.0);

  // at most one root carries all-positive weights (the functional is
  // strictly convex on the simplex); try the larger root first. The causal
  // variant keeps only the larger root with t >= 0, so accepted values
  // strictly exceed the vertex values they use.
  const int n_roots = causal ? 1 : 2;
  for (int root = 0; root < n_roots; ++root) {
    const double t = (b_sum + (root == 0 ? 1.0 : -1.0) * std::sqrt(disc)) / a_sum;
    if (causal && t < 0) return false;
    double w[3];
    double wsum = 0;
    bool positive = true;
    for (int a = 0; a < kk && positive; ++a) {
      w[a] = 0;
      for (int b = 0; b < kk; ++b) w[a] += Q[a][b] * (t - dq[b]);
      positive = w[a] > 0;
      wsum += w[a];
    }
    if (!positive) continue;
    out.value = dmax + t;
    out.mask = mask;
    out.weights = {};
    for (int a = 0; a < kk; ++a) out.weights[idx[a]] = w[a] / wsum;
    return true;
  }
  return false;
}

FacetResult facet_solve_impl(const double gram[3][3], const double* delta, int k, bool causal) {
  if (k < 1 || k > 3) throw std::invalid_argument("facet_solve: k must be in 1..3");
  FacetResult best;
  best.value = kInf;
  const std::uint8_t full = std::uint8_t((1 << k) - 1);
  FacetResult cand;
  if (interior_solve(gram, delta, k, full, causal, cand)) return cand;  // interior min is global
  // otherwise the minimum lies on a proper sub-facet; enumerate them by
  // decreasing size for a deterministic argmin
  for (int size = k - 1; size >= 1; --size)
    for (std::uint8_t mask = 1; mask <= full; ++mask) {
      if (std::popcount(mask) != size || (mask & ~full)) continue;
      if (interior_solve(gram, delta, k, mask, causal, cand) && cand.value < best.value)
        best = cand;
    }
  return best;
}

// shared inner loop: given the qualifying vertex offsets of one simplex,
// solve the facet and fold into the incumbent
inline void fold_simplex(const SpdTensor& Ms, const IVec3* offs, const double* vals, int k,
                         int simplex_index, bool causal, FacetSolution& best) {
  double gram[3][3];
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) gram[i][j] = gram[j][i] = Ms.scalar_product(offs[i], offs[j]);
  const FacetResult r = facet_solve_impl(gram, vals, k, causal);
  if (r.value < best.value) {
    best.value = r.value;
    best.simplex = simplex_index;
    best.k = 0;
    for (int i = 0; i < k; ++i)
      if (r.mask & (1 << i)) {
        best.offsets[best.k] = offs[i];
        best.weights[best.k] = r.weights[i];
        ++best.k;
      }
  }
}

}  // namespace

FacetResult facet_solve(const double gram[3][3], const double* delta, int k) {
  return facet_solve_impl(gram, delta, k, false);
}

FacetSolution stencil_update(std::span<const double> values, std::int64_t node,
                             const GridStencils& stencils, const MetricGrid& metric,
                             const UpdateFilter& filter, bool causal) {
  FacetSolution best;
  best.value = kInf;
  const int d = metric.dim();
  const IVec3 c = metric.coords(node);
  const int nv = stencils.vertex_count(node);
  if (nv == 0) return best;
  const SpdTensor Ms = metric.scaled_tensor(node);

  // resolve per-vertex node ids, values and filter admissibility once
  std::int64_t vnode[16];
  double vval[16];
  bool vok[16];
  for (int t = 0; t < nv; ++t) {
    const IVec3 off = stencils.vertex_offset(node, t);
    IVec3 pos{};
    for (int a = 0; a < d; ++a) pos[a] = c[a] + off[a];
    const std::int64_t idx = metric.index(pos);
    vnode[t] = idx;
    vval[t] = values[idx];
    vok[t] = std::isfinite(vval[t]) && (!filter.accepted || filter.accepted[idx]);
  }

  const int ns = stencils.simplex_count(node);
  for (int s = 0; s < ns; ++s) {
    const std::array<int, 3> sv = stencils.simplex(node, s);
    IVec3 offs[3];
    double vals[3];
    int k = 0;
    bool has_target = filter.must_contain < 0;
    for (int i = 0; i < d; ++i) {
      const int t = sv[i];
      if (!vok[t]) continue;
      if (vnode[t] == filter.must_contain) has_target = true;
      offs[k] = stencils.vertex_offset(node, t);
      vals[k] = vval[t];
      ++k;
    }
    if (k == 0 || !has_target) continue;
    fold_simplex(Ms, offs, vals, k, s, causal, best);
  }
  return best;
}

FacetSolution stencil_update(std::span<const double> values, std::int64_t node,
                             const StencilMesh& mesh, const MetricGrid& metric,
                             const UpdateFilter& filter, bool causal) {
  FacetSolution best;
  best.value = kInf;
  const int d = metric.dim();
  const IVec3 c = metric.coords(node);
  const SpdTensor Ms = metric.scaled_tensor(node);

  for (std::size_t s = 0; s < mesh.simplices.size(); ++s) {
    const auto& simp = mesh.simplices[s];
    IVec3 offs[3];
    double vals[3];
    int k = 0;
    bool has_target = filter.must_contain < 0;
    bool inside = true;
    for (int i = 0; i < d && inside; ++i) {
      IVec3 pos{};
      for (int a = 0; a < d; ++a) pos[a] = c[a] + simp[i][a];
      inside = metric.in_grid(pos);
      if (!inside) break;
      const std::int64_t idx = metric.index(pos);
      const double v = values[idx];
      if (!std::isfinite(v) || (filter.accepted && !filter.accepted[idx])) continue;
      if (idx == filter.must_contain) has_target = true;
      offs[k] = simp[i];
      vals[k] = v;
      ++k;
    }
    if (!inside || k == 0 || !has_target) continue;
    fold_simplex(Ms, offs, vals, k, int(s), causal, best);
  }
  return best;
}

}  // namespace fmlbr
