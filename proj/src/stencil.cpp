#include "fmlbr/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>

namespace fmlbr {

namespace {

IVec3 neg(const IVec3& v) { return {-v[0], -v[1], -v[2]}; }

IVec3 scaled(int c, const IVec3& v) { return {c * v[0], c * v[1], c * v[2]}; }

IVec3 combo(const int c[3], const IVec3& u, const IVec3& v, const IVec3& w) {
  IVec3 r{};
  for (int a = 0; a < 3; ++a) r[a] = c[0] * u[a] + c[1] * v[a] + c[2] * w[a];
  return r;
}

long long simplex_det(int dim, const std::array<IVec3, 3>& s) {
  if (dim == 1) return s[0][0];
  if (dim == 2)
    return (long long)s[0][0] * s[1][1] - (long long)s[0][1] * s[1][0];
  return (long long)s[0][0] * ((long long)s[1][1] * s[2][2] - (long long)s[1][2] * s[2][1]) -
         (long long)s[0][1] * ((long long)s[1][0] * s[2][2] - (long long)s[1][2] * s[2][0]) +
         (long long)s[0][2] * ((long long)s[1][0] * s[2][1] - (long long)s[1][1] * s[2][0]);
}

// connectivity tables of the two 3d parity cases; rows are coefficient
// triples over the normalized basis (u, v, w)
constexpr int kOddTable[12][3][3] = {
    {{0, 0, 1}, {1, 0, 0}, {0, 1, 1}},    {{0, 0, 1}, {0, 1, 1}, {-1, 1, 1}},
    {{0, 0, 1}, {-1, 1, 1}, {-1, 0, 1}},  {{0, 0, 1}, {-1, 0, 1}, {0, -1, 0}},
    {{0, 0, 1}, {0, -1, 0}, {1, -1, 0}},  {{0, 0, 1}, {1, -1, 0}, {1, 0, 0}},
    {{0, 1, 0}, {0, 1, 1}, {1, 0, 0}},    {{0, 1, 0}, {-1, 1, 1}, {0, 1, 1}},
    {{0, 1, 0}, {-1, 1, 0}, {-1, 1, 1}},  {{-1, 0, 0}, {0, -1, 0}, {-1, 0, 1}},
    {{-1, 0, 0}, {-1, 0, 1}, {-1, 1, 1}}, {{-1, 0, 0}, {-1, 1, 1}, {-1, 1, 0}},
};

constexpr int kEvenTable[12][3][3] = {
    {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},    {{0, 0, 1}, {0, 1, 0}, {-1, 0, 1}},
    {{-1, 0, 1}, {0, 1, 0}, {-1, 1, 0}},  {{-1, 0, 1}, {-1, 1, 0}, {-1, 0, 0}},
    {{-1, 0, 1}, {-1, 0, 0}, {0, -1, 1}}, {{0, -1, 1}, {-1, 0, 0}, {0, -1, 0}},
    {{0, -1, 1}, {0, -1, 0}, {1, -1, 0}}, {{0, -1, 1}, {1, -1, 0}, {1, -1, 1}},
    {{1, -1, 1}, {1, -1, 0}, {1, 0, 0}},  {{1, 0, 0}, {0, 0, 1}, {1, -1, 1}},
    {{0, 0, 1}, {0, -1, 1}, {1, -1, 1}},  {{0, 0, 1}, {-1, 0, 1}, {0, -1, 1}},
};

constexpr int kSignClasses[4][3] = {{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};
constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

bool normalize_negative_case(const SpdTensor& M, const std::array<IVec3, 3>& b,
                             IVec3& u, IVec3& v, IVec3& w) {
  for (const auto& e : kSignClasses) {
    const IVec3 cu = scaled(e[0], b[0]), cv = scaled(e[1], b[1]), cw = scaled(e[2], b[2]);
    if (M.scalar_product(cu, cv) >= 0 && M.scalar_product(cu, cw) >= 0 &&
        M.scalar_product(cv, cw) <= 0) {
      u = cu;
      v = cv;
      w = cw;
      return true;
    }
  }
  return false;
}

bool normalize_positive_case(const SpdTensor& M, const std::array<IVec3, 3>& b,
                             IVec3& u, IVec3& v, IVec3& w) {
  for (const auto& p : kPerms)
    for (const auto& e : kSignClasses) {
      const IVec3 cu = scaled(e[0], b[p[0]]), cv = scaled(e[1], b[p[1]]), cw = scaled(e[2], b[p[2]]);
      const double suv = M.scalar_product(cu, cv);
      const double suw = M.scalar_product(cu, cw);
      const double svw = M.scalar_product(cv, cw);
      if (svw >= suv && suv >= suw && suw >= 0) {
        u = cu;
        v = cv;
        w = cw;
        return true;
      }
    }
  return false;
}

// fixed-capacity mesh used on the hot preprocessing path
struct SmallMesh {
  int dim = 0;
  int count = 0;
  std::array<std::array<IVec3, 3>, 48> simp{};

  void add(const IVec3& a) { simp[count++] = {a, IVec3{}, IVec3{}}; }
  void add(const IVec3& a, const IVec3& b) { simp[count++] = {a, b, IVec3{}}; }
  void add(const IVec3& a, const IVec3& b, const IVec3& c) { simp[count++] = {a, b, c}; }
};

void build_reduced_small(const SpdTensor& M, SmallMesh& out) {
  const int d = M.dim();
  out.dim = d;
  out.count = 0;
  if (d == 1) {
    out.add(IVec3{1, 0, 0});
    out.add(IVec3{-1, 0, 0});
    return;
  }
  const LatticeBasis basis = reduce_basis(M);
  if (d == 2) {
    const IVec3 u = basis.vectors[0];
    const int eps = M.scalar_product(basis.vectors[0], basis.vectors[1]) >= 0 ? 1 : -1;
    const IVec3 v = scaled(eps, basis.vectors[1]);
    const IVec3 vu = {v[0] - u[0], v[1] - u[1], v[2] - u[2]};
    const IVec3 ring[6] = {u, v, vu, neg(u), neg(v), neg(vu)};
    for (int i = 0; i < 6; ++i) out.add(ring[i], ring[(i + 1) % 6]);
    return;
  }
  // 3d: the parity of the number of negative pairwise products selects the
  // sign normalization; the other branch is a fallback for boundary cases
  const std::array<IVec3, 3> b = {basis.vectors[0], basis.vectors[1], basis.vectors[2]};
  const double s01 = M.scalar_product(b[0], b[1]);
  const double s12 = M.scalar_product(b[1], b[2]);
  const double s20 = M.scalar_product(b[2], b[0]);
  const int negatives = (s01 < 0) + (s12 < 0) + (s20 < 0);
  IVec3 u{}, v{}, w{};
  bool use_odd_table;
  if (negatives % 2 == 1) {
    use_odd_table = normalize_negative_case(M, b, u, v, w);
    if (!use_odd_table && !normalize_positive_case(M, b, u, v, w))
      throw std::logic_error("build_reduced_mesh: no admissible sign/permutation");
  } else {
    use_odd_table = !normalize_positive_case(M, b, u, v, w);
    if (use_odd_table && !normalize_negative_case(M, b, u, v, w))
      throw std::logic_error("build_reduced_mesh: no admissible sign/permutation");
  }
  const auto& table = use_odd_table ? kOddTable : kEvenTable;
  for (int t = 0; t < 12; ++t) {
    const IVec3 a0 = combo(table[t][0], u, v, w);
    const IVec3 a1 = combo(table[t][1], u, v, w);
    const IVec3 a2 = combo(table[t][2], u, v, w);
    out.add(a0, a1, a2);
    out.add(neg(a0), neg(a1), neg(a2));
  }
}

}  // namespace

std::vector<IVec3> StencilMesh::vertex_set() const {
  std::vector<IVec3> verts;
  for (const auto& s : simplices)
    for (int i = 0; i < dim; ++i) {
      const IVec3& v = s[i];
      if (std::find(verts.begin(), verts.end(), v) == verts.end()) verts.push_back(v);
    }
  return verts;
}

StencilMesh build_reduced_mesh(const SpdTensor& M) {
  SmallMesh small;
  build_reduced_small(M, small);
  StencilMesh out;
  out.dim = small.dim;
  out.simplices.assign(small.simp.begin(), small.simp.begin() + small.count);
  return out;
}

StencilMesh compose_meshes(const StencilMesh& a, std::span<const int> axes_a,
                           const StencilMesh& b, std::span<const int> axes_b) {
  if (int(axes_a.size()) != a.dim || int(axes_b.size()) != b.dim)
    throw std::invalid_argument("compose_meshes: axis count mismatch");
  StencilMesh out;
  out.dim = a.dim + b.dim;
  if (out.dim > 3) throw std::invalid_argument("compose_meshes: total dimension above 3");
  for (const auto& sa : a.simplices)
    for (const auto& sb : b.simplices) {
      std::array<IVec3, 3> s{};
      int k = 0;
      for (int i = 0; i < a.dim; ++i) {
        IVec3 v{};
        for (int t = 0; t < a.dim; ++t) v[axes_a[t]] = sa[i][t];
        s[k++] = v;
      }
      for (int i = 0; i < b.dim; ++i) {
        IVec3 v{};
        for (int t = 0; t < b.dim; ++t) v[axes_b[t]] = sb[i][t];
        s[k++] = v;
      }
      out.simplices.push_back(s);
    }
  return out;
}

StencilMesh axis_mesh(int dim) {
  StencilMesh out;
  out.dim = dim;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    std::array<IVec3, 3> s{};
    for (int a = 0; a < dim; ++a) s[a][a] = (mask & (1 << a)) ? -1 : 1;
    out.simplices.push_back(s);
  }
  return out;
}

int stencil_kind_dim(StencilKind kind) {
  return (kind == StencilKind::FM4 || kind == StencilKind::FM8) ? 2 : 3;
}

StencilMesh classical_mesh(StencilKind kind) {
  if (kind == StencilKind::FM4) return axis_mesh(2);
  if (kind == StencilKind::FM6) return axis_mesh(3);
  if (kind == StencilKind::FM8) {
    static constexpr int ring[8][2] = {{1, 0},  {1, 1},   {0, 1},  {-1, 1},
                                       {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
    StencilMesh out;
    out.dim = 2;
    for (int i = 0; i < 8; ++i) {
      const int j = (i + 1) % 8;
      out.simplices.push_back({IVec3{ring[i][0], ring[i][1], 0}, IVec3{ring[j][0], ring[j][1], 0}, IVec3{}});
    }
    return out;
  }
  // FM26: Kuhn subdivision of each orthant, 48 tetrahedra over the 26 neighbors
  StencilMesh out;
  out.dim = 3;
  for (int mask = 0; mask < 8; ++mask) {
    const int sgn[3] = {(mask & 1) ? -1 : 1, (mask & 2) ? -1 : 1, (mask & 4) ? -1 : 1};
    for (const auto& p : kPerms) {
      IVec3 v1{}, v2{}, v3{};
      v1[p[0]] = sgn[p[0]];
      v2 = v1;
      v2[p[1]] = sgn[p[1]];
      v3 = v2;
      v3[p[2]] = sgn[p[2]];
      out.simplices.push_back({v1, v2, v3});
    }
  }
  return out;
}

MeshValidation validate_mesh(const SpdTensor& M, const StencilMesh& mesh,
                             int samples, unsigned rng_seed) {
  MeshValidation report;
  const int d = mesh.dim;
  if (M.dim() != d) throw std::invalid_argument("validate_mesh: dimension mismatch");

  // (b) unimodular lattice simplices
  report.unimodular = true;
  for (const auto& s : mesh.simplices) {
    const long long det = simplex_det(d, s);
    if (det != 1 && det != -1) {
      report.unimodular = false;
      ++report.det_failures;
    }
  }

  // (c) pairwise nonnegative M-scalar products within each simplex
  report.acute = true;
  for (const auto& s : mesh.simplices)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const double nij = std::sqrt(M.quadratic_form(s[i]) * M.quadratic_form(s[j]));
        if (M.scalar_product(s[i], s[j]) < -1e-9 * nij) {
          report.acute = false;
          ++report.acute_failures;
        }
      }

  // (a) sampled cone coverage; directions grazing a cone boundary within
  // 1e-9 are rejected and redrawn
  if (!report.unimodular) {
    report.covers = false;
    return report;
  }
  std::vector<std::array<double, 9>> inv(mesh.simplices.size());
  for (std::size_t k = 0; k < mesh.simplices.size(); ++k) {
    const auto& s = mesh.simplices[k];
    auto& A = inv[k];
    if (d == 1) {
      A[0] = 1.0 / s[0][0];
    } else if (d == 2) {
      // columns are the vertices; invert
      const double a = s[0][0], b = s[1][0], c = s[0][1], e = s[1][1];
      const double det = a * e - b * c;
      A = {e / det, -b / det, 0, -c / det, a / det, 0, 0, 0, 0};
    } else {
      const double m[3][3] = {{double(s[0][0]), double(s[1][0]), double(s[2][0])},
                              {double(s[0][1]), double(s[1][1]), double(s[2][1])},
                              {double(s[0][2]), double(s[1][2]), double(s[2][2])}};
      const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
      A = {(m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det,
           (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det,
           (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det,
           (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det,
           (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det,
           (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det,
           (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det,
           (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det,
           (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det};
    }
  }

  std::mt19937 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  constexpr double kTol = 1e-9;
  report.covers = true;
  for (int n = 0; n < samples; ++n) {
    int strict_count = 0;
    bool grazing = true;
    for (int attempt = 0; attempt < 64 && grazing; ++attempt) {
      Vec3 wdir{};
      double nn = 0;
      do {
        for (int a = 0; a < d; ++a) wdir[a] = gauss(rng);
        nn = euclid_norm(wdir, d);
      } while (nn < 1e-8);
      for (int a = 0; a < d; ++a) wdir[a] /= nn;

      grazing = false;
      strict_count = 0;
      for (std::size_t k = 0; k < mesh.simplices.size() && !grazing; ++k) {
        const auto& A = inv[k];
        double coef[3] = {0, 0, 0};
        for (int i = 0; i < d; ++i)
          for (int a = 0; a < d; ++a) coef[i] += A[i * 3 + a] * wdir[a];
        double cmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < d; ++i) cmin = std::min(cmin, coef[i]);
        if (cmin > kTol)
          ++strict_count;
        else if (cmin > -kTol)
          grazing = true;  // boundary direction: reject the sample
      }
    }
    ++report.cover_samples;
    if (grazing || strict_count != 1) {
      report.covers = false;
      ++report.cover_failures;
    }
  }
  return report;
}

std::pair<double, double> mesh_anisotropy_bound(const StencilMesh& mesh) {
  const int d = mesh.dim;
  double gamma = 1.0;
  bool any_pair = false;
  for (const auto& s : mesh.simplices)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const Vec3 a = to_vec(s[i]), b = to_vec(s[j]);
        const double c = dot(a, b, d) / (euclid_norm(a, d) * euclid_norm(b, d));
        gamma = any_pair ? std::min(gamma, c) : c;
        any_pair = true;
      }
  if (!any_pair || gamma >= 1.0)
    return {1.0, std::numeric_limits<double>::infinity()};
  return {gamma, std::sqrt((1.0 + gamma) / (1.0 - gamma))};
}

GridStencils build_grid_stencils(const MetricGrid& metric) {
  const int d = metric.dim();
  const std::int64_t n = metric.node_count();
  GridStencils out;
  out.dim = d;
  out.dims = metric.dims();

  static const StencilMesh axis1 = axis_mesh(1);
  static const StencilMesh axis2 = axis_mesh(2);
  static const StencilMesh axis3 = axis_mesh(3);
  const StencilMesh& axis = (d == 1) ? axis1 : (d == 2 ? axis2 : axis3);
  SmallMesh axis_small_mesh;
  axis_small_mesh.dim = d;
  for (const auto& s : axis.simplices) axis_small_mesh.simp[axis_small_mesh.count++] = s;

  out.vert_start.assign(n + 1, 0);
  out.simplex_start.assign(n + 1, 0);
  out.vert_offsets.reserve(std::size_t(n) * (d == 3 ? 14 : 6) * d);
  out.simplex_verts.reserve(std::size_t(n) * (d == 3 ? 24 : 6));

  SmallMesh scratch;
  for (std::int64_t node = 0; node < n; ++node) {
    const IVec3 c = metric.coords(node);
    const SmallMesh* mesh;
    if (metric.tensor_is_diagonal(node)) {
      mesh = &axis_small_mesh;
    } else {
      build_reduced_small(metric.scaled_tensor(node), scratch);
      mesh = &scratch;
    }

    IVec3 local_verts[16];
    int n_verts = 0;
    int n_simp = 0;
    for (int s = 0; s < mesh->count; ++s) {
      bool inside = true;
      for (int i = 0; i < d && inside; ++i) {
        IVec3 pos{};
        for (int a = 0; a < d; ++a) pos[a] = c[a] + mesh->simp[s][i][a];
        inside = metric.in_grid(pos);
      }
      if (!inside) continue;
      std::uint16_t packed = 0;
      for (int i = 0; i < d; ++i) {
        const IVec3& v = mesh->simp[s][i];
        int vi = -1;
        for (int t = 0; t < n_verts; ++t)
          if (local_verts[t] == v) {
            vi = t;
            break;
          }
        if (vi < 0) {
          if (n_verts >= 15) throw std::logic_error("build_grid_stencils: vertex budget exceeded");
          local_verts[n_verts] = v;
          vi = n_verts++;
        }
        packed |= std::uint16_t(vi) << (4 * i);
      }
      out.simplex_verts.push_back(packed);
      ++n_simp;
    }
    for (int t = 0; t < n_verts; ++t)
      for (int a = 0; a < d; ++a) {
        const int comp = local_verts[t][a];
        if (comp < -32768 || comp > 32767)
          throw std::logic_error("build_grid_stencils: offset exceeds 16-bit range");
        out.vert_offsets.push_back(std::int16_t(comp));
      }
    out.vert_start[node + 1] = out.vert_start[node] + n_verts;
    out.simplex_start[node + 1] = out.simplex_start[node] + n_simp;
    if (n_simp == 0) ++out.empty_nodes;
    out.total_vertices += n_verts;
    out.total_simplices += n_simp;
    out.max_vertices_per_node = std::max(out.max_vertices_per_node, n_verts);
  }

  // reversed stencils by transposition: count, then fill
  out.rev_start.assign(n + 1, 0);
  for (std::int64_t node = 0; node < n; ++node) {
    const IVec3 c = metric.coords(node);
    const int nv = out.vertex_count(node);
    for (int t = 0; t < nv; ++t) {
      const IVec3 v = out.vertex_offset(node, t);
      IVec3 pos{};
      for (int a = 0; a < d; ++a) pos[a] = c[a] + v[a];
      ++out.rev_start[metric.index(pos) + 1];
    }
  }
  for (std::int64_t i = 0; i < n; ++i) out.rev_start[i + 1] += out.rev_start[i];
  out.rev_nodes.assign(out.rev_start[n], 0);
  std::vector<std::uint32_t> cursor(out.rev_start.begin(), out.rev_start.end() - 1);
  for (std::int64_t node = 0; node < n; ++node) {
    const IVec3 c = metric.coords(node);
    const int nv = out.vertex_count(node);
    for (int t = 0; t < nv; ++t) {
      const IVec3 v = out.vertex_offset(node, t);
      IVec3 pos{};
      for (int a = 0; a < d; ++a) pos[a] = c[a] + v[a];
      out.rev_nodes[cursor[metric.index(pos)]++] = std::int32_t(node);
    }
  }
  return out;
}

}  // namespace fmlbr
