#include "fmlbr/lbr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace fmlbr {

namespace {

// half-integer ties round toward zero, keeping the Gauss step a contraction
long long round_half_to_zero(double x) {
  const double f = std::floor(x);
  const double r = x - f;
  if (r < 0.5) return (long long)f;
  if (r > 0.5) return (long long)f + 1;
  return (x > 0) ? (long long)f : (long long)f + 1;
}

IVec3 sub_scaled(const IVec3& a, long long r, const IVec3& b) {
  return {int(a[0] - r * b[0]), int(a[1] - r * b[1]), int(a[2] - r * b[2])};
}

void sign_normalize(IVec3& v) {
  for (int i = 0; i < 3; ++i) {
    if (v[i] > 0) return;
    if (v[i] < 0) {
      v = {-v[0], -v[1], -v[2]};
      return;
    }
  }
}

bool lex_less(const IVec3& a, const IVec3& b) {
  for (int i = 0; i < 3; ++i)
    if (std::abs(a[i]) != std::abs(b[i])) return std::abs(a[i]) < std::abs(b[i]);
  for (int i = 0; i < 3; ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

// total order: M-norm first, lexicographic tie-break for determinism
bool norm_less(const SpdTensor& M, const IVec3& a, const IVec3& b) {
  const double qa = M.quadratic_form(a), qb = M.quadratic_form(b);
  if (qa != qb) return qa < qb;
  return lex_less(a, b);
}

long long det2(const IVec3& a, const IVec3& b) {
  return (long long)a[0] * b[1] - (long long)a[1] * b[0];
}

long long det3(const IVec3& a, const IVec3& b, const IVec3& c) {
  return (long long)a[0] * ((long long)b[1] * c[2] - (long long)b[2] * c[1]) -
         (long long)a[1] * ((long long)b[0] * c[2] - (long long)b[2] * c[0]) +
         (long long)a[2] * ((long long)b[0] * c[1] - (long long)b[1] * c[0]);
}

// Gauss reduction of the pair (u, v) under M; vectors may live in Z^3.
// Returns the number of loop steps taken.
int gauss_pair(const SpdTensor& M, IVec3& u, IVec3& v, int iter_limit) {
  int steps = 0;
  while (true) {
    if (++steps > iter_limit + 2)
      throw std::runtime_error("reduce_basis: iteration limit exceeded (2d loop)");
    const double vv = M.quadratic_form(v);
    const long long r = round_half_to_zero(M.scalar_product(u, v) / vv);
    const IVec3 w = sub_scaled(u, r, v);
    u = v;
    v = w;
    if (!(M.quadratic_form(u) > M.quadratic_form(v))) break;
  }
  return steps;
}

struct BestVec {
  double q = std::numeric_limits<double>::infinity();
  IVec3 z{};
  bool found = false;

  void offer(double cand_q, const IVec3& cand) {
    if (cand_q < q) {
      q = cand_q;
      z = cand;
      found = true;
    }
  }
};

bool in_span1(const IVec3& u, const IVec3& z) {
  int a = -1;
  for (int i = 0; i < 3; ++i)
    if (u[i] != 0) {
      a = i;
      break;
    }
  if (a < 0) return z[0] == 0 && z[1] == 0 && z[2] == 0;
  if (z[a] % u[a] != 0) return false;
  const long long k = z[a] / u[a];
  for (int i = 0; i < 3; ++i)
    if (z[i] != k * u[i]) return false;
  return true;
}

bool in_span2(const IVec3& u, const IVec3& v, const IVec3& z) {
  const IVec3 w = {int((long long)u[1] * v[2] - (long long)u[2] * v[1]),
                   int((long long)u[2] * v[0] - (long long)u[0] * v[2]),
                   int((long long)u[0] * v[1] - (long long)u[1] * v[0])};
  if ((long long)w[0] * z[0] + (long long)w[1] * z[1] + (long long)w[2] * z[2] != 0) return false;
  int a = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(w[i]) > std::abs(w[a])) a = i;
  if (w[a] == 0) return false;  // u, v dependent; cannot happen for a basis pair
  const int i = (a + 1) % 3, j = (a + 2) % 3;
  const long long det = (long long)u[i] * v[j] - (long long)u[j] * v[i];
  const long long na = (long long)z[i] * v[j] - (long long)z[j] * v[i];
  const long long nb = (long long)u[i] * z[j] - (long long)u[j] * z[i];
  if (na % det != 0 || nb % det != 0) return false;
  const long long alpha = na / det, beta = nb / det;
  for (int k = 0; k < 3; ++k)
    if (alpha * u[k] + beta * v[k] != z[k]) return false;
  return true;
}

}  // namespace

long long LatticeBasis::determinant() const {
  if (dim == 1) return vectors[0][0];
  if (dim == 2) return det2(vectors[0], vectors[1]);
  return det3(vectors[0], vectors[1], vectors[2]);
}

LatticeBasis reduce_basis(const SpdTensor& M, ReduceStats* stats) {
  const int d = M.dim();
  LatticeBasis out;
  out.dim = d;
  for (int i = 0; i < d; ++i) out.vectors[i][i] = 1;
  if (stats) stats->iterations = 0;

  const auto cmp = [&](const IVec3& a, const IVec3& b) { return norm_less(M, a, b); };

  const double kappa = anisotropy_ratio(M);
  if (d == 1 || kappa < 1.0 + 1e-12) {
    // near-isotropic: the canonical basis is reduced up to axis ordering
    std::sort(out.vectors.begin(), out.vectors.begin() + d, cmp);
    return out;
  }
  const int iter_limit = int(64.0 + 8.0 * std::log(kappa));

  if (d == 2) {
    IVec3 u = out.vectors[0], v = out.vectors[1];
    const int steps = gauss_pair(M, u, v, iter_limit);
    if (stats) stats->iterations = steps;
    out.vectors[0] = u;
    out.vectors[1] = v;
  } else {
    std::array<IVec3, 3> b = {out.vectors[0], out.vectors[1], out.vectors[2]};
    int pass = 0;
    while (true) {
      if (++pass > iter_limit)
        throw std::runtime_error("reduce_basis: iteration limit exceeded (3d loop)");
      const std::array<IVec3, 3> before = b;
      std::sort(b.begin(), b.end(), cmp);
      gauss_pair(M, b[0], b[1], iter_limit);
      if (norm_less(M, b[1], b[0])) std::swap(b[0], b[1]);
      // closest vector to b2 in the sublattice of (b0, b1): round the
      // least-squares coefficients, then search the 3x3 neighborhood
      const double g00 = M.quadratic_form(b[0]);
      const double g11 = M.quadratic_form(b[1]);
      const double g01 = M.scalar_product(b[0], b[1]);
      const double r0 = M.scalar_product(b[0], b[2]);
      const double r1 = M.scalar_product(b[1], b[2]);
      const double det = g00 * g11 - g01 * g01;
      const double x = (r0 * g11 - r1 * g01) / det;
      const double y = (g00 * r1 - g01 * r0) / det;
      const long long cx = round_half_to_zero(x), cy = round_half_to_zero(y);
      double best_q = M.quadratic_form(b[2]);
      IVec3 best = b[2];
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
          IVec3 cand;
          for (int k = 0; k < 3; ++k)
            cand[k] = int(b[2][k] - (cx + dx) * b[0][k] - (cy + dy) * b[1][k]);
          const double q = M.quadratic_form(cand);
          if (q < best_q * (1.0 - 1e-15)) {
            best_q = q;
            best = cand;
          }
        }
      b[2] = best;
      if (b == before) break;
    }
    if (stats) stats->iterations = pass;
    for (int i = 0; i < 3; ++i) out.vectors[i] = b[i];
  }

  for (int i = 0; i < d; ++i) sign_normalize(out.vectors[i]);
  std::sort(out.vectors.begin(), out.vectors.begin() + d, cmp);
  const long long det = out.determinant();
  if (det != 1 && det != -1) throw std::logic_error("reduce_basis: basis is not unimodular");
  return out;
}

std::vector<double> oracle_reduced_norms(const SpdTensor& M) {
  const int d = M.dim();
  const double kappa = anisotropy_ratio(M);
  if (kappa > 1e3) throw std::invalid_argument("oracle_reduced_norms: kappa too large for exhaustive search");
  const int R = int(std::ceil(kappa));

  if (d == 1) return {std::sqrt(M(0, 0))};

  // exhaustive scan over ||z||_inf <= R with sound pruning: for each prefix,
  // only offsets whose quadratic form can beat the incumbent are visited
  auto scan = [&](auto&& pred) -> BestVec {
    BestVec best;
    // seed with canonical vectors so pruning has a finite incumbent
    for (int i = 0; i < d; ++i) {
      IVec3 e{};
      e[i] = 1;
      if (pred(e)) best.offer(M.quadratic_form(e), e);
    }
    if (d == 2) {
      const double a = M(1, 1);
      for (int z1 = 0; z1 <= R; ++z1) {
        const double bq = 2.0 * M(0, 1) * z1;
        const double cq = M(0, 0) * double(z1) * z1;
        const double vertex = -bq / (2 * a);
        const double qmin = cq - bq * bq / (4 * a);
        if (qmin >= best.q) continue;
        const double rad = std::sqrt(std::max(0.0, (best.q - qmin) / a));
        int lo = std::max(-R, (int)std::ceil(vertex - rad));
        int hi = std::min(R, (int)std::floor(vertex + rad));
        if (z1 == 0) lo = std::max(lo, 1);
        for (int z2 = lo; z2 <= hi; ++z2) {
          const IVec3 z = {z1, z2, 0};
          const double q = M.quadratic_form(z);
          if (q < best.q && pred(z)) best.offer(q, z);
        }
      }
      return best;
    }
    // d == 3: Schur complements bound the reachable quadratic form per prefix
    const double s22 = M(2, 2);
    const double A2 = M(1, 1) - M(1, 2) * M(1, 2) / s22;
    for (int z1 = 0; z1 <= R; ++z1) {
      const double B2 = 2.0 * z1 * (M(0, 1) - M(0, 2) * M(1, 2) / s22);
      const double C2 = double(z1) * z1 * (M(0, 0) - M(0, 2) * M(0, 2) / s22);
      const double vtx2 = -B2 / (2 * A2);
      const double qmin2 = C2 - B2 * B2 / (4 * A2);
      if (qmin2 >= best.q) continue;
      const double rad2 = std::sqrt(std::max(0.0, (best.q - qmin2) / A2));
      const int lo2 = std::max(-R, (int)std::ceil(vtx2 - rad2));
      const int hi2 = std::min(R, (int)std::floor(vtx2 + rad2));
      for (int z2 = lo2; z2 <= hi2; ++z2) {
        const double bq = 2.0 * (M(0, 2) * z1 + M(1, 2) * z2);
        const double cq = M(0, 0) * double(z1) * z1 + 2.0 * M(0, 1) * double(z1) * z2 +
                          M(1, 1) * double(z2) * z2;
        const double vtx3 = -bq / (2 * s22);
        const double qmin3 = cq - bq * bq / (4 * s22);
        if (qmin3 >= best.q) continue;
        const double rad3 = std::sqrt(std::max(0.0, (best.q - qmin3) / s22));
        int lo3 = std::max(-R, (int)std::ceil(vtx3 - rad3));
        int hi3 = std::min(R, (int)std::floor(vtx3 + rad3));
        if (z1 == 0 && z2 == 0) lo3 = std::max(lo3, 1);
        for (int z3 = lo3; z3 <= hi3; ++z3) {
          const IVec3 z = {z1, z2, z3};
          const double q = M.quadratic_form(z);
          if (q < best.q && pred(z)) best.offer(q, z);
        }
      }
    }
    return best;
  };

  std::vector<double> norms;
  const BestVec first = scan([](const IVec3&) { return true; });
  norms.push_back(std::sqrt(first.q));
  const IVec3 u1 = first.z;
  const BestVec second = scan([&](const IVec3& z) { return !in_span1(u1, z); });
  if (!second.found) throw std::logic_error("oracle_reduced_norms: no second minimum found");
  norms.push_back(std::sqrt(second.q));
  if (d == 3) {
    const IVec3 u2 = second.z;
    const BestVec third = scan([&](const IVec3& z) { return !in_span2(u1, u2, z); });
    if (!third.found) throw std::logic_error("oracle_reduced_norms: no third minimum found");
    norms.push_back(std::sqrt(third.q));
  }
  return norms;
}

}  // namespace fmlbr
