#include "fmlbr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fmlbr {

namespace {

constexpr double kSpdRelTol = 1e-12;

// packed layout: index of (i,j), i <= j
inline int pidx(int i, int j) {
  // (0,0)->0 (0,1)->1 (1,1)->2 (0,2)->3 (1,2)->4 (2,2)->5
  static constexpr int table[3][3] = {{0, 1, 3}, {1, 2, 4}, {3, 4, 5}};
  return table[i][j];
}

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("SpdTensor: dim must be 1, 2 or 3");
}

}  // namespace

double dot(const Vec3& a, const Vec3& b, int dim) {
  double s = 0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

double euclid_norm(const Vec3& a, int dim) { return std::sqrt(dot(a, a, dim)); }

Vec3 to_vec(const IVec3& v) { return {double(v[0]), double(v[1]), double(v[2])}; }

SpdTensor::SpdTensor(int dim, std::span<const double> packed) : dim_(dim) {
  check_dim(dim);
  if (packed.size() != packed_size(dim))
    throw std::invalid_argument("SpdTensor: packed entry count does not match dim");
  std::copy(packed.begin(), packed.end(), m_.begin());

  // leading principal minors, relative to the diagonal scale
  const double m00 = m_[0];
  double scale = std::abs(m00);
  if (!(m00 > kSpdRelTol * std::max(scale, 1e-300)) || !std::isfinite(m00))
    throw std::invalid_argument("SpdTensor: not positive definite (minor 1)");
  if (dim >= 2) {
    const double m01 = m_[1], m11 = m_[2];
    const double det2 = m00 * m11 - m01 * m01;
    scale = std::abs(m00 * m11);
    if (!(det2 > kSpdRelTol * scale) || !std::isfinite(det2))
      throw std::invalid_argument("SpdTensor: not positive definite (minor 2)");
  }
  if (dim == 3) {
    const double det3 = determinant();
    scale = std::abs(m_[0] * m_[2] * m_[5]);
    if (!(det3 > kSpdRelTol * scale) || !std::isfinite(det3))
      throw std::invalid_argument("SpdTensor: not positive definite (minor 3)");
  }
}

SpdTensor SpdTensor::identity(int dim) {
  check_dim(dim);
  if (dim == 1) return SpdTensor(1, std::array<double, 1>{1.0});
  if (dim == 2) return SpdTensor(2, std::array<double, 3>{1.0, 0.0, 1.0});
  return SpdTensor(3, std::array<double, 6>{1.0, 0.0, 1.0, 0.0, 0.0, 1.0});
}

SpdTensor SpdTensor::diagonal(std::span<const double> diag) {
  const int dim = int(diag.size());
  check_dim(dim);
  if (dim == 1) return SpdTensor(1, std::array<double, 1>{diag[0]});
  if (dim == 2) return SpdTensor(2, std::array<double, 3>{diag[0], 0.0, diag[1]});
  return SpdTensor(3, std::array<double, 6>{diag[0], 0.0, diag[1], 0.0, 0.0, diag[2]});
}

SpdTensor SpdTensor::from_rows_2d(double m00, double m01, double m11) {
  return SpdTensor(2, std::array<double, 3>{m00, m01, m11});
}

SpdTensor SpdTensor::from_rows_3d(double m00, double m01, double m02,
                                  double m11, double m12, double m22) {
  return SpdTensor(3, std::array<double, 6>{m00, m01, m11, m02, m12, m22});
}

SpdTensor SpdTensor::from_eigen(int dim, const std::array<Vec3, 3>& basis, const Vec3& lam) {
  check_dim(dim);
  std::array<double, 6> full{};
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      double s = 0;
      for (int k = 0; k < dim; ++k) s += lam[k] * basis[k][i] * basis[k][j];
      full[pidx(i, j)] = s;
    }
  return SpdTensor(dim, std::span<const double>(full.data(), packed_size(dim)));
}

double SpdTensor::operator()(int i, int j) const { return m_[pidx(i, j)]; }

bool SpdTensor::is_diagonal() const {
  if (dim_ == 1) return true;
  if (dim_ == 2) return m_[1] == 0.0;
  return m_[1] == 0.0 && m_[3] == 0.0 && m_[4] == 0.0;
}

double SpdTensor::quadratic_form(const Vec3& u) const {
  const SpdTensor& M = *this;
  double s = 0;
  for (int i = 0; i < dim_; ++i) {
    s += M(i, i) * u[i] * u[i];
    for (int j = i + 1; j < dim_; ++j) s += 2.0 * M(i, j) * u[i] * u[j];
  }
  return s;
}

double SpdTensor::scalar_product(const Vec3& u, const Vec3& v) const {
  const SpdTensor& M = *this;
  double s = 0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) s += u[i] * M(i, j) * v[j];
  return s;
}

double SpdTensor::quadratic_form(const IVec3& u) const { return quadratic_form(to_vec(u)); }

double SpdTensor::scalar_product(const IVec3& u, const IVec3& v) const {
  return scalar_product(to_vec(u), to_vec(v));
}

double SpdTensor::determinant() const {
  const SpdTensor& M = *this;
  if (dim_ == 1) return M(0, 0);
  if (dim_ == 2) return M(0, 0) * M(1, 1) - M(0, 1) * M(0, 1);
  return M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(1, 2)) -
         M(0, 1) * (M(0, 1) * M(2, 2) - M(1, 2) * M(0, 2)) +
         M(0, 2) * (M(0, 1) * M(1, 2) - M(1, 1) * M(0, 2));
}

SpdTensor SpdTensor::inverse() const {
  const SpdTensor& M = *this;
  const double det = determinant();
  if (dim_ == 1) return SpdTensor(1, std::array<double, 1>{1.0 / det});
  if (dim_ == 2)
    return from_rows_2d(M(1, 1) / det, -M(0, 1) / det, M(0, 0) / det);
  const double c00 = M(1, 1) * M(2, 2) - M(1, 2) * M(1, 2);
  const double c01 = -(M(0, 1) * M(2, 2) - M(1, 2) * M(0, 2));
  const double c02 = M(0, 1) * M(1, 2) - M(1, 1) * M(0, 2);
  const double c11 = M(0, 0) * M(2, 2) - M(0, 2) * M(0, 2);
  const double c12 = -(M(0, 0) * M(1, 2) - M(0, 1) * M(0, 2));
  const double c22 = M(0, 0) * M(1, 1) - M(0, 1) * M(0, 1);
  return from_rows_3d(c00 / det, c01 / det, c02 / det, c11 / det, c12 / det, c22 / det);
}

Vec3 SpdTensor::eigenvalues() const {
  const SpdTensor& M = *this;
  if (dim_ == 1) return {M(0, 0), 0, 0};
  if (dim_ == 2) {
    const double mean = 0.5 * (M(0, 0) + M(1, 1));
    const double r = std::hypot(0.5 * (M(0, 0) - M(1, 1)), M(0, 1));
    return {mean - r, mean + r, 0};
  }
  // trigonometric closed form for symmetric 3x3
  const double p1 = M(0, 1) * M(0, 1) + M(0, 2) * M(0, 2) + M(1, 2) * M(1, 2);
  if (p1 == 0.0) {
    Vec3 e = {M(0, 0), M(1, 1), M(2, 2)};
    std::sort(e.begin(), e.end());
    return e;
  }
  const double q = (M(0, 0) + M(1, 1) + M(2, 2)) / 3.0;
  const double p2 = (M(0, 0) - q) * (M(0, 0) - q) + (M(1, 1) - q) * (M(1, 1) - q) +
                    (M(2, 2) - q) * (M(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  // B = (M - q I) / p, r = det(B) / 2
  auto b = [&](int i, int j) { return ((i == j ? M(i, j) - q : M(i, j))) / p; };
  const double detB = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(1, 2)) -
                      b(0, 1) * (b(0, 1) * b(2, 2) - b(1, 2) * b(0, 2)) +
                      b(0, 2) * (b(0, 1) * b(1, 2) - b(1, 1) * b(0, 2));
  const double r = std::clamp(detB / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e_hi = q + 2.0 * p * std::cos(phi);
  const double e_lo = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double e_mid = 3.0 * q - e_hi - e_lo;
  return {e_lo, e_mid, e_hi};
}

double norm(const SpdTensor& M, const Vec3& u, int udim) {
  if (udim != M.dim()) throw std::invalid_argument("norm: dimension mismatch");
  return std::sqrt(std::max(0.0, M.quadratic_form(u)));
}

double norm(const SpdTensor& M, const IVec3& u, int udim) { return norm(M, to_vec(u), udim); }

double anisotropy_ratio(const SpdTensor& M) {
  const Vec3 e = M.eigenvalues();
  const double lo = e[0], hi = e[M.dim() - 1];
  return std::sqrt(hi / lo);
}

double multiplicative_distance(const SpdTensor& M, const SpdTensor& N) {
  if (M.dim() != N.dim()) throw std::invalid_argument("multiplicative_distance: dimension mismatch");
  const int d = M.dim();
  // Cholesky N = L L^T, then eigenvalues of L^-1 M L^-T (same spectrum as N^-1 M).
  double L[3][3] = {};
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = N(i, j);
      for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      if (i == j)
        L[i][i] = std::sqrt(s);
      else
        L[i][j] = s / L[j][j];
    }
  }
  // A = L^-1 M L^-T via forward substitutions
  double B[3][3] = {};  // B = L^-1 M
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      double s = M(i, j);
      for (int k = 0; k < i; ++k) s -= L[i][k] * B[k][j];
      B[i][j] = s / L[i][i];
    }
  double A[3][3] = {};  // A = B L^-T, i.e. A^T = L^-1 B^T; A symmetric
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = B[i][j];
      for (int k = 0; k < j; ++k) s -= L[j][k] * A[i][k];
      A[i][j] = s / L[j][j];
    }
  std::array<double, 6> packed{};
  packed[0] = A[0][0];
  if (d >= 2) {
    packed[1] = 0.5 * (A[0][1] + A[1][0]);
    packed[2] = A[1][1];
  }
  if (d == 3) {
    packed[3] = 0.5 * (A[0][2] + A[2][0]);
    packed[4] = 0.5 * (A[1][2] + A[2][1]);
    packed[5] = A[2][2];
  }
  const SpdTensor pencil(d, std::span<const double>(packed.data(), SpdTensor::packed_size(d)));
  const Vec3 e = pencil.eigenvalues();
  double worst = 0;
  for (int i = 0; i < d; ++i) worst = std::max(worst, std::abs(std::log(e[i])));
  return 0.5 * worst;
}

SpdTensor rescale_by_spacing(const SpdTensor& M, const Vec3& h) {
  const int d = M.dim();
  for (int i = 0; i < d; ++i)
    if (!(h[i] > 0)) throw std::invalid_argument("rescale_by_spacing: nonpositive spacing");
  std::array<double, 6> full{};
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) full[pidx(i, j)] = h[i] * M(i, j) * h[j];
  return SpdTensor(d, std::span<const double>(full.data(), SpdTensor::packed_size(d)));
}

}  // namespace fmlbr
