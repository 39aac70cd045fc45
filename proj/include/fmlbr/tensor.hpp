#ifndef FMLBR_TENSOR_HPP
#define FMLBR_TENSOR_HPP

#include <array>
#include <cstddef>
#include <span>

namespace fmlbr {

using Vec3 = std::array<double, 3>;
using IVec3 = std::array<int, 3>;

double dot(const Vec3& a, const Vec3& b, int dim);
double euclid_norm(const Vec3& a, int dim);
Vec3 to_vec(const IVec3& v);

/// Symmetric positive definite d x d matrix, d in {1,2,3}.
/// Entries are stored packed; positive definiteness is verified on
/// construction via leading principal minors (relative tolerance 1e-12).
class SpdTensor {
 public:
  /// packed holds the upper triangle in the fixed order
  /// m00 [, m01, m11 [, m02, m12, m22]].
  SpdTensor(int dim, std::span<const double> packed);

  static SpdTensor identity(int dim);
  static SpdTensor diagonal(std::span<const double> diag);
  static SpdTensor from_rows_2d(double m00, double m01, double m11);
  static SpdTensor from_rows_3d(double m00, double m01, double m02,
                                double m11, double m12, double m22);
  /// Eigenvalues lam (ascending) with columns of basis as eigenvectors.
  static SpdTensor from_eigen(int dim, const std::array<Vec3, 3>& basis,
                              const Vec3& lam);

  int dim() const { return dim_; }
  double operator()(int i, int j) const;
  std::span<const double> packed() const { return {m_.data(), packed_size(dim_)}; }
  static std::size_t packed_size(int dim) { return std::size_t(dim) * (dim + 1) / 2; }

  bool is_diagonal() const;                 // off-diagonal entries exactly zero
  double quadratic_form(const Vec3& u) const;   // u^T M u
  double scalar_product(const Vec3& u, const Vec3& v) const;  // u^T M v
  double quadratic_form(const IVec3& u) const;
  double scalar_product(const IVec3& u, const IVec3& v) const;

  double determinant() const;
  SpdTensor inverse() const;

  /// Eigenvalues in ascending order (closed form: quadratic for d=2,
  /// trigonometric for d=3). Unused slots are zero.
  Vec3 eigenvalues() const;

 private:
  int dim_;
  std::array<double, 6> m_{};  // m00, m01, m11, m02, m12, m22
};

/// ||u||_M = sqrt(u^T M u). Throws on dimension mismatch.
double norm(const SpdTensor& M, const Vec3& u, int udim);
double norm(const SpdTensor& M, const IVec3& u, int udim);

/// kappa(M) = sqrt(lambda_max / lambda_min); >= 1, equal to 1 iff M is a
/// positive multiple of the identity.
double anisotropy_ratio(const SpdTensor& M);

/// d_x(M, N) = sup_{u != 0} |ln ||u||_M - ln ||u||_N|, computed as half the
/// largest |ln| of the generalized eigenvalues of the pencil (M, N).
double multiplicative_distance(const SpdTensor& M, const SpdTensor& N);

/// H M H with H = diag(h); maps lattice-space norms to physical norms.
SpdTensor rescale_by_spacing(const SpdTensor& M, const Vec3& h);

}  // namespace fmlbr

#endif
