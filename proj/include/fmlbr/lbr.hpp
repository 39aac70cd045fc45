#ifndef FMLBR_LBR_HPP
#define FMLBR_LBR_HPP

#include <array>
#include <vector>

#include "fmlbr/tensor.hpp"

namespace fmlbr {

/// Unimodular basis of the integer lattice, sorted by M-norm when produced
/// by reduce_basis.
struct LatticeBasis {
  int dim = 0;
  std::array<IVec3, 3> vectors{};  // u1..ud, unused rows zero

  long long determinant() const;
};

struct ReduceStats {
  int iterations = 0;  // Gauss steps in 2d, outer loop passes in 3d
};

/// Computes an M-reduced basis: u_k minimizes ||.||_M over lattice vectors
/// outside the sublattice of u_1..u_{k-1}. Gauss's algorithm in 2d, greedy
/// (Minkowski) reduction in 3d. Iteration count is O(1 + ln kappa(M));
/// throws if the limit 64 + 8 ln kappa(M) is exceeded.
LatticeBasis reduce_basis(const SpdTensor& M, ReduceStats* stats = nullptr);

/// Brute-force successive minima norms over ||z||_inf <= ceil(kappa(M)),
/// excluding the sublattice of previously chosen vectors (exact integer
/// membership tests). Verification oracle; requires kappa(M) <= 1e3.
std::vector<double> oracle_reduced_norms(const SpdTensor& M);

}  // namespace fmlbr

#endif
