#ifndef FMLBR_GRID_HPP
#define FMLBR_GRID_HPP

#include <cstdint>
#include <vector>

#include "fmlbr/tensor.hpp"

namespace fmlbr {

/// Rectangular node-centered grid over a box, one SPD tensor per node.
/// Nodes lie at lo + i * h per axis with h = (hi - lo) / (n - 1), so both
/// box faces carry nodes. Flat indices run x-fastest.
class MetricGrid {
 public:
  MetricGrid(int dim, const std::array<int, 3>& dims, const Vec3& lo, const Vec3& hi);

  int dim() const { return dim_; }
  const std::array<int, 3>& dims() const { return dims_; }
  std::int64_t node_count() const { return n_nodes_; }
  const Vec3& lower() const { return lo_; }
  const Vec3& upper() const { return hi_; }
  const Vec3& spacing() const { return h_; }

  std::int64_t index(const IVec3& c) const {
    std::int64_t idx = c[dim_ - 1];
    for (int a = dim_ - 2; a >= 0; --a) idx = idx * dims_[a] + c[a];
    return idx;
  }
  IVec3 coords(std::int64_t idx) const {
    IVec3 c{};
    for (int a = 0; a < dim_; ++a) {
      c[a] = int(idx % dims_[a]);
      idx /= dims_[a];
    }
    return c;
  }
  bool in_grid(const IVec3& c) const {
    for (int a = 0; a < dim_; ++a)
      if (c[a] < 0 || c[a] >= dims_[a]) return false;
    return true;
  }
  Vec3 position(const IVec3& c) const {
    Vec3 p{};
    for (int a = 0; a < dim_; ++a) p[a] = lo_[a] + c[a] * h_[a];
    return p;
  }
  /// Grid node nearest to a physical point (clamped to the box).
  IVec3 nearest_node(const Vec3& p) const;

  void set_tensor(std::int64_t idx, const SpdTensor& M);
  SpdTensor tensor(std::int64_t idx) const;
  /// Tensor rescaled by the grid spacing: integer-offset quadratic forms
  /// under it equal physical norms under the stored tensor.
  SpdTensor scaled_tensor(std::int64_t idx) const;
  bool tensor_is_diagonal(std::int64_t idx) const;

  /// Packed tensor entries interpolated multilinearly at a physical point
  /// (clamped to the box).
  SpdTensor interpolated_tensor(const Vec3& p) const;

 private:
  int dim_;
  std::array<int, 3> dims_;
  Vec3 lo_, hi_, h_;
  std::int64_t n_nodes_;
  std::size_t tsize_;
  std::vector<double> entries_;  // packed per node
};

}  // namespace fmlbr

#endif
