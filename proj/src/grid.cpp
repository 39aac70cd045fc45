#include "fmlbr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fmlbr {

MetricGrid::MetricGrid(int dim, const std::array<int, 3>& dims, const Vec3& lo, const Vec3& hi)
    : dim_(dim), dims_(dims), lo_(lo), hi_(hi) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("MetricGrid: dim must be 1, 2 or 3");
  n_nodes_ = 1;
  for (int a = 0; a < dim; ++a) {
    if (dims[a] < 2) throw std::invalid_argument("MetricGrid: need at least 2 nodes per axis");
    if (!(hi[a] > lo[a])) throw std::invalid_argument("MetricGrid: empty box");
    h_[a] = (hi[a] - lo[a]) / (dims[a] - 1);
    n_nodes_ *= dims[a];
  }
  tsize_ = SpdTensor::packed_size(dim);
  entries_.assign(std::size_t(n_nodes_) * tsize_, 0.0);
  // default to the identity metric
  const SpdTensor id = SpdTensor::identity(dim);
  for (std::int64_t i = 0; i < n_nodes_; ++i) set_tensor(i, id);
}

IVec3 MetricGrid::nearest_node(const Vec3& p) const {
  IVec3 c{};
  for (int a = 0; a < dim_; ++a) {
    const int i = int(std::lround((p[a] - lo_[a]) / h_[a]));
    c[a] = std::clamp(i, 0, dims_[a] - 1);
  }
  return c;
}

void MetricGrid::set_tensor(std::int64_t idx, const SpdTensor& M) {
  if (M.dim() != dim_) throw std::invalid_argument("MetricGrid::set_tensor: dimension mismatch");
  const auto packed = M.packed();
  std::copy(packed.begin(), packed.end(), entries_.begin() + idx * tsize_);
}

SpdTensor MetricGrid::tensor(std::int64_t idx) const {
  return SpdTensor(dim_, std::span<const double>(entries_.data() + idx * tsize_, tsize_));
}

SpdTensor MetricGrid::scaled_tensor(std::int64_t idx) const {
  return rescale_by_spacing(tensor(idx), h_);
}

bool MetricGrid::tensor_is_diagonal(std::int64_t idx) const {
  const double* e = entries_.data() + idx * tsize_;
  if (dim_ == 1) return true;
  if (dim_ == 2) return e[1] == 0.0;
  return e[1] == 0.0 && e[3] == 0.0 && e[4] == 0.0;
}

SpdTensor MetricGrid::interpolated_tensor(const Vec3& p) const {
  IVec3 base{};
  Vec3 frac{};
  for (int a = 0; a < dim_; ++a) {
    double t = (p[a] - lo_[a]) / h_[a];
    t = std::clamp(t, 0.0, double(dims_[a] - 1));
    int i = int(std::floor(t));
    i = std::min(i, dims_[a] - 2);
    base[a] = i;
    frac[a] = t - i;
  }
  std::array<double, 6> acc{};
  const int corners = 1 << dim_;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    IVec3 node = base;
    for (int a = 0; a < dim_; ++a) {
      if (c & (1 << a)) {
        node[a] += 1;
        w *= frac[a];
      } else {
        w *= 1.0 - frac[a];
      }
    }
    if (w == 0.0) continue;
    const double* e = entries_.data() + index(node) * tsize_;
    for (std::size_t k = 0; k < tsize_; ++k) acc[k] += w * e[k];
  }
  return SpdTensor(dim_, std::span<const double>(acc.data(), tsize_));
}

}  // namespace fmlbr
