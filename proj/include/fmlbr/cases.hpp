#ifndef FMLBR_CASES_HPP
#define FMLBR_CASES_HPP

#include <optional>
#include <string>

#include "fmlbr/grid.hpp"

namespace fmlbr {

enum class CaseId { Surface, SurfaceRotated, Seismic, Spiral2d, Spiral3d, Constant };

/// Closed-form benchmark metric field, samplable onto any grid.
struct CaseSpec {
  CaseId id = CaseId::Surface;
  int dim = 2;
  double theta = 0;  // rotation angle (SurfaceRotated)
  std::optional<SpdTensor> constant_tensor;
  Vec3 lo{}, hi{};
  std::array<int, 3> default_dims{};
  Vec3 seed_point{};
  Vec3 geodesic_start{};
};

CaseSpec make_case(CaseId id, double theta = 0,
                   const std::optional<SpdTensor>& constant = std::nullopt);
CaseSpec make_case(const std::string& name, double theta = 0,
                   const std::optional<SpdTensor>& constant = std::nullopt);
std::string case_name(CaseId id);

/// Metric tensor at a physical point (throws outside the domain box).
SpdTensor case_metric(const CaseSpec& spec, const Vec3& z);

/// Evaluates case_metric at every node of a grid with the given dims.
MetricGrid sample_metric(const CaseSpec& spec, const std::array<int, 3>& dims);

/// Spiral band parameters for the membership test, exposed for verification:
/// returns (t, r) when z lies in the anisotropy band of the 2d spiral.
std::optional<std::pair<double, double>> spiral2d_band(const Vec3& z);

}  // namespace fmlbr

#endif
