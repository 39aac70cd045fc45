#include "fmlbr/cases.hpp"

#include <cmath>
#include <stdexcept>

namespace fmlbr {

namespace {

constexpr double kPi = 3.14159265358979323846;

// spiral band parameters
constexpr double kOmega2d = 6.0 * kPi;
constexpr double kBand2d = 1.0 / 100.0;   // r0 = delta0
constexpr double kOmega3d = 2.5 * kPi;
constexpr double kBand3d = 1.0 / 50.0;

SpdTensor surface_tensor(double x, double y) {
  // parametrized surface (x, y, (3/4) sin(3 pi x) sin(3 pi y)); metric F^T F
  const double gx = (9.0 * kPi / 4.0) * std::cos(3 * kPi * x) * std::sin(3 * kPi * y);
  const double gy = (9.0 * kPi / 4.0) * std::sin(3 * kPi * x) * std::cos(3 * kPi * y);
  return SpdTensor::from_rows_2d(1.0 + gx * gx, gx * gy, 1.0 + gy * gy);
}

SpdTensor seismic_tensor(double x) {
  // layered medium: front speeds 0.8 along the layer tangent
  // (1, (pi/2) cos(4 pi x)) and 0.2 across, metric eigenvalues 1/speed^2
  const double wy = (kPi / 2.0) * std::cos(4 * kPi * x);
  const double nn = std::sqrt(1.0 + wy * wy);
  const Vec3 along = {1.0 / nn, wy / nn, 0};
  const Vec3 across = {-along[1], along[0], 0};
  return SpdTensor::from_eigen(2, {along, across, Vec3{}},
                               {1.0 / (0.8 * 0.8), 1.0 / (0.2 * 0.2), 0});
}

// rank-one anisotropic tensor: eigenvalue eps2 along dir, 1 on the complement
SpdTensor band_tensor(int dim, const Vec3& dir, double eps2) {
  Vec3 t = dir;
  const double nn = euclid_norm(t, dim);
  for (int a = 0; a < dim; ++a) t[a] /= nn;
  std::array<double, 6> full{};
  // I + (eps2 - 1) t t^T
  const int order[3][3] = {{0, 1, 3}, {1, 2, 4}, {3, 4, 5}};
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      full[order[i][j]] = (i == j ? 1.0 : 0.0) + (eps2 - 1.0) * t[i] * t[j];
  return SpdTensor(dim, std::span<const double>(full.data(), SpdTensor::packed_size(dim)));
}

}  // namespace

std::optional<std::pair<double, double>> spiral2d_band(const Vec3& z) {
  // Gamma(t) = t (cos w t, sin w t); band points are (t + r)(cos w t, sin w t)
  // with t in [0,1], r in [0, r0]; candidates t share the polar angle of z
  const double rho = std::hypot(z[0], z[1]);
  if (rho > 1.0 + kBand2d) return std::nullopt;
  double phi = std::atan2(z[1], z[0]);
  if (phi < 0) phi += 2 * kPi;
  for (int k = 0;; ++k) {
    const double t = (phi + 2 * kPi * k) / kOmega2d;
    if (t > 1.0 + 1e-15) break;
    const double r = rho - t;
    if (r >= 0 && r <= kBand2d) return std::make_pair(std::min(t, 1.0), r);
  }
  return std::nullopt;
}

namespace {

std::optional<double> spiral3d_band(const Vec3& z) {
  // Gamma(t) = (cos w t, sin w t, t), t in [0, 3]; band membership via
  // lambda = rho - 1, mu = h - t, lambda^2 + mu^2 <= (r0/2)^2
  const double rho = std::hypot(z[0], z[1]);
  const double lam = rho - 1.0;
  const double half = kBand3d / 2.0;
  if (std::abs(lam) > half) return std::nullopt;
  double phi = std::atan2(z[1], z[0]);
  if (phi < 0) phi += 2 * kPi;
  for (int k = 0;; ++k) {
    const double t = (phi + 2 * kPi * k) / kOmega3d;
    if (t > 3.0 + 1e-15) break;
    const double mu = z[2] - t;
    if (lam * lam + mu * mu <= half * half) return std::min(t, 3.0);
  }
  return std::nullopt;
}

}  // namespace

CaseSpec make_case(CaseId id, double theta, const std::optional<SpdTensor>& constant) {
  CaseSpec s;
  s.id = id;
  s.theta = theta;
  switch (id) {
    case CaseId::Surface:
    case CaseId::SurfaceRotated:
      s.dim = 2;
      s.lo = {-0.5, -0.5, 0};
      s.hi = {0.5, 0.5, 0};
      s.default_dims = {292, 292, 1};
      s.seed_point = {0, 0, 0};
      s.geodesic_start = {0.4, 0.4, 0};
      break;
    case CaseId::Seismic:
      s.dim = 2;
      s.lo = {-0.5, -0.5, 0};
      s.hi = {0.5, 0.5, 0};
      s.default_dims = {193, 193, 1};
      s.seed_point = {0, 0, 0};
      s.geodesic_start = {0.4, 0.4, 0};
      break;
    case CaseId::Spiral2d:
      s.dim = 2;
      s.lo = {-1.1, -1.1, 0};
      s.hi = {1.1, 1.1, 0};
      s.default_dims = {500, 500, 1};
      s.seed_point = {0, 0, 0};
      s.geodesic_start = {1.0, -1.0, 0};
      break;
    case CaseId::Spiral3d:
      s.dim = 3;
      s.lo = {-1.1, -1.1, 0};
      s.hi = {1.1, 1.1, 3.0};
      s.default_dims = {200, 200, 272};
      s.seed_point = {0, 0, 0};
      s.geodesic_start = {0, 0, 3.0};
      break;
    case CaseId::Constant:
      if (!constant) throw std::invalid_argument("make_case: constant case needs a tensor");
      s.dim = constant->dim();
      s.constant_tensor = constant;
      for (int a = 0; a < s.dim; ++a) {
        s.lo[a] = -0.5;
        s.hi[a] = 0.5;
        s.default_dims[a] = 129;
      }
      for (int a = s.dim; a < 3; ++a) s.default_dims[a] = 1;
      s.seed_point = {0, 0, 0};
      s.geodesic_start = {0.4, s.dim >= 2 ? 0.4 : 0.0, s.dim >= 3 ? 0.4 : 0.0};
      break;
  }
  return s;
}

std::string case_name(CaseId id) {
  switch (id) {
    case CaseId::Surface: return "surface";
    case CaseId::SurfaceRotated: return "surface-rotated";
    case CaseId::Seismic: return "seismic";
    case CaseId::Spiral2d: return "spiral2d";
    case CaseId::Spiral3d: return "spiral3d";
    default: return "constant";
  }
}

CaseSpec make_case(const std::string& name, double theta,
                   const std::optional<SpdTensor>& constant) {
  if (name == "surface") return make_case(CaseId::Surface, theta, constant);
  if (name == "surface-rotated") return make_case(CaseId::SurfaceRotated, theta, constant);
  if (name == "seismic") return make_case(CaseId::Seismic, theta, constant);
  if (name == "spiral2d") return make_case(CaseId::Spiral2d, theta, constant);
  if (name == "spiral3d") return make_case(CaseId::Spiral3d, theta, constant);
  if (name == "constant") return make_case(CaseId::Constant, theta, constant);
  throw std::invalid_argument("unknown case: " + name);
}

SpdTensor case_metric(const CaseSpec& spec, const Vec3& z) {
  for (int a = 0; a < spec.dim; ++a)
    if (z[a] < spec.lo[a] - 1e-12 || z[a] > spec.hi[a] + 1e-12)
      throw std::invalid_argument("case_metric: point outside the domain");
  switch (spec.id) {
    case CaseId::Surface:
      return surface_tensor(z[0], z[1]);
    case CaseId::SurfaceRotated: {
      // pullback about the domain center: R^T M(R z) R
      const double c = std::cos(spec.theta), s = std::sin(spec.theta);
      const double rx = c * z[0] - s * z[1];
      const double ry = s * z[0] + c * z[1];
      const SpdTensor M = surface_tensor(rx, ry);
      const double a = M(0, 0), b = M(0, 1), e = M(1, 1);
      // R^T M R with R = [[c, -s], [s, c]]
      const double m00 = c * (a * c + b * s) + s * (b * c + e * s);
      const double m01 = c * (b * c + e * s) - s * (a * c + b * s);
      const double m11 = -s * (b * c - a * s) + c * (e * c - b * s);
      return SpdTensor::from_rows_2d(m00, m01, m11);
    }
    case CaseId::Seismic:
      return seismic_tensor(z[0]);
    case CaseId::Spiral2d: {
      const auto band = spiral2d_band(z);
      if (!band) return SpdTensor::identity(2);
      const double t = band->first;
      // tangent of Gamma(t) = t (cos w t, sin w t)
      const double cw = std::cos(kOmega2d * t), sw = std::sin(kOmega2d * t);
      const Vec3 tangent = {cw - t * kOmega2d * sw, sw + t * kOmega2d * cw, 0};
      return band_tensor(2, tangent, kBand2d * kBand2d);
    }
    case CaseId::Spiral3d: {
      const auto t_opt = spiral3d_band(z);
      if (!t_opt) return SpdTensor::identity(3);
      const double t = *t_opt;
      const double cw = std::cos(kOmega3d * t), sw = std::sin(kOmega3d * t);
      const Vec3 tangent = {-kOmega3d * sw, kOmega3d * cw, 1.0};
      return band_tensor(3, tangent, kBand3d * kBand3d);
    }
    default:
      return *spec.constant_tensor;
  }
}

MetricGrid sample_metric(const CaseSpec& spec, const std::array<int, 3>& dims) {
  MetricGrid grid(spec.dim, dims, spec.lo, spec.hi);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    grid.set_tensor(i, case_metric(spec, grid.position(grid.coords(i))));
  return grid;
}

}  // namespace fmlbr
