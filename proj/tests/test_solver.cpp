#include <cmath>
#include <random>

#include "doctest.h"
#include "fmlbr/bench.hpp"
#include "fmlbr/cases.hpp"
#include "fmlbr/solver.hpp"
#include "oracles.hpp"

using namespace fmlbr;

namespace {

// smooth anisotropic field used across solver tests
MetricGrid smooth_random_grid(int n, double kappa_max, unsigned seed) {
  MetricGrid grid(2, {n, n, 1}, Vec3{-0.5, -0.5, 0}, Vec3{0.5, 0.5, 0});
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0, 2 * M_PI);
  const double p1 = uni(rng), p2 = uni(rng), p3 = uni(rng);
  for (std::int64_t i = 0; i < grid.node_count(); ++i) {
    const Vec3 p = grid.position(grid.coords(i));
    const double theta = p1 + std::sin(2 * M_PI * p[0] + p2) + std::cos(2 * M_PI * p[1] + p3);
    const double blend = 0.5 + 0.5 * std::sin(2 * M_PI * p[0] + p3) * std::sin(2 * M_PI * p[1] + p1);
    const double kappa = 1.0 + (kappa_max - 1.0) * blend;
    const Vec3 slow = {std::cos(theta), std::sin(theta), 0};
    const Vec3 fast = {-slow[1], slow[0], 0};
    grid.set_tensor(i, SpdTensor::from_eigen(2, {slow, fast, Vec3{}},
                                             {1.0 / (kappa * kappa), 1.0, 0}));
  }
  return grid;
}

}  // namespace

TEST_CASE("one update from the seed") {
  const CaseSpec spec = make_case(CaseId::Constant, 0, SpdTensor::identity(2));
  const MetricGrid grid = sample_metric(spec, {9, 9, 1});
  const std::int64_t center = grid.index({4, 4, 0});
  const DistanceField f = solve_fmlbr(grid, {{center, 0.0}});
  const double h = grid.spacing()[0];
  CHECK(f.values[grid.index({5, 4, 0})] == doctest::Approx(h).epsilon(1e-12));
  CHECK(f.values[grid.index({4, 3, 0})] == doctest::Approx(h).epsilon(1e-12));
  CHECK(f.stats.unreached == 0);
  CHECK(f.stats.monotone_acceptance);
  CHECK_THROWS(solve_fmlbr(grid, {}));
}

TEST_CASE("axis values are exact chains") {
  const CaseSpec spec = make_case(CaseId::Constant, 0, SpdTensor::identity(2));
  const MetricGrid grid = sample_metric(spec, {17, 17, 1});
  const std::int64_t center = grid.index({8, 8, 0});
  const DistanceField f = solve_fmlbr(grid, {{center, 0.0}});
  const double h = grid.spacing()[0];
  for (int k = 1; k <= 8; ++k) {
    CHECK(f.values[grid.index({8 + k, 8, 0})] == doctest::Approx(k * h).epsilon(1e-12));
    CHECK(f.values[grid.index({8, 8 - k, 0})] == doctest::Approx(k * h).epsilon(1e-12));
  }
}

TEST_CASE("fmlbr equals the fixed point iteration oracle") {
  const CaseSpec spec = make_case(CaseId::Constant, 0, SpdTensor::identity(2));
  const MetricGrid grid = sample_metric(spec, {9, 9, 1});
  const std::int64_t center = grid.index({4, 4, 0});
  const DistanceField f = solve_fmlbr(grid, {{center, 0.0}});
  // the same operator, iterated to convergence on the axis stencil
  const DistanceField ref =
      oracles::sweep_to_convergence(grid, axis_mesh(2), {{center, 0.0}}, 1e-13);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    CHECK(f.values[i] == doctest::Approx(ref.values[i]).epsilon(1e-10));
}

TEST_CASE("fmlbr on a smooth anisotropic field") {
  const MetricGrid grid = smooth_random_grid(33, 10.0, 404);
  const GridStencils st = build_grid_stencils(grid);
  const std::int64_t center = grid.index({16, 16, 0});
  const DistanceField f = solve_fmlbr(grid, {{center, 0.0}}, &st);
  CHECK(f.stats.monotone_acceptance);
  const double residual = fixed_point_residual(f, st, grid);
  CHECK(residual <= 1e-9 * f.max_finite());

  // perturbing one node breaks the fixed point nearby
  DistanceField g = f;
  std::int64_t victim = grid.index({20, 16, 0});
  g.values[victim] += 1.0;
  CHECK(fixed_point_residual(g, st, grid) >= 0.5);
}

TEST_CASE("fixed stencil solvers") {
  // diagonal metric: FM-LBR selects the axis stencil, so FM4 matches exactly
  const CaseSpec spec = make_case(CaseId::Constant, 0, SpdTensor::diagonal(std::array<double, 2>{1, 4}));
  const MetricGrid grid = sample_metric(spec, {21, 21, 1});
  const std::int64_t center = grid.index({10, 10, 0});
  const DistanceField a = solve_fmlbr(grid, {{center, 0.0}});
  const DistanceField b = solve_fixed_stencil(grid, FixedStencil::FM4, {{center, 0.0}});
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));

  // FM8 runs on metrics beyond its anisotropy bound (no causality there, so
  // acceptance monotonicity is not guaranteed, only completion)
  const MetricGrid rough = smooth_random_grid(17, 6.0, 505);
  const DistanceField c = solve_fixed_stencil(rough, FixedStencil::FM8, {{rough.index({8, 8, 0}), 0.0}});
  CHECK(c.stats.unreached == 0);
}

TEST_CASE("agsi fixed point and oracle comparison") {
  // isotropic 5x5: values along axes and main diagonals match FM8 chains
  const CaseSpec spec = make_case(CaseId::Constant, 0, SpdTensor::identity(2));
  const MetricGrid grid = sample_metric(spec, {5, 5, 1});
  const std::int64_t center = grid.index({2, 2, 0});
  const double tol = 1e-8;
  const DistanceField a = solve_agsi(grid, {{center, 0.0}}, tol);
  const DistanceField b = solve_fixed_stencil(grid, FixedStencil::FM8, {{center, 0.0}});
  for (int k = 1; k <= 2; ++k) {
    for (const IVec3& c : {IVec3{2 + k, 2, 0}, IVec3{2 - k, 2, 0}, IVec3{2, 2 + k, 0},
                           IVec3{2, 2 - k, 0}, IVec3{2 + k, 2 + k, 0}, IVec3{2 - k, 2 - k, 0}}) {
      const std::int64_t i = grid.index(c);
      CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-7));
    }
  }

  // the AGSI field is a fixed point of its own ring stencils
  CHECK(agsi_residual(a, grid) <= tol);

  // rotated constant metric vs plain sweeping run to a much tighter tolerance
  const SpdTensor M = SpdTensor::from_eigen(
      2, {Vec3{std::cos(M_PI / 6), std::sin(M_PI / 6), 0},
          Vec3{-std::sin(M_PI / 6), std::cos(M_PI / 6), 0}, Vec3{}},
      {0.25, 1.0, 0});
  const CaseSpec spec2 = make_case(CaseId::Constant, 0, M);
  const MetricGrid grid2 = sample_metric(spec2, {33, 33, 1});
  const std::int64_t center2 = grid2.index({16, 16, 0});
  const DistanceField g1 = solve_agsi(grid2, {{center2, 0.0}}, tol);
  const DistanceField g2 = oracles::sweep_to_convergence(grid2, agsi_ring_mesh(2),
                                                         {{center2, 0.0}}, 1e-12, 20000, true);
  for (std::int64_t i = 0; i < grid2.node_count(); ++i)
    CHECK(std::abs(g1.values[i] - g2.values[i]) <= 10 * tol);
}

TEST_CASE("agsi in three dimensions") {
  // diagonal metric: the Kuhn link is acute for it, so the AGSI fixed point
  // agrees with the sweeping oracle on the same ring
  const CaseSpec spec =
      make_case(CaseId::Constant, 0, SpdTensor::diagonal(std::array<double, 3>{1, 2, 4}));
  const MetricGrid grid = sample_metric(spec, {9, 9, 9});
  const std::int64_t center = grid.index({4, 4, 4});
  const double tol = 1e-8;
  const DistanceField a = solve_agsi(grid, {{center, 0.0}}, tol);
  CHECK(agsi_residual(a, grid) <= tol);
  const DistanceField b =
      oracles::sweep_to_convergence(grid, agsi_ring_mesh(3), {{center, 0.0}}, 1e-12);
  for (std::int64_t i = 0; i < grid.node_count(); ++i)
    CHECK(std::abs(a.values[i] - b.values[i]) <= 10 * tol);
}

TEST_CASE("agsi ring mesh shape") {
  const StencilMesh ring2 = agsi_ring_mesh(2);
  CHECK(ring2.simplices.size() == 6);
  CHECK(ring2.vertex_set().size() == 6);
  const StencilMesh ring3 = agsi_ring_mesh(3);
  CHECK(ring3.simplices.size() == 24);
  CHECK(ring3.vertex_set().size() == 14);
}

TEST_CASE("seeds keep their values and multiple seeds work") {
  const CaseSpec spec = make_case(CaseId::Constant, 0, SpdTensor::identity(2));
  const MetricGrid grid = sample_metric(spec, {11, 11, 1});
  const std::vector<Seed> seeds = {{grid.index({2, 2, 0}), 0.0}, {grid.index({8, 8, 0}), 0.1}};
  const DistanceField f = solve_fmlbr(grid, seeds);
  CHECK(f.values[seeds[0].node] == 0.0);
  CHECK(f.values[seeds[1].node] == 0.1);
  CHECK(f.stats.monotone_acceptance);
  // a node between the two seeds sees the cheaper source
  const double h = grid.spacing()[0];
  CHECK(f.values[grid.index({3, 2, 0})] == doctest::Approx(h).epsilon(1e-12));
}

TEST_CASE("fm8 and fmlbr errors agree within a factor on mild anisotropy") {
  // constant metric with kappa inside the FM8 bound: both stencils are
  // reduced for it, so the errors against the exact distance stay comparable
  std::mt19937 rng(909);
  for (int trial = 0; trial < 3; ++trial) {
    const double kappa = 1.0 + (1.0 + std::sqrt(2.0) - 1.0) * 0.9;
    const SpdTensor M = oracles::random_spd(rng, 2, kappa);
    const CaseSpec spec = make_case(CaseId::Constant, 0, M);
    const MetricGrid grid = sample_metric(spec, {65, 65, 1});
    const std::int64_t center = grid.index({32, 32, 0});
    const DistanceField a = solve_fmlbr(grid, {{center, 0.0}});
    const DistanceField b = solve_fixed_stencil(grid, FixedStencil::FM8, {{center, 0.0}});
    double ea = 0, eb = 0;
    for (std::int64_t i = 0; i < grid.node_count(); ++i) {
      if (!std::isfinite(a.values[i]) || !std::isfinite(b.values[i])) continue;
      const Vec3 p = grid.position(grid.coords(i));
      const double exact = norm(M, p, 2);
      ea = std::max(ea, std::abs(a.values[i] - exact));
      eb = std::max(eb, std::abs(b.values[i] - exact));
    }
    CHECK(ea <= 3.0 * eb);
    CHECK(eb <= 3.0 * ea);
  }
}

TEST_CASE("heap accounting stays within the reversed-stencil budget") {
  const MetricGrid grid = smooth_random_grid(33, 6.0, 111);
  const GridStencils st = build_grid_stencils(grid);
  const DistanceField f = solve_fmlbr(grid, {{grid.index({16, 16, 0}), 0.0}}, &st);
  CHECK(f.stats.heap_pops <= f.stats.heap_pushes);
  CHECK(f.stats.heap_pushes <= std::int64_t(st.rev_nodes.size()) + grid.node_count());
  CHECK(f.stats.accepted + f.stats.unreached == grid.node_count());
}

TEST_CASE("3d solve on a constant metric") {
  std::mt19937 rng(707);
  const SpdTensor M = oracles::random_spd(rng, 3, 3.0);
  const CaseSpec spec = make_case(CaseId::Constant, 0, M);
  const MetricGrid grid = sample_metric(spec, {15, 15, 15});
  const std::int64_t center = grid.index({7, 7, 7});
  const GridStencils st = build_grid_stencils(grid);
  const DistanceField f = solve_fmlbr(grid, {{center, 0.0}}, &st);
  CHECK(f.stats.monotone_acceptance);
  CHECK(fixed_point_residual(f, st, grid) <= 1e-9 * f.max_finite());
  // clipping may disconnect a few corner nodes; they stay at +inf and are
  // counted, everything else approximates the exact distance from above
  CHECK(f.stats.unreached <= st.empty_nodes);
  CHECK(st.empty_nodes <= 8);
  double worst_rel = 0;
  for (std::int64_t i = 0; i < grid.node_count(); ++i) {
    if (i == center || !std::isfinite(f.values[i])) continue;
    const Vec3 p = grid.position(grid.coords(i));
    const double exact = norm(M, p, 3);
    CHECK(f.values[i] >= exact - 1e-9);
    if (exact > 5 * grid.spacing()[0]) worst_rel = std::max(worst_rel, (f.values[i] - exact) / exact);
  }
  CHECK(worst_rel < 0.2);
}
