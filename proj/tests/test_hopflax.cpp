#include <cmath>
#include <random>

#include "doctest.h"
#include "fmlbr/cases.hpp"
#include "fmlbr/hopflax.hpp"
#include "oracles.hpp"

using namespace fmlbr;

TEST_CASE("facet solve closed forms") {
  double gram[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const double d0[1] = {0};
  const FacetResult r1 = facet_solve(gram, d0, 1);
  CHECK(r1.value == doctest::Approx(1.0));
  CHECK(r1.weights[0] == doctest::Approx(1.0));

  const double d2[2] = {0, 0};
  const FacetResult r2 = facet_solve(gram, d2, 2);
  CHECK(r2.value == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
  CHECK(r2.weights[0] == doctest::Approx(0.5));
  CHECK(r2.weights[1] == doctest::Approx(0.5));

  // interior solution with asymmetric values: larger quadratic root
  const double d3[2] = {0, 0.9};
  const FacetResult r3 = facet_solve(gram, d3, 2);
  CHECK(r3.value == doctest::Approx((1.8 + std::sqrt(4.76)) / 4).epsilon(1e-12));
  CHECK(r3.weights[0] > 0);
  CHECK(r3.weights[1] > 0);
  CHECK(r3.weights[0] == doctest::Approx(r3.value / (2 * r3.value - 0.9)).epsilon(1e-9));

  // far value: falls back to the nearer sub-facet
  const double d4[2] = {0, 10};
  const FacetResult r4 = facet_solve(gram, d4, 2);
  CHECK(r4.value == doctest::Approx(1.0));
  CHECK(r4.mask == 1);
  CHECK(r4.weights[0] == doctest::Approx(1.0));
  CHECK(r4.weights[1] == 0.0);
}

TEST_CASE("facet solve matches the sampling oracle") {
  std::mt19937 rng(307);
  std::uniform_real_distribution<double> uval(0.0, 2.0);
  for (int trial = 0; trial < 400; ++trial) {
    const int k = 1 + (trial % 3);
    const SpdTensor M = oracles::random_spd(rng, std::max(k, 2),
                                            oracles::log_uniform_kappa(rng, 1, 10),
                                            oracles::log_uniform_kappa(rng, 0.3, 3));
    // gram of k independent random integer offsets under M
    IVec3 offs[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    if (k >= 2) offs[1] = {trial % 5 == 0 ? 1 : 0, 1, 0};
    double gram[3][3];
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) gram[i][j] = M.scalar_product(offs[i], offs[j]);
    double delta[3];
    for (int i = 0; i < k; ++i) delta[i] = uval(rng);

    const FacetResult got = facet_solve(gram, delta, k);
    const double ref = oracles::facet_min_by_sampling(gram, delta, k);
    CHECK(got.value == doctest::Approx(ref).epsilon(1e-6));

    // causality holds on acute grams (nonnegative pairwise products)
    bool acute = true;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) acute = acute && gram[i][j] >= 0;
    if (acute)
      for (int i = 0; i < k; ++i)
        if (got.weights[i] > 0) CHECK(got.value > delta[i]);

    // scale equivariance
    double gram_c[3][3];
    double delta_c[3];
    const double c = 3.7;
    for (int i = 0; i < k; ++i) {
      delta_c[i] = c * delta[i];
      for (int j = 0; j < k; ++j) gram_c[i][j] = c * c * gram[i][j];
    }
    CHECK(facet_solve(gram_c, delta_c, k).value == doctest::Approx(c * got.value).epsilon(1e-10));
  }
}

TEST_CASE("facet solve monotone in the inputs") {
  std::mt19937 rng(311);
  std::uniform_real_distribution<double> uval(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + (trial % 2);
    const SpdTensor M = oracles::random_spd(rng, 3, oracles::log_uniform_kappa(rng, 1, 8));
    IVec3 offs[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    double gram[3][3];
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) gram[i][j] = M.scalar_product(offs[i], offs[j]);
    double delta[3];
    for (int i = 0; i < k; ++i) delta[i] = uval(rng);
    const double base = facet_solve(gram, delta, k).value;
    delta[trial % k] += 0.25;
    CHECK(facet_solve(gram, delta, k).value >= base - 1e-12);
  }
}

TEST_CASE("stencil update on the axis stencil") {
  const CaseSpec spec = make_case(CaseId::Constant, 0, SpdTensor::identity(2));
  const MetricGrid grid = sample_metric(spec, {5, 5, 1});
  const GridStencils st = build_grid_stencils(grid);
  const double h = grid.spacing()[0];

  std::vector<double> values(grid.node_count(), std::numeric_limits<double>::infinity());
  const std::int64_t center = grid.index({2, 2, 0});
  const std::int64_t east = grid.index({3, 2, 0});
  const std::int64_t north = grid.index({2, 3, 0});

  // only one neighbor known: one-vertex facet
  values[east] = 0;
  FacetSolution sol = stencil_update(values, center, st, grid);
  CHECK(sol.value == doctest::Approx(h).epsilon(1e-12));
  CHECK(sol.k == 1);

  // two axis neighbors at zero: the symmetric two-vertex facet
  values[north] = 0;
  sol = stencil_update(values, center, st, grid);
  CHECK(sol.value == doctest::Approx(h * std::sqrt(2.0) / 2).epsilon(1e-12));
  CHECK(sol.k == 2);

  // filter: restricted to facets through a given accepted node
  std::vector<std::uint8_t> accepted(grid.node_count(), 0);
  accepted[east] = 1;
  UpdateFilter filter{accepted.data(), east};
  sol = stencil_update(values, center, st, grid, filter);
  CHECK(sol.value == doctest::Approx(h).epsilon(1e-12));

  accepted[north] = 1;
  sol = stencil_update(values, center, st, grid, filter);
  CHECK(sol.value == doctest::Approx(h * std::sqrt(2.0) / 2).epsilon(1e-12));

  // y accepted only: k = 1 facet gives d(y) + ||y - x||
  values[north] = 0.3;
  accepted[north] = 0;
  sol = stencil_update(values, center, st, grid, filter);
  CHECK(sol.value == doctest::Approx(h).epsilon(1e-12));
}

TEST_CASE("stencil update against a boundary sampling oracle") {
  std::mt19937 rng(313);
  std::uniform_real_distribution<double> uval(0.0, 0.5);
  const SpdTensor M = oracles::random_spd(rng, 2, 4.0);
  const CaseSpec spec = make_case(CaseId::Constant, 0, M);
  const MetricGrid grid = sample_metric(spec, {7, 7, 1});
  const GridStencils st = build_grid_stencils(grid);
  const std::int64_t center = grid.index({3, 3, 0});

  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values(grid.node_count(), std::numeric_limits<double>::infinity());
    const int nv = st.vertex_count(center);
    const IVec3 c = grid.coords(center);
    for (int t = 0; t < nv; ++t) {
      const IVec3 off = st.vertex_offset(center, t);
      values[grid.index({c[0] + off[0], c[1] + off[1], 0})] = uval(rng);
    }
    const FacetSolution got = stencil_update(values, center, st, grid);

    // brute force: per simplex, dense sampling of the boundary facet
    double ref = std::numeric_limits<double>::infinity();
    const SpdTensor Ms = grid.scaled_tensor(center);
    for (int s = 0; s < st.simplex_count(center); ++s) {
      const auto sv = st.simplex(center, s);
      double gram[3][3];
      double delta[3];
      IVec3 offs[3];
      for (int i = 0; i < 2; ++i) {
        offs[i] = st.vertex_offset(center, sv[i]);
        delta[i] = values[grid.index({c[0] + offs[i][0], c[1] + offs[i][1], 0})];
      }
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) gram[i][j] = Ms.scalar_product(offs[i], offs[j]);
      ref = std::min(ref, oracles::facet_min_by_sampling(gram, delta, 2));
    }
    CHECK(got.value == doctest::Approx(ref).epsilon(1e-6));
  }
}
