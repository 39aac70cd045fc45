#include <cmath>
#include <random>

#include "doctest.h"
#include "fmlbr/lbr.hpp"
#include "fmlbr/stencil.hpp"
#include "oracles.hpp"

using namespace fmlbr;

TEST_CASE("reduce_basis on simple tensors") {
  const LatticeBasis b1 = reduce_basis(SpdTensor::identity(2));
  CHECK(b1.dim == 2);
  CHECK(std::abs(b1.determinant()) == 1);
  CHECK(norm(SpdTensor::identity(2), b1.vectors[0], 2) == doctest::Approx(1.0));
  CHECK(norm(SpdTensor::identity(2), b1.vectors[1], 2) == doctest::Approx(1.0));

  const SpdTensor D = SpdTensor::diagonal(std::array<double, 2>{9, 1});
  const LatticeBasis b2 = reduce_basis(D);
  CHECK(norm(D, b2.vectors[0], 2) == doctest::Approx(1.0));
  CHECK(norm(D, b2.vectors[1], 2) == doctest::Approx(3.0));
  CHECK(b2.vectors[0] == IVec3{0, 1, 0});
  CHECK(b2.vectors[1] == IVec3{1, 0, 0});

  const SpdTensor B = SpdTensor::from_rows_2d(1, 0.9, 1);
  const LatticeBasis b3 = reduce_basis(B);
  CHECK(B.quadratic_form(b3.vectors[0]) == doctest::Approx(0.2).epsilon(1e-12));
  const bool expected = (b3.vectors[0] == IVec3{1, -1, 0}) || (b3.vectors[0] == IVec3{-1, 1, 0});
  CHECK(expected);
}

TEST_CASE("oracle on diagonal tensors") {
  const auto n1 = oracle_reduced_norms(SpdTensor::identity(3));
  REQUIRE(n1.size() == 3);
  CHECK(n1[0] == doctest::Approx(1.0));
  CHECK(n1[1] == doctest::Approx(1.0));
  CHECK(n1[2] == doctest::Approx(1.0));

  const auto n2 = oracle_reduced_norms(SpdTensor::diagonal(std::array<double, 3>{1, 4, 9}));
  CHECK(n2[0] == doctest::Approx(1.0));
  CHECK(n2[1] == doctest::Approx(2.0));
  CHECK(n2[2] == doctest::Approx(3.0));

  CHECK_THROWS(oracle_reduced_norms(SpdTensor::diagonal(std::array<double, 2>{1, 1e8})));
}

TEST_CASE("reduction matches the exhaustive oracle") {
  std::mt19937 rng(101);
  for (int dim = 2; dim <= 3; ++dim) {
    for (int trial = 0; trial < 120; ++trial) {
      const double kappa = oracles::log_uniform_kappa(rng, 1, 100);
      const SpdTensor M = oracles::random_spd(rng, dim, kappa,
                                              oracles::log_uniform_kappa(rng, 0.2, 5));
      ReduceStats stats;
      const LatticeBasis basis = reduce_basis(M, &stats);
      CHECK(std::abs(basis.determinant()) == 1);
      CHECK(stats.iterations <= 64 + 8 * std::log(anisotropy_ratio(M)));
      const auto oracle = oracle_reduced_norms(M);
      for (int i = 0; i < dim; ++i) {
        const double got = norm(M, basis.vectors[i], dim);
        CHECK(got == doctest::Approx(oracle[i]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("reduced basis properties") {
  std::mt19937 rng(103);
  for (int dim = 2; dim <= 3; ++dim) {
    for (int trial = 0; trial < 100; ++trial) {
      const double kappa = oracles::log_uniform_kappa(rng, 1, 60);
      const SpdTensor M = oracles::random_spd(rng, dim, kappa);
      const LatticeBasis basis = reduce_basis(M);
      const double kM = anisotropy_ratio(M);
      const double n1 = norm(M, basis.vectors[0], dim);
      for (int i = 0; i < dim; ++i) {
        // euclidean and M-norm growth bounds
        CHECK(euclid_norm(to_vec(basis.vectors[i]), dim) <= kM * (1 + 1e-9));
        CHECK(norm(M, basis.vectors[i], dim) <= kM * n1 * (1 + 1e-9));
      }
      // norms are sorted
      for (int i = 0; i + 1 < dim; ++i)
        CHECK(norm(M, basis.vectors[i], dim) <= norm(M, basis.vectors[i + 1], dim) + 1e-12);
      // 2 |u_i^T M z| <= ||z||_M^2 for combinations of the other vectors
      for (int i = 0; i < dim; ++i) {
        const int others[2] = {(i + 1) % dim, (i + 2) % dim};
        const int n_others = dim - 1;
        for (int c0 = -2; c0 <= 2; ++c0)
          for (int c1 = (n_others == 2 ? -2 : 0); c1 <= (n_others == 2 ? 2 : 0); ++c1) {
            if (c0 == 0 && c1 == 0) continue;
            IVec3 z{};
            for (int a = 0; a < 3; ++a) {
              z[a] = c0 * basis.vectors[others[0]][a];
              if (n_others == 2) z[a] += c1 * basis.vectors[others[1]][a];
            }
            CHECK(2.0 * std::abs(M.scalar_product(basis.vectors[i], z)) <=
                  M.quadratic_form(z) * (1 + 1e-9));
          }
      }
    }
  }
}

TEST_CASE("basis vectors appear in meshes of nearby tensors") {
  std::mt19937 rng(107);
  std::normal_distribution<double> gauss(0, 1);
  int tested = 0;
  for (int trial = 0; trial < 400 && tested < 60; ++trial) {
    const int dim = 2 + (trial % 2);
    const SpdTensor M = oracles::random_spd(rng, dim, oracles::log_uniform_kappa(rng, 1, 6));
    const double bound = std::log(1 + std::pow(anisotropy_ratio(M), -2.0)) / 4.0;
    // random symmetric perturbation, kept within the multiplicative bound
    std::array<double, 6> entries{};
    const auto packed = M.packed();
    std::copy(packed.begin(), packed.end(), entries.begin());
    const double eps = 0.02 * bound;
    for (std::size_t i = 0; i < packed.size(); ++i) entries[i] += eps * gauss(rng);
    SpdTensor N = M;
    try {
      N = SpdTensor(dim, std::span<const double>(entries.data(), packed.size()));
    } catch (...) {
      continue;
    }
    if (multiplicative_distance(M, N) >= bound) continue;
    ++tested;
    const LatticeBasis basis = reduce_basis(M);
    const auto verts = build_reduced_mesh(N).vertex_set();
    for (int i = 0; i < dim; ++i) {
      const IVec3 u = basis.vectors[i];
      const IVec3 nu = {-u[0], -u[1], -u[2]};
      const bool has_u = std::find(verts.begin(), verts.end(), u) != verts.end();
      const bool has_nu = std::find(verts.begin(), verts.end(), nu) != verts.end();
      CHECK(has_u);
      CHECK(has_nu);
    }
  }
  CHECK(tested >= 40);
}
