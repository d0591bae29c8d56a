#include <cmath>

#include <doctest.h>

#include "table_reference.hpp"
#include "topoplasma/errors.hpp"
#include "topoplasma/invariants.hpp"

using namespace topoplasma;

TEST_CASE("analytic curvature matches the closed-form table") {
  for (double sig : {0.0, 1.0, 10.0, 0.37}) {
    for (const auto& row : table1({sig})) {
      auto want = reference_curvatures(row.phase, sig);
      for (int j = 0; j < 4; ++j) CHECK(std::abs(row.c[j] - want[j]) < 1e-10);
    }
  }
  CHECK(table1({0.0, 1.0}).size() == 16);
}

TEST_CASE("curvature with the scheme's sigma") {
  PlasmaParams p = representative_params(Phase::IIPlus);
  double sig = p.sigma_bar();
  CHECK(curvature_analytic(p, 2).value == doctest::Approx(sig / std::sqrt(sig * sig + 1)).epsilon(1e-12));
  CHECK(curvature_analytic(representative_params(Phase::IPlus, Regularization::omega_decay(0.5)), 2).value ==
        doctest::Approx(-1.0));
}

TEST_CASE("conjugation antisymmetry C_-j = -C_j") {
  PlasmaParams p = representative_params(Phase::IIPlus, Regularization::omega_decay(0.5));
  QuadratureOptions o;
  o.n_r = 48;
  o.n_theta = 48;
  o.refine = false;
  for (int j : {1, 2}) {
    double a = curvature_quadrature(p, std::vector<int>{j}, o).value;
    double b = curvature_quadrature(p, std::vector<int>{-j}, o).value;
    CHECK(std::abs(a + b) < 1e-2);
  }
}

TEST_CASE("plaquette curvature against the analytic value") {
  PlasmaParams p = representative_params(Phase::IPlus, Regularization::omega_decay(0.5));
  QuadratureOptions o;
  o.refine = false;
  CHECK(std::abs(curvature_quadrature(p, std::vector<int>{2}, o).value - (-1.0)) < 5e-3);
  CHECK(std::abs(curvature_quadrature(p, std::vector<int>{3, 4}, o).value - 0.0) < 5e-3);
}

TEST_CASE("gauge randomization leaves the plaquette sum unchanged") {
  PlasmaParams p = representative_params(Phase::IIPlus, Regularization::omega_decay(0.5));
  QuadratureOptions o;
  o.n_r = 32;
  o.n_theta = 32;
  o.refine = false;
  double base = curvature_quadrature(p, std::vector<int>{2}, o).value;
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    o.gauge_seed = seed;
    CHECK(std::abs(curvature_quadrature(p, std::vector<int>{2}, o).value - base) < 1e-10);
  }
}

TEST_CASE("angular weight of a rotation eigenvector") {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(9);
  psi(0) = 1.0 / std::sqrt(2.0);
  psi(1) = cplx(0, 1) / std::sqrt(2.0);
  CHECK(std::abs(angular_weight(psi)) == doctest::Approx(1.0));
}

TEST_CASE("transition invariants with omega decay") {
  struct Want { const char* name; int l1, l2; };
  const Want want[] = {{"I+ -> II+", 1, 0},  {"I- -> II-", -1, 0}, {"II+ -> III+", 0, -1},
                       {"II- -> III-", 0, 1}, {"I- -> I+", -2, 0}, {"II- -> II+", 0, 0},
                       {"IV- -> IV+", 0, -2}};
  auto rows = table2(Regularization::omega_decay(0.01));
  REQUIRE(rows.size() == 7);
  for (size_t i = 0; i < rows.size(); ++i) {
    CAPTURE(rows[i].transition);
    CHECK(rows[i].transition == want[i].name);
    CHECK(rows[i].ell1.value == want[i].l1);
    CHECK(rows[i].ell2.value == want[i].l2);
    CHECK(rows[i].ell1.is_bdi);
    CHECK(rows[i].ell2.is_bdi);
    CHECK(rows[i].ell1.rounding_residual < 1e-3);
    CHECK(rows[i].ell2.rounding_residual < 1e-3);
  }
}

TEST_CASE("plasma decay breaks gluing when Omega changes sign") {
  auto rows = table2(Regularization::plasma_decay(0.01));
  for (const auto& r : rows) {
    if (r.transition == "II- -> II+" || r.transition == "IV- -> IV+") {
      CAPTURE(r.transition);
      CHECK(r.ell1.raw == doctest::Approx(2.0).epsilon(1e-6));
      CHECK_FALSE(r.ell1.is_bdi);
    }
  }
}

TEST_CASE("bdi argument checks") {
  PlasmaParams a = representative_params(Phase::IPlus), b = representative_params(Phase::IIPlus);
  CHECK_THROWS_AS(bdi(a, b, 3), InvalidParameter);
  CHECK_THROWS_AS(representative_params(Phase::Boundary), InvalidParameter);
}
