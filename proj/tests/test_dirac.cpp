#include <cmath>

#include <doctest.h>

#include "topoplasma/dirac.hpp"
#include "topoplasma/errors.hpp"

using namespace topoplasma;

namespace {

PlasmaParams minus_point() { return {1.0, transition_frequencies(1.0, 2.0).first, 2.0, {}}; }
PlasmaParams plus_point() { return {1.0, transition_frequencies(1.0, 1.0).second, 1.0, {}}; }

}  // namespace

TEST_CASE("reduced model coefficients") {
  DiracModel m = reduce_minus(minus_point());
  CHECK(m.omega_star == doctest::Approx(transition_frequencies(1.0, 2.0).first));
  CHECK(m.alpha > 0);
  CHECK(m.identity_coeff() == doctest::Approx(0.5 - m.beta / (m.alpha * m.alpha)));
  Eigen::Matrix2cd s = m.symbol(0.3, -0.2);
  CHECK((s - s.adjoint()).norm() < 1e-14);
  CHECK_THROWS_AS(reduce_minus({0.0, 1.0, 2.0, {}}), NotApplicable);
  CHECK_THROWS_AS(reduce_minus({1.0, 1.0, 0.0, {}}), NotApplicable);
}

TEST_CASE("gap overlap split") {
  CHECK(gap_overlap(reduce_minus(minus_point())));
  CHECK_FALSE(gap_overlap(reduce_plus(plus_point())));
}

TEST_CASE("reduction fidelity is second order") {
  for (bool plus : {false, true}) {
    PlasmaParams p = plus ? plus_point() : minus_point();
    double e1 = reduction_error(p, plus, 1e-2, 0.3, 0.0);
    double e2 = reduction_error(p, plus, 5e-3, 0.3, 0.0);
    CHECK(std::log2(e1 / e2) > 1.8);
    double f1 = reduction_error(p, plus, 0.0, 0.0, 1e-2);
    double f2 = reduction_error(p, plus, 0.0, 0.0, 5e-3);
    CHECK(std::log2(f1 / f2) > 1.8);
  }
  PlasmaParams q = minus_point();
  q.omega_c = -1.0;
  double e1 = reduction_error(q, false, 1e-2, 1.1, 0.0), e2 = reduction_error(q, false, 5e-3, 1.1, 0.0);
  CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("dirac bdi agrees with the regularized curvature difference") {
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int mn : {-1, 1})
        for (int ms : {-1, 1}) {
          DiracSide n{1.0 * sx, 1.0 * sy, 0.8 * mn, 0.0};
          DiracSide s{1.0 * sx, 1.0 * sy, 0.8 * ms, 0.0};
          double oracle = dirac_lower_band_curvature(s, 0.3, 96, 96) - dirac_lower_band_curvature(n, 0.3, 96, 96);
          CAPTURE(sx);
          CAPTURE(sy);
          CAPTURE(mn);
          CAPTURE(ms);
          CHECK(std::abs(dirac_bdi(n, s).value - oracle) < 1e-2);
        }
  CHECK_THROWS_AS(dirac_bdi({1, 1, 0, 0}, {1, 1, 1, 0}), NotApplicable);
}

TEST_CASE("reduced I+/II+ interface has bdi +1") {
  PlasmaParams s = minus_point(), n = minus_point();
  s.omega_p *= 0.9;
  n.omega_p *= 1.1;
  CHECK(dirac_bdi(side_of(reduce_minus(n)), side_of(reduce_minus(s))).value == 1);
}

TEST_CASE("dirac matrix is Hermitian") {
  for (auto sch : {DiracScheme::Staggered, DiracScheme::Centered}) {
    DiracProfile dp = dirac_domain_wall(1.0, 60, 10.0);
    dp.scheme = sch;
    Eigen::MatrixXcd H = build_dirac_matrix(dp, 0.4);
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
  }
  CHECK(parse_dirac_scheme("centered") == DiracScheme::Centered);
  CHECK_THROWS_AS(parse_dirac_scheme("upwind"), InvalidParameter);
}

TEST_CASE("domain wall flow equals its bdi") {
  DiracProfile dp = dirac_domain_wall(1.0, 200, 20.0);
  auto recs = dirac_interface_spectrum(dp, symmetric_grid(3.0, 60));
  EdgeReport rep = spectral_flow(recs, {1, -0.9, 0.9, true});
  DiracBdi b = dirac_bdi({1, 1, 1, 0}, {1, 1, -1, 0});
  CHECK(rep.flow == b.value);
  CHECK(rep.flow == -1);
}

TEST_CASE("singular model I has no flow but a nonzero bdi") {
  DiracProfile dp = dirac_singular_one(1.0, 200, 20.0);
  auto recs = dirac_interface_spectrum(dp, symmetric_grid(3.0, 60));
  EdgeReport rep = spectral_flow(recs, {1, -0.9, 0.9, true});
  CHECK(rep.flow == 0);
  CHECK(dirac_bdi({1, 1, 1, 0}, {-1, 1, 1, 0}).value == -1);
}

TEST_CASE("weyl residual decreases and ignores xi") {
  double r4 = weyl_residual({4.0, 0.0, 0.0, {}});
  double r8 = weyl_residual({8.0, 0.0, 0.0, {}});
  CHECK(r8 < r4);
  CHECK(std::abs(weyl_residual({8.0, 0.0, 1.5, {}}) - r8) < 0.05 * r8);
  CHECK_THROWS_AS(weyl_residual({2.0, 0.0, 0.0, {}}), InvalidParameter);
  CHECK_THROWS_AS(weyl_residual({4.0, 0.0, 0.0, 1.0}), ResolutionError);
}
