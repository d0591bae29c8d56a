#include "topoplasma/invariants.hpp"

#include <cmath>
#include <random>

#include "topoplasma/errors.hpp"
#include "topoplasma/parallel.hpp"

namespace topoplasma {

namespace {

const cplx I(0.0, 1.0);

Eigen::VectorXcd apply_j(const Eigen::VectorXcd& psi) {
  Eigen::VectorXcd out(psi.size());
  for (int b = 0; b < 3; ++b) {
    out(3 * b + 0) = -psi(3 * b + 1);
    out(3 * b + 1) = psi(3 * b + 0);
    out(3 * b + 2) = 0.0;
  }
  return out;
}

Eigen::MatrixXcd band_frame(const PlasmaParams& p, double kx, double ky, const std::vector<int>& bands) {
  Eigen::SelfAdjointEigenSolver<Matrix9c> es(build_bulk_hamiltonian_xy(p, kx, ky));
  if (es.info() != Eigen::Success) throw NumericalFailure("bulk eigensolve failed");
  Eigen::MatrixXcd f(9, bands.size());
  for (size_t a = 0; a < bands.size(); ++a) f.col(a) = es.eigenvectors().col(bands[a] + 4);
  return f;
}

cplx link(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.cols() == 1) return a.col(0).dot(b.col(0));
  return (a.adjoint() * b).determinant();
}

double quadrature_once(const PlasmaParams& p, const std::vector<int>& bands, double K, int nr, int nt,
                       double rmin, int threads, std::optional<std::uint64_t> seed) {
  std::vector<double> r(nr);
  for (int i = 0; i < nr; ++i) r[i] = rmin * std::pow(K / rmin, static_cast<double>(i) / (nr - 1));
  std::vector<std::vector<Eigen::MatrixXcd>> v(nr, std::vector<Eigen::MatrixXcd>(nt));
  parallel_for(nr, threads, [&](std::size_t i) {
    for (int j = 0; j < nt; ++j) {
      double th = 2.0 * M_PI * j / nt;
      v[i][j] = band_frame(p, r[i] * std::cos(th), r[i] * std::sin(th), bands);
      if (seed) {
        std::mt19937_64 rng(*seed ^ (0x9e3779b97f4a7c15ULL * (i * nt + j + 1)));
        std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
        for (int c = 0; c < v[i][j].cols(); ++c) v[i][j].col(c) *= std::exp(I * u(rng));
      }
    }
  });
  auto checked = [&](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, int i, int j) {
    cplx u = link(a, b);
    if (std::abs(u) < 1e-6)
      throw NumericalFailure("vanishing eigenvector overlap near r=" + std::to_string(r[i]) +
                             ", theta index " + std::to_string(j) + " (near-degenerate bands)");
    return u;
  };
  std::vector<double> ring(nr, 0.0);
  parallel_for(nr - 1, threads, [&](std::size_t i) {
    double s = 0.0;
    for (int j = 0; j < nt; ++j) {
      int jn = (j + 1) % nt;
      cplx w = checked(v[i][j], v[i + 1][j], i, j) * checked(v[i + 1][j], v[i + 1][jn], i + 1, j) *
               checked(v[i + 1][jn], v[i][jn], i, jn) * checked(v[i][jn], v[i][j], i, j);
      s += std::arg(w);
    }
    ring[i] = s;
  });
  cplx center = 1.0;
  for (int j = 0; j < nt; ++j) {
    center *= checked(v[0][j], v[0][(j + 1) % nt], 0, j);
    center /= std::abs(center);
  }
  double total = std::arg(center);
  for (int i = 0; i + 1 < nr; ++i) total += ring[i];
  return -total / (2.0 * M_PI);
}

}  // namespace

double angular_weight(const Eigen::VectorXcd& psi) {
  return std::real(I * psi.dot(apply_j(psi)));
}

CurvatureResult curvature_analytic(const PlasmaParams& p, int band, std::optional<double> sigma_bar) {
  p.validate();
  if (std::abs(band) > 4) throw InvalidParameter("band must be in -4..4");
  CurvatureResult res;
  res.band = band;
  res.method = CurvatureMethod::Analytic;
  if (band == 0) return res;
  if (band < 0) {
    res = curvature_analytic(p, -band, sigma_bar);
    res.band = band;
    res.value = -res.value;
    return res;
  }
  if (classify_phase(p) == Phase::Boundary) throw NotApplicable("parameters on a phase boundary");
  if (std::abs(p.k_z) < 1e-12 && (band == 1 || band == 3)) return res;

  Eigen::SelfAdjointEigenSolver<Matrix9c> es(build_bulk_hamiltonian_xy(p, 0.0, 0.0));
  const auto& w = es.eigenvalues();
  const int idx = band + 4;
  const double tol = 1e-9 * std::max(1.0, std::abs(w(idx)));
  if (w(idx) - w(idx - 1) < tol || (idx < 8 && w(idx + 1) - w(idx) < tol))
    throw NotApplicable("band is degenerate at k = 0");
  double w0 = angular_weight(es.eigenvectors().col(idx));
  double winf = angular_weight(limiting_eigenvector(p, 0.0, band, sigma_bar));
  res.value = winf - w0;
  return res;
}

double default_kcut(const PlasmaParams& p) {
  double k = 1e3 * std::max({std::abs(p.omega_c), p.omega_p, std::abs(p.k_z), 1.0});
  if (p.reg.kind != RegKind::None) k *= std::max(1.0, 1.0 / std::sqrt(p.reg.eta));
  return k;
}

CurvatureResult curvature_quadrature(const PlasmaParams& p, const std::vector<int>& bands,
                                     const QuadratureOptions& opt) {
  p.validate();
  if (bands.empty()) throw InvalidParameter("no bands selected");
  for (int b : bands)
    if (std::abs(b) > 4) throw InvalidParameter("band must be in -4..4");
  if (opt.n_r < 8 || opt.n_theta < 8) throw InvalidParameter("quadrature grids too small");
  double K = opt.K_cut > 0 ? opt.K_cut : default_kcut(p);
  if (!(K > opt.r_min)) throw InvalidParameter("K_cut must exceed r_min");
  CurvatureResult res;
  res.band = bands.front();
  res.method = CurvatureMethod::Quadrature;
  res.value = quadrature_once(p, bands, K, opt.n_r, opt.n_theta, opt.r_min, opt.threads, opt.gauge_seed);
  if (opt.refine) {
    double fine = quadrature_once(p, bands, K, 2 * opt.n_r, 2 * opt.n_theta, opt.r_min, opt.threads,
                                  opt.gauge_seed);
    res.residual = std::abs(fine - res.value);
    res.value = fine;
  }
  return res;
}

CurvatureResult curvature_quadrature(const PlasmaParams& p, int band, double K_cut, int n_r, int n_theta) {
  QuadratureOptions o;
  o.K_cut = K_cut;
  o.n_r = n_r;
  o.n_theta = n_theta;
  return curvature_quadrature(p, std::vector<int>{band}, o);
}

GluingReport check_gluing(const PlasmaParams& pN, const PlasmaParams& pS, int ell) {
  pN.validate();
  pS.validate();
  if (ell != 1 && ell != 2) throw InvalidParameter("ell must be 1 or 2");
  if (std::abs(pN.k_z - pS.k_z) > 1e-12) throw InvalidParameter("north and south k_z differ");
  if (pN.reg.kind != pS.reg.kind) throw InvalidParameter("north and south regularization kinds differ");
  GluingReport g;
  g.ell = ell;
  for (int j = ell + 1; j <= 4; ++j) g.bands.push_back(j);
  g.band_mismatch.assign(g.bands.size(), 0.0);
  const int nth = 16;
  for (int t = 0; t < nth; ++t) {
    double th = 2.0 * M_PI * t / nth;
    Matrix9c qn = Matrix9c::Zero(), qs = Matrix9c::Zero();
    for (size_t a = 0; a < g.bands.size(); ++a) {
      Vector9c vn = limiting_eigenvector(pN, th, g.bands[a]);
      Vector9c vs = limiting_eigenvector(pS, th, g.bands[a]);
      Matrix9c pn = vn * vn.adjoint(), ps = vs * vs.adjoint();
      g.band_mismatch[a] = std::max(g.band_mismatch[a], (pn - ps).norm());
      qn += pn;
      qs += ps;
    }
    g.projector_mismatch = std::max(g.projector_mismatch, (qn - qs).norm());
  }
  g.glued = g.projector_mismatch < 1e-8;
  return g;
}

BdiResult bdi(const PlasmaParams& pN, const PlasmaParams& pS, int ell) {
  BdiResult r;
  r.ell = ell;
  r.gluing = check_gluing(pN, pS, ell);
  double sn = 0.0, ss = 0.0;
  for (int j = ell + 1; j <= 4; ++j) {
    sn += curvature_analytic(pN, j).value;
    ss += curvature_analytic(pS, j).value;
  }
  r.raw = sn - ss;
  r.value = static_cast<int>(std::lround(r.raw));
  r.rounding_residual = std::abs(r.raw - r.value);
  r.is_bdi = r.gluing.glued;
  return r;
}

PlasmaParams representative_params(Phase ph, const Regularization& reg) {
  const double wm = transition_frequencies(1.0, 2.0).first;
  const double wpl = transition_frequencies(1.0, 1.0).second;
  int s = phase_sign(ph);
  switch (ph) {
    case Phase::IPlus:
    case Phase::IMinus: return {1.0 * s, 0.5 * wm, 2.0, reg};
    case Phase::IIPlus:
    case Phase::IIMinus: return {1.0 * s, 1.5 * wm, 2.0, reg};
    case Phase::IIIPlus:
    case Phase::IIIMinus: return {1.0 * s, 1.5 * wpl, 1.0, reg};
    case Phase::IVPlus:
    case Phase::IVMinus: return {1.0 * s, 1.0, 0.0, reg};
    case Phase::Boundary: break;
  }
  throw InvalidParameter("no representative parameters for a boundary");
}

std::vector<Table2Row> table2(const Regularization& scheme) {
  const double wm = transition_frequencies(1.0, 2.0).first;
  const double wpl = transition_frequencies(1.0, 1.0).second;
  std::vector<Table2Row> rows;
  auto add = [&](std::string name, PlasmaParams s, PlasmaParams n) {
    rows.push_back({std::move(name), s, n, bdi(n, s, 1), bdi(n, s, 2)});
  };
  add("I+ -> II+", {1, 0.5 * wm, 2, scheme}, {1, 1.5 * wm, 2, scheme});
  add("I- -> II-", {-1, 0.5 * wm, 2, scheme}, {-1, 1.5 * wm, 2, scheme});
  add("II+ -> III+", {1, 0.5 * wpl, 1, scheme}, {1, 1.5 * wpl, 1, scheme});
  add("II- -> III-", {-1, 0.5 * wpl, 1, scheme}, {-1, 1.5 * wpl, 1, scheme});
  add("I- -> I+", {-1, 0.5 * wm, 2, scheme}, {1, 0.5 * wm, 2, scheme});
  add("II- -> II+", {-0.75, 1, 2, scheme}, {0.75, 1, 2, scheme});
  add("IV- -> IV+", {-1, 1, 0, scheme}, {1, 1, 0, scheme});
  return rows;
}

std::vector<Table1Row> table1(const std::vector<double>& sigma_bars) {
  std::vector<Table1Row> rows;
  for (double sig : sigma_bars) {
    for (Phase ph : {Phase::IPlus, Phase::IIPlus, Phase::IIIPlus, Phase::IVPlus, Phase::IMinus,
                     Phase::IIMinus, Phase::IIIMinus, Phase::IVMinus}) {
      PlasmaParams p = representative_params(ph);
      Table1Row row{ph, sig, {}};
      for (int j = 1; j <= 4; ++j) row.c[j - 1] = curvature_analytic(p, j, sig).value;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace topoplasma
