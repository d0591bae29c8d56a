#include "topoplasma/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topoplasma/banded.hpp"
#include "topoplasma/errors.hpp"
#include "topoplasma/parallel.hpp"

namespace topoplasma {

namespace {

const cplx I(0.0, 1.0);

int sgn(double x) { return (x > 0) - (x < 0); }

void check_crossing(const PlasmaParams& p) {
  p.validate();
  if (p.omega_c == 0.0) throw NotApplicable("Dirac reduction needs Omega != 0");
  if (p.k_z == 0.0) throw NotApplicable("Dirac reduction needs k_z != 0");
}

double bump(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

double bump_norm() {
  static const double norm = [] {
    const int n = 20000;
    double acc = 0.0;
    for (int i = 1; i < n; ++i) {
      double s = -1.0 + 2.0 * i / n;
      acc += bump(s) * bump(s);
    }
    return std::sqrt(acc * 2.0 / n);
  }();
  return norm;
}

}  // namespace

std::string to_string(DiracKind k) {
  switch (k) {
    case DiracKind::MinusCrossing: return "minus";
    case DiracKind::MinusCrossingNegOmega: return "minus-negative-omega";
    case DiracKind::PlusCrossing: return "plus";
  }
  return "?";
}

double DiracModel::identity_coeff() const {
  double r = beta / (alpha * alpha);
  return which == DiracKind::PlusCrossing ? 0.5 + r : 0.5 - r;
}

double DiracModel::sigma3_coeff() const {
  double r = beta / (alpha * alpha);
  return which == DiracKind::PlusCrossing ? 0.5 - r : 0.5 + r;
}

Eigen::Matrix2d DiracModel::velocity_matrix() const {
  // rows: sigma_1, sigma_2; columns: kx, ky
  Eigen::Matrix2d v = Eigen::Matrix2d::Zero();
  const double c = 1.0 / (std::sqrt(2.0) * alpha);
  switch (which) {
    case DiracKind::MinusCrossing:
      v(0, 1) = -c;
      v(1, 0) = -c;
      break;
    case DiracKind::MinusCrossingNegOmega:
      v(0, 1) = -c;
      v(1, 0) = c;
      break;
    case DiracKind::PlusCrossing:
      v(0, 1) = c;
      v(1, 0) = -c;
      break;
  }
  return v;
}

Eigen::Matrix2cd DiracModel::symbol(double kx, double ky) const {
  Eigen::Matrix2d v = velocity_matrix();
  double d1 = v(0, 0) * kx + v(0, 1) * ky;
  double d2 = v(1, 0) * kx + v(1, 1) * ky;
  double m = sigma3_coeff() * omega_tilde;
  double e0 = omega_star + identity_coeff() * omega_tilde;
  Eigen::Matrix2cd s;
  s << e0 + m, cplx(d1, -d2), cplx(d1, d2), e0 - m;
  return s;
}

DiracModel reduce_minus(const PlasmaParams& p) {
  check_crossing(p);
  const double a = std::abs(p.k_z / p.omega_c);
  DiracModel m;
  m.alpha = std::sqrt(4.0 + 3.0 * a * a - a * std::sqrt(a * a + 4.0));
  m.omega_star = transition_frequencies(p.omega_c, p.k_z).first;
  m.beta = 2.0 * m.omega_star / std::abs(p.omega_c);
  m.omega_tilde = p.omega_p - m.omega_star;
  m.which = p.omega_c > 0 ? DiracKind::MinusCrossing : DiracKind::MinusCrossingNegOmega;
  return m;
}

DiracModel reduce_plus(const PlasmaParams& p) {
  check_crossing(p);
  const double a = std::abs(p.k_z / p.omega_c);
  DiracModel m;
  m.alpha = std::sqrt(4.0 + 3.0 * a * a + std::sqrt(a * a * a * a + 4.0 * a * a));
  m.omega_star = transition_frequencies(p.omega_c, p.k_z).second;
  m.beta = 2.0 * m.omega_star / std::abs(p.omega_c);
  m.omega_tilde = p.omega_p - m.omega_star;
  m.which = DiracKind::PlusCrossing;
  return m;
}

bool gap_overlap(const DiracModel& m) { return std::abs(m.identity_coeff()) < std::abs(m.sigma3_coeff()); }

double reduction_error(const PlasmaParams& p, bool plus, double kappa, double theta, double omega_tilde) {
  DiracModel d = plus ? reduce_plus(p) : reduce_minus(p);
  d.omega_tilde = omega_tilde;
  PlasmaParams q = p;
  q.omega_p = d.omega_star + omega_tilde;
  q.reg = {};
  double kx = kappa * std::cos(theta), ky = kappa * std::sin(theta);
  Eigen::SelfAdjointEigenSolver<Matrix9c> es(build_bulk_hamiltonian_xy(q, kx, ky), Eigen::EigenvaluesOnly);
  std::vector<double> w(es.eigenvalues().data(), es.eigenvalues().data() + 9);
  std::sort(w.begin(), w.end(),
            [&](double a, double b) { return std::abs(a - d.omega_star) < std::abs(b - d.omega_star); });
  std::sort(w.begin(), w.begin() + 2);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> ds(d.symbol(kx, ky), Eigen::EigenvaluesOnly);
  return std::max(std::abs(ds.eigenvalues()(0) - w[0]), std::abs(ds.eigenvalues()(1) - w[1]));
}

std::string to_string(DiracScheme s) { return s == DiracScheme::Staggered ? "staggered" : "centered"; }

DiracScheme parse_dirac_scheme(const std::string& s) {
  if (s == "staggered") return DiracScheme::Staggered;
  if (s == "centered") return DiracScheme::Centered;
  throw InvalidParameter("unknown Dirac scheme '" + s + "'");
}

DiracProfile dirac_domain_wall(double mass, int N, double L, double width) {
  DiracProfile d;
  d.m = [=](double y) { return mass * (2.0 * periodic_step(y, L, width) - 1.0); };
  d.N = N;
  d.L = L;
  d.tag = "domain-wall";
  return d;
}

DiracProfile dirac_singular_one(double mass, int N, double L, double width) {
  DiracProfile d;
  d.v_x = [=](double y) { return 2.0 * periodic_step(y, L, width) - 1.0; };
  d.m = [=](double) { return mass; };
  d.N = N;
  d.L = L;
  d.tag = "singular-1";
  return d;
}

DiracProfile dirac_singular_two(int N, double L) {
  DiracProfile d;
  d.v_x = [](double y) { return y; };
  d.v_y = [](double y) { return std::abs(y); };
  d.m = [](double y) { return std::abs(y); };
  d.N = N;
  d.L = L;
  d.tag = "singular-2";
  return d;
}

Eigen::MatrixXcd build_dirac_matrix(const DiracProfile& dp, double xi) {
  if (dp.N < 8) throw InvalidParameter("Dirac grid needs N >= 8");
  if (!(dp.L > 0)) throw InvalidParameter("Dirac half-period L must be positive");
  if (dp.eta < 0) throw InvalidParameter("eta must be >= 0");
  const int N = dp.N;
  const double dy = 2.0 * dp.L / N;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
  std::vector<double> vx(N), vy(N), m(N), V(N);
  for (int i = 0; i < N; ++i) {
    double y = -dp.L + i * dy;
    vx[i] = dp.v_x(y);
    vy[i] = dp.v_y(y);
    m[i] = dp.m(y);
    V[i] = dp.V(y);
    if (!std::isfinite(vx[i]) || !std::isfinite(vy[i]) || !std::isfinite(m[i]) || !std::isfinite(V[i]))
      throw InvalidParameter("Dirac profile is not finite at y=" + std::to_string(y));
  }
  const double lap = dp.eta / (dy * dy);
  for (int i = 0; i < N; ++i) {
    const int ip = (i + 1) % N;
    const int a = 2 * i, b = 2 * ip;
    double mz = m[i] + dp.eta * xi * xi + 2.0 * lap;
    H(a, a) += V[i] + mz;
    H(a + 1, a + 1) += V[i] - mz;
    H(a, a + 1) += vx[i] * xi;
    H(a + 1, a) += vx[i] * xi;
    H(a, b) -= lap;
    H(b, a) -= lap;
    H(a + 1, b + 1) += lap;
    H(b + 1, a + 1) += lap;
    const double v = 0.5 * (vy[i] + vy[ip]);
    if (dp.scheme == DiracScheme::Staggered) {
      H(a, a + 1) += v / dy;
      H(a, b + 1) -= v / dy;
      H(a + 1, a) += v / dy;
      H(b + 1, a) -= v / dy;
    } else {
      // (-i/2)(v d + d v) with centered differences, times sigma_2
      cplx c = -I * v / (2.0 * dy);
      H(a, b + 1) += c * -I;
      H(a + 1, b) += c * I;
      H(b, a + 1) += std::conj(c) * -I;
      H(b + 1, a) += std::conj(c) * I;
    }
  }
  return H;
}

std::vector<SweepRecord> dirac_interface_spectrum(const DiracProfile& dp, const std::vector<double>& xi_grid,
                                                  int threads, double loc_window, double w_edge) {
  if (xi_grid.empty()) throw InvalidParameter("xi grid is empty");
  const int N = dp.N;
  const double dy = 2.0 * dp.L / N;
  std::vector<int> bin(N);
  for (int s = 0; s < N; ++s) {
    double u = std::abs(-dp.L + s * dy) / dp.L;
    bin[s] = std::min(kHistBins - 1, static_cast<int>(u * kHistBins));
  }
  std::vector<SweepRecord> out(xi_grid.size());
  parallel_for(out.size(), threads, [&](std::size_t k) {
    Eigen::MatrixXcd H = build_dirac_matrix(dp, xi_grid[k]);
    Eigen::VectorXd w;
    dense_eigensolve(H, w);
    SweepRecord& rec = out[k];
    rec.kx = xi_grid[k];
    rec.eigenvalues = w;
    const int n = 2 * N;
    rec.weights0.resize(n);
    rec.weightsL.resize(n);
    rec.kept.assign(n, 1);
    rec.modes.reserve(n);
    for (int j = 0; j < n; ++j) {
      ModeProfile mp{j, {}};
      std::array<double, kHistBins> acc{};
      double total = 0.0;
      for (int s = 0; s < N; ++s) {
        double d = H.col(j).segment(2 * s, 2).squaredNorm();
        acc[bin[s]] += d;
        total += d;
      }
      for (int b = 0; b < kHistBins; ++b) mp.hist[b] = static_cast<float>(acc[b] / total);
      rec.weights0[j] = window_weight(mp, 0.0, loc_window);
      rec.weightsL[j] = window_weight(mp, 1.0 - w_edge, 1.0);
      rec.modes.push_back(mp);
    }
  });
  return out;
}

DiracSide side_of(const DiracModel& m) {
  Eigen::Matrix2d v = m.velocity_matrix();
  DiracSide s;
  s.v_x = v.col(0).norm();
  s.v_y = sgn(v.determinant()) * v.col(1).norm();
  s.m = m.sigma3_coeff() * m.omega_tilde;
  s.offset = m.omega_star + m.identity_coeff() * m.omega_tilde;
  return s;
}

GapInterval dirac_common_gap(const DiracSide& north, const DiracSide& south) {
  GapInterval g;
  g.lo = std::max(north.offset - std::abs(north.m), south.offset - std::abs(south.m));
  g.hi = std::min(north.offset + std::abs(north.m), south.offset + std::abs(south.m));
  g.global = g.hi > g.lo;
  return g;
}

DiracProfile dirac_interface(const DiracSide& north, const DiracSide& south, int N, double L, double width) {
  if (std::abs(north.v_x - south.v_x) > 1e-12 || std::abs(north.v_y - south.v_y) > 1e-12)
    throw InvalidParameter("dirac_interface needs equal velocities on both sides");
  DiracProfile d;
  d.v_x = [v = north.v_x](double) { return v; };
  d.v_y = [v = north.v_y](double) { return v; };
  d.m = [=](double y) { return south.m + (north.m - south.m) * periodic_step(y, L, width); };
  d.V = [=](double y) { return south.offset + (north.offset - south.offset) * periodic_step(y, L, width); };
  d.N = N;
  d.L = L;
  d.tag = "reduced";
  return d;
}

DiracBdi dirac_bdi(const DiracSide& north, const DiracSide& south) {
  for (const DiracSide* s : {&north, &south}) {
    if (s->m == 0.0) throw NotApplicable("Dirac mass vanishes (phase boundary)");
    if (s->v_x == 0.0 || s->v_y == 0.0) throw NotApplicable("Dirac velocity vanishes");
  }
  DiracBdi r;
  int jn = sgn(north.v_x * north.v_y), js = sgn(south.v_x * south.v_y);
  r.raw = 0.5 * kDiracSign * (sgn(north.m) * jn - sgn(south.m) * js);
  r.value = static_cast<int>(std::lround(r.raw));
  r.velocity_flip = jn != js;
  return r;
}

double dirac_lower_band_curvature(const DiracSide& side, double eta, int n_r, int n_theta) {
  if (!(eta > 0)) throw InvalidParameter("curvature oracle needs eta > 0");
  const double scale = std::max({std::abs(side.m) / eta, std::abs(side.v_x), std::abs(side.v_y), 1.0});
  const double K = 200.0 * scale, rmin = 1e-4;
  auto vec = [&](double kx, double ky) {
    Eigen::Matrix2cd h;
    double d1 = side.v_x * kx, d2 = side.v_y * ky, d3 = side.m + eta * (kx * kx + ky * ky);
    h << d3, cplx(d1, -d2), cplx(d1, d2), -d3;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
    return Eigen::Vector2cd(es.eigenvectors().col(0));
  };
  std::vector<double> r(n_r);
  for (int i = 0; i < n_r; ++i) r[i] = rmin * std::pow(K / rmin, static_cast<double>(i) / (n_r - 1));
  std::vector<std::vector<Eigen::Vector2cd>> v(n_r, std::vector<Eigen::Vector2cd>(n_theta));
  for (int i = 0; i < n_r; ++i)
    for (int j = 0; j < n_theta; ++j) {
      double th = 2.0 * M_PI * j / n_theta;
      v[i][j] = vec(r[i] * std::cos(th), r[i] * std::sin(th));
    }
  double total = 0.0;
  cplx center = 1.0;
  for (int j = 0; j < n_theta; ++j) {
    center *= v[0][j].dot(v[0][(j + 1) % n_theta]);
    center /= std::abs(center);
  }
  total += std::arg(center);
  for (int i = 0; i + 1 < n_r; ++i)
    for (int j = 0; j < n_theta; ++j) {
      int jn = (j + 1) % n_theta;
      cplx w = v[i][j].dot(v[i + 1][j]) * v[i + 1][j].dot(v[i + 1][jn]) * v[i + 1][jn].dot(v[i][jn]) *
               v[i][jn].dot(v[i][j]);
      total += std::arg(w);
    }
  return -total / (2.0 * M_PI);
}

double weyl_spacing(const WeylProbe& probe) { return std::min(0.05, 0.1 / std::max(1.0, std::abs(probe.E))); }

double weyl_residual(const WeylProbe& probe) {
  if (probe.Nscale < 4.0) throw InvalidParameter("Nscale must be >= 4");
  const double hmax = weyl_spacing(probe);
  const double N = probe.Nscale;
  double h = hmax;
  if (probe.spacing) {
    if (!(*probe.spacing > 0)) throw InvalidParameter("z spacing must be positive");
    if (*probe.spacing > hmax * (1.0 + 1e-12))
      throw ResolutionError("z spacing " + std::to_string(*probe.spacing) + " exceeds " + std::to_string(hmax) +
                            " needed to resolve the bump and the oscillation at E=" + std::to_string(probe.E));
    h = *probe.spacing;
  }
  const long M = static_cast<long>(std::ceil(4.0 * N / h));
  h = 4.0 * N / M;
  const double chi0 = 1.0 / bump_norm();
  const Eigen::Vector2cd u = Eigen::Vector2cd(1.0, I) / std::sqrt(2.0);
  auto phi = [&](long k) -> Eigen::Vector2cd {
    if (k < 0 || k > M) return Eigen::Vector2cd::Zero();
    double z = -4.0 * N + k * h;
    return chi0 * bump(z / N + 2.0) / std::sqrt(N) * std::exp(I * probe.E * z) * u;
  };
  double res2 = 0.0, norm2 = 0.0;
  for (long k = 0; k <= M; ++k) {
    double z = -4.0 * N + k * h;
    Eigen::Vector2cd f = phi(k);
    // fourth-order centered derivative
    Eigen::Vector2cd df = (phi(k - 2) - 8.0 * phi(k - 1) + 8.0 * phi(k + 1) - phi(k + 2)) / (12.0 * h);
    double ez = std::exp(z);
    Eigen::Vector2cd r;
    r(0) = ez * (probe.xi * f(1) + f(0)) + (-I) * (-I) * df(1) - probe.E * f(0);
    r(1) = ez * (probe.xi * f(0) - f(1)) + (-I) * (I)*df(0) - probe.E * f(1);
    res2 += r.squaredNorm();
    norm2 += f.squaredNorm();
  }
  if (norm2 == 0.0) throw NumericalFailure("Weyl state vanished on the grid");
  return std::sqrt(res2 / norm2);
}

}  // namespace topoplasma
