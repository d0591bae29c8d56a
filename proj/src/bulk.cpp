#include "topoplasma/bulk.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "topoplasma/errors.hpp"

namespace topoplasma {

namespace {

const cplx I(0.0, 1.0);

bool finite(double x) { return std::isfinite(x); }

Matrix9c block_diag(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b, const Eigen::Matrix3d& c) {
  Matrix9c m = Matrix9c::Zero();
  m.block<3, 3>(0, 0) = a.cast<cplx>();
  m.block<3, 3>(3, 3) = b.cast<cplx>();
  m.block<3, 3>(6, 6) = c.cast<cplx>();
  return m;
}

Eigen::Matrix3d rot_z(double th) {
  Eigen::Matrix3d r;
  r << std::cos(th), -std::sin(th), 0, std::sin(th), std::cos(th), 0, 0, 0, 1;
  return r;
}

// Bracketed Newton on a monotone increasing f with f(lo) < 0 < f(hi).
template <class F, class DF>
double safe_root(F f, DF df, double lo, double hi) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    double fx = f(x);
    if (fx == 0.0) return x;
    if (fx < 0) lo = x; else hi = x;
    double d = df(x);
    double xn = (d > 0) ? x - fx / d : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(x)) return xn;
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) return 0.5 * (lo + hi);
    x = xn;
  }
  throw NumericalFailure("k=0 dispersion root did not converge");
}

}  // namespace

double Regularization::factor(double k) const {
  if (kind == RegKind::None) return 1.0;
  return 1.0 / std::sqrt(1.0 + eta * k * k);
}

std::string to_string(const Regularization& r) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, r.eta);
  std::string eta(buf, res.ptr);
  switch (r.kind) {
    case RegKind::None: return "none";
    case RegKind::OmegaDecay: return "omega-decay:" + eta;
    case RegKind::PlasmaDecay: return "plasma-decay:" + eta;
  }
  return "none";
}

Regularization parse_regularization(const std::string& s) {
  if (s == "none" || s.empty()) return {};
  auto pos = s.find(':');
  std::string head = s.substr(0, pos);
  double eta = 1.0;
  if (pos != std::string::npos) {
    try {
      eta = std::stod(s.substr(pos + 1));
    } catch (...) {
      throw InvalidParameter("bad regularization parameter: " + s);
    }
  }
  if (!(eta > 0) || !finite(eta)) throw InvalidParameter("regularization eta must be > 0");
  if (head == "omega-decay") return Regularization::omega_decay(eta);
  if (head == "plasma-decay") return Regularization::plasma_decay(eta);
  throw InvalidParameter("unknown regularization: " + s);
}

void PlasmaParams::validate() const {
  if (!finite(omega_c) || !finite(omega_p) || !finite(k_z))
    throw InvalidParameter("plasma parameters must be finite");
  if (omega_p < 0) throw InvalidParameter("omega_p must be >= 0");
  if (reg.kind != RegKind::None && !(reg.eta > 0 && finite(reg.eta)))
    throw InvalidParameter("regularization eta must be > 0");
}

double PlasmaParams::omega_c_at(double k) const {
  return reg.kind == RegKind::OmegaDecay ? omega_c * reg.factor(k) : omega_c;
}

double PlasmaParams::omega_p_at(double k) const {
  return reg.kind == RegKind::PlasmaDecay ? omega_p * reg.factor(k) : omega_p;
}

double PlasmaParams::sigma_bar() const {
  const double inf = std::numeric_limits<double>::infinity();
  switch (reg.kind) {
    case RegKind::OmegaDecay: return 0.0;
    case RegKind::PlasmaDecay: return omega_c == 0.0 ? 0.0 : inf;
    case RegKind::None: break;
  }
  if (omega_p == 0.0) return omega_c == 0.0 ? 0.0 : inf;
  return std::abs(omega_c) / omega_p;
}

double WaveVector::kx() const { return k * std::cos(theta); }
double WaveVector::ky() const { return k * std::sin(theta); }

Matrix3c cross_matrix(double ux, double uy, double uz) {
  Matrix3c m;
  m << 0, -uz, uy, uz, 0, -ux, -uy, ux, 0;
  return m;
}

Matrix9c build_bulk_hamiltonian_xy(const PlasmaParams& p, double kx, double ky) {
  p.validate();
  if (!finite(kx) || !finite(ky)) throw InvalidParameter("wave vector must be finite");
  double k = std::hypot(kx, ky);
  double om = p.omega_c_at(k);
  double wp = p.omega_p_at(k);
  Matrix9c h = Matrix9c::Zero();
  h.block<3, 3>(0, 0) = I * om * cross_matrix(0, 0, 1);
  h.block<3, 3>(0, 3) = -I * wp * Matrix3c::Identity();
  h.block<3, 3>(3, 0) = I * wp * Matrix3c::Identity();
  Matrix3c kc = cross_matrix(kx, ky, p.k_z);
  h.block<3, 3>(3, 6) = -kc;
  h.block<3, 3>(6, 3) = kc;
  return h;
}

Matrix9c build_bulk_hamiltonian(const PlasmaParams& p, const WaveVector& kv) {
  if (!finite(kv.k) || !finite(kv.theta)) throw InvalidParameter("wave vector must be finite");
  return build_bulk_hamiltonian_xy(p, kv.kx(), kv.ky());
}

TmTe build_tm_te(const PlasmaParams& p, const WaveVector& kv) {
  if (std::abs(p.k_z) > 1e-12) throw NotApplicable("TM/TE split requires k_z = 0");
  Matrix9c h = build_bulk_hamiltonian(p, kv);
  TmTe out;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) out.tm(a, b) = h(kTmIndex[a], kTmIndex[b]);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) out.te(a, b) = h(kTeIndex[a], kTeIndex[b]);
  return out;
}

SymmetryName parse_symmetry_name(const std::string& s) {
  if (s == "R") return SymmetryName::R;
  if (s == "GammaP") return SymmetryName::GammaP;
  if (s == "GammaOmega") return SymmetryName::GammaOmega;
  if (s == "GammaK") return SymmetryName::GammaK;
  if (s == "GammaPTilde") return SymmetryName::GammaPTilde;
  if (s == "GammaKTilde") return SymmetryName::GammaKTilde;
  if (s == "S") return SymmetryName::S;
  throw InvalidParameter("unknown symmetry operator: " + s);
}

Eigen::Matrix3d reflection_s(double theta) {
  Eigen::Matrix3d s;
  double c = std::cos(2 * theta), d = std::sin(2 * theta);
  s << c, d, 0, d, -c, 0, 0, 0, 1;
  return s;
}

Matrix9c symmetry_operator(SymmetryName name, double theta) {
  if (!finite(theta)) throw InvalidParameter("theta must be finite");
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d s = reflection_s(theta);
  switch (name) {
    case SymmetryName::R: {
      Eigen::Matrix3d r = rot_z(theta);
      return block_diag(r, r, r);
    }
    case SymmetryName::GammaP: return block_diag(s, -s, -s);
    case SymmetryName::GammaOmega: return block_diag(id, -id, id);
    case SymmetryName::GammaK: return block_diag(id, id, -id);
    case SymmetryName::GammaPTilde: return block_diag(s, s, -s);
    case SymmetryName::GammaKTilde: {
      Eigen::Matrix3d r = rot_z(M_PI);
      return block_diag(id, id, -id) * block_diag(r, r, r);
    }
    case SymmetryName::S: return block_diag(s, s, s);
  }
  throw InvalidParameter("unknown symmetry operator");
}

BandStructure eigendecompose(const Eigen::MatrixXcd& M) {
  if (M.rows() != M.cols() || M.rows() == 0) throw InvalidParameter("matrix must be square");
  double scale = M.cwiseAbs().maxCoeff();
  double herm = (M - M.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm <= 1e-12 * scale)) throw InvalidParameter("matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  if (es.info() != Eigen::Success) throw NumericalFailure("Hermitian eigensolver did not converge");
  BandStructure bs;
  bs.eigenvalues = es.eigenvalues();
  bs.eigenvectors = es.eigenvectors();
  int n = bs.size();
  for (int i = 0; i < n;) {
    int j = i;
    while (j + 1 < n && bs.eigenvalues(j + 1) - bs.eigenvalues(j) <
                            bs.degeneracy_tol * std::max(1.0, std::abs(bs.eigenvalues(j))))
      ++j;
    if (j > i) bs.degenerate_blocks.emplace_back(i, j);
    i = j + 1;
  }
  return bs;
}

BandStructure band_structure(const PlasmaParams& p, const WaveVector& kv) {
  Matrix9c h = build_bulk_hamiltonian(p, kv);
  BandStructure bs = eigendecompose(h);
  for (int j = 1; j <= 4; ++j) {
    double a = bs.omega(j), b = bs.omega(-j);
    if (std::abs(a + b) > 1e-10 * std::max(1.0, std::abs(a)))
      throw NumericalFailure("bulk spectrum not symmetric about zero");
  }
  double hs = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (std::abs(bs.omega(0)) > 1e-12 * hs) throw NumericalFailure("missing zero eigenvalue");
  double kap = std::sqrt(kv.k * kv.k + p.k_z * p.k_z);
  bool isolated = std::abs(bs.omega(1)) > 1e-6 * hs;
  if (kap > 0 && isolated) {
    Vector9c z = Vector9c::Zero();
    z(6) = kv.kx() / kap;
    z(7) = kv.ky() / kap;
    z(8) = p.k_z / kap;
    if (std::abs(std::abs(z.dot(bs.vector(0))) - 1.0) > 1e-8)
      throw NumericalFailure("zero mode is not longitudinal");
  }
  return bs;
}

K0Spectrum k0_eigenvalues(const PlasmaParams& p) {
  p.validate();
  if (p.omega_c == 0.0) throw NotApplicable("k0_eigenvalues requires omega_c != 0");
  if (p.k_z == 0.0) throw NotApplicable("k0_eigenvalues requires k_z != 0");
  const double om = std::abs(p.omega_c), kz = std::abs(p.k_z), wp = p.omega_p;
  const double wp2 = wp * wp, kz2 = kz * kz;
  K0Spectrum out{};
  out.omega_p = wp;
  if (wp == 0.0) {
    out.omega_l_minus = std::min(om, kz);
    out.omega_r = kz;
    out.omega_l_plus = std::max(om, kz);
    return out;
  }
  auto fl = [&](double w) { return w * w - wp2 * w / (w - om) - kz2; };
  auto dfl = [&](double w) { return 2 * w + wp2 * om / ((w - om) * (w - om)); };
  auto fr = [&](double w) { return w * w - wp2 * w / (w + om) - kz2; };
  auto dfr = [&](double w) { return 2 * w - wp2 * om / ((w + om) * (w + om)); };

  out.omega_l_minus = safe_root(fl, dfl, 0.0, om);
  double hi = std::sqrt(kz2 + wp2) + om;
  while (fl(hi) <= 0) hi *= 2;
  out.omega_l_plus = safe_root(fl, dfl, om, hi);
  out.omega_r = safe_root(fr, dfr, kz, std::sqrt(kz2 + wp2));
  return out;
}

std::pair<double, double> transition_frequencies(double omega_c, double k_z) {
  if (!finite(omega_c) || !finite(k_z)) throw InvalidParameter("non-finite input");
  if (omega_c == 0.0) throw NotApplicable("transition frequencies require omega_c != 0");
  double om = std::abs(omega_c);
  double r2 = (k_z / omega_c) * (k_z / omega_c);
  double root = std::sqrt(r2 * r2 + 4 * r2);
  return {om * 0.5 * (root - r2), om * 0.5 * (root + r2)};
}

std::string to_string(Phase ph) {
  switch (ph) {
    case Phase::IPlus: return "I+";
    case Phase::IMinus: return "I-";
    case Phase::IIPlus: return "II+";
    case Phase::IIMinus: return "II-";
    case Phase::IIIPlus: return "III+";
    case Phase::IIIMinus: return "III-";
    case Phase::IVPlus: return "IV+";
    case Phase::IVMinus: return "IV-";
    case Phase::Boundary: return "Boundary";
  }
  return "?";
}

Phase parse_phase(const std::string& s) {
  for (Phase ph : {Phase::IPlus, Phase::IMinus, Phase::IIPlus, Phase::IIMinus, Phase::IIIPlus,
                   Phase::IIIMinus, Phase::IVPlus, Phase::IVMinus, Phase::Boundary})
    if (to_string(ph) == s) return ph;
  throw InvalidParameter("unknown phase: " + s);
}

int phase_sign(Phase ph) {
  switch (ph) {
    case Phase::IPlus:
    case Phase::IIPlus:
    case Phase::IIIPlus:
    case Phase::IVPlus: return 1;
    case Phase::Boundary: return 0;
    default: return -1;
  }
}

Phase classify_phase(const PlasmaParams& p) {
  p.validate();
  if (std::abs(p.omega_c) < 1e-8) return Phase::Boundary;
  bool plus = p.omega_c > 0;
  if (std::abs(p.k_z) < 1e-12) return plus ? Phase::IVPlus : Phase::IVMinus;
  auto [wm, wpl] = transition_frequencies(p.omega_c, p.k_z);
  if (std::abs(p.omega_p - wm) < 1e-8 * std::max(1.0, wm)) return Phase::Boundary;
  if (std::abs(p.omega_p - wpl) < 1e-8 * std::max(1.0, wpl)) return Phase::Boundary;
  if (p.omega_p < wm) return plus ? Phase::IPlus : Phase::IMinus;
  if (p.omega_p < wpl) return plus ? Phase::IIPlus : Phase::IIMinus;
  return plus ? Phase::IIIPlus : Phase::IIIMinus;
}

Vector9c limiting_eigenvector(const PlasmaParams& p, double theta, int branch,
                              std::optional<double> sigma_bar) {
  if (branch == 0 || std::abs(branch) > 4) throw InvalidParameter("branch must be in +-1..+-4");
  double sig = sigma_bar ? *sigma_bar : p.sigma_bar();
  if (!(sig >= 0)) throw InvalidParameter("sigma_bar must be >= 0");
  double c, s;
  if (std::isinf(sig)) {
    c = 0.0;
    s = 1.0;
  } else {
    c = 1.0 / std::sqrt(1.0 + sig * sig);
    s = sig * c;
  }
  const Eigen::Vector3cd kh(std::cos(theta), std::sin(theta), 0.0);
  const Eigen::Vector3cd ez(0.0, 0.0, 1.0);
  const Eigen::Vector3cd kxz(std::sin(theta), -std::cos(theta), 0.0);  // kh x ez
  const Eigen::Vector3cd zero = Eigen::Vector3cd::Zero();
  // g = +1 for Omega > 0
  const double g = p.omega_c < 0 ? -1.0 : 1.0;
  const int b = std::abs(branch);
  const double pm = branch > 0 ? 1.0 : -1.0;
  Eigen::Vector3cd v, e, bb;
  switch (b) {
    case 1:
      v = c * kxz - pm * g * I * ez;
      e = g * s * kh;
      bb = zero;
      break;
    case 2:
      v = s * kxz + pm * g * I * kh;
      e = -g * c * kh;
      bb = zero;
      break;
    case 3:
      v = zero;
      e = -g * ez;
      bb = -pm * g * kxz;
      break;
    default:
      v = zero;
      e = g * kxz;
      bb = -pm * g * ez;
      break;
  }
  Vector9c out;
  out << v, e, bb;
  return out / out.norm();
}

std::string to_string(Subsystem s) {
  switch (s) {
    case Subsystem::Full: return "full";
    case Subsystem::TM: return "tm";
    case Subsystem::TE: return "te";
  }
  return "?";
}

Subsystem parse_subsystem(const std::string& s) {
  if (s == "full") return Subsystem::Full;
  if (s == "tm" || s == "TM") return Subsystem::TM;
  if (s == "te" || s == "TE") return Subsystem::TE;
  throw InvalidParameter("unknown subsystem: " + s);
}

std::vector<double> default_kgrid(const PlasmaParams& p) {
  double kmax = 50.0 * std::max({p.omega_p, std::abs(p.omega_c), std::abs(p.k_z), 1.0});
  const int n = 2000;
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = kmax * i / (n - 1);
  return g;
}

GapInterval band_extrema(const PlasmaParams& p, int ell, const std::vector<double>& kgrid,
                         Subsystem sys) {
  if (kgrid.empty()) throw InvalidParameter("empty k grid");
  if (ell != 1 && ell != 2) throw InvalidParameter("ell must be 1 or 2");
  if (sys == Subsystem::TE) throw InvalidParameter("gap analysis is defined for full or TM systems");
  GapInterval g;
  g.ell = ell;
  g.lo = -std::numeric_limits<double>::infinity();
  g.hi = std::numeric_limits<double>::infinity();
  for (double k : kgrid) {
    WaveVector kv{k, 0.0};
    Eigen::VectorXd w;
    int below;
    if (sys == Subsystem::TM) {
      TmTe tt = build_tm_te(p, kv);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix<cplx, 5, 5>> es(tt.tm, Eigen::EigenvaluesOnly);
      w = es.eigenvalues();
      below = 2 + ell - 1;
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix9c> es(build_bulk_hamiltonian(p, kv), Eigen::EigenvaluesOnly);
      w = es.eigenvalues();
      below = 4 + ell;
    }
    g.lo = std::max(g.lo, w(below));
    g.hi = std::min(g.hi, w(below + 1));
  }
  g.global = g.lo < g.hi;
  return g;
}

GapInterval band_extrema(const PlasmaParams& p, int ell, Subsystem sys) {
  return band_extrema(p, ell, default_kgrid(p), sys);
}

GapInterval intersect(const GapInterval& a, const GapInterval& b) {
  GapInterval g;
  g.ell = a.ell;
  g.lo = std::max(a.lo, b.lo);
  g.hi = std::min(a.hi, b.hi);
  g.global = a.global && b.global && g.lo < g.hi;
  return g;
}

}  // namespace topoplasma
