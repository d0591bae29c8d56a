#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace topoplasma {

using cplx = std::complex<double>;
using Matrix9c = Eigen::Matrix<cplx, 9, 9>;
using Vector9c = Eigen::Matrix<cplx, 9, 1>;
using Matrix3c = Eigen::Matrix<cplx, 3, 3>;

enum class RegKind { None, OmegaDecay, PlasmaDecay };

struct Regularization {
  RegKind kind = RegKind::None;
  double eta = 0.0;

  static Regularization none() { return {}; }
  static Regularization omega_decay(double eta) { return {RegKind::OmegaDecay, eta}; }
  static Regularization plasma_decay(double eta) { return {RegKind::PlasmaDecay, eta}; }

  // damping factor (1 + eta k^2)^(-1/2)
  double factor(double k) const;
  bool operator==(const Regularization&) const = default;
};

std::string to_string(const Regularization& r);
// "none", "omega-decay:ETA", "plasma-decay:ETA"
Regularization parse_regularization(const std::string& s);

struct PlasmaParams {
  double omega_c = 0.0;
  double omega_p = 0.0;
  double k_z = 0.0;
  Regularization reg;

  void validate() const;
  double omega_c_at(double k) const;
  double omega_p_at(double k) const;
  // lim |Omega(k)|/omega_p(k) as k -> infinity; may be +inf
  double sigma_bar() const;
  bool operator==(const PlasmaParams&) const = default;
};

struct WaveVector {
  double k = 0.0;
  double theta = 0.0;

  double kx() const;
  double ky() const;
};

Matrix3c cross_matrix(double ux, double uy, double uz);

// Blocks ordered (v, E, B).
Matrix9c build_bulk_hamiltonian(const PlasmaParams& p, const WaveVector& kv);
Matrix9c build_bulk_hamiltonian_xy(const PlasmaParams& p, double kx, double ky);

// H_TM on (vx, vy, Ex, Ey, Bz), H_TE on (vz, Ez, Bx, By); requires k_z = 0.
struct TmTe {
  Eigen::Matrix<cplx, 5, 5> tm;
  Eigen::Matrix<cplx, 4, 4> te;
};
inline constexpr int kTmIndex[5] = {0, 1, 3, 4, 8};
inline constexpr int kTeIndex[4] = {2, 5, 6, 7};
TmTe build_tm_te(const PlasmaParams& p, const WaveVector& kv);

enum class SymmetryName { R, GammaP, GammaOmega, GammaK, GammaPTilde, GammaKTilde, S };
SymmetryName parse_symmetry_name(const std::string& s);
// S(theta) is 3x3 and returned in the top-left block of an otherwise zero matrix.
Matrix9c symmetry_operator(SymmetryName name, double theta);
Eigen::Matrix3d reflection_s(double theta);

struct BandStructure {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXcd eigenvectors;  // columns
  double degeneracy_tol = 1e-9;
  // index ranges [first, last] of clusters with more than one member
  std::vector<std::pair<int, int>> degenerate_blocks;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  // band j in {-n..n} with 0 the middle eigenvalue
  double omega(int j) const { return eigenvalues(j + size() / 2); }
  Eigen::VectorXcd vector(int j) const { return eigenvectors.col(j + size() / 2); }
};

BandStructure eigendecompose(const Eigen::MatrixXcd& M);
// Diagonalizes H(p, kv) and enforces the spectrum symmetry and zero-mode invariants.
BandStructure band_structure(const PlasmaParams& p, const WaveVector& kv);

struct K0Spectrum {
  double omega_l_minus;
  double omega_r;
  double omega_l_plus;
  double omega_p;
};
K0Spectrum k0_eigenvalues(const PlasmaParams& p);

std::pair<double, double> transition_frequencies(double omega_c, double k_z);

enum class Phase { IPlus, IMinus, IIPlus, IIMinus, IIIPlus, IIIMinus, IVPlus, IVMinus, Boundary };
std::string to_string(Phase ph);
Phase parse_phase(const std::string& s);
int phase_sign(Phase ph);
Phase classify_phase(const PlasmaParams& p);

// Limiting eigenvector of band `branch` (nonzero, |branch| <= 4) as |kappa| -> infinity
// at angle theta. sigma_bar defaults to p.sigma_bar().
Vector9c limiting_eigenvector(const PlasmaParams& p, double theta, int branch,
                              std::optional<double> sigma_bar = std::nullopt);

enum class Subsystem { Full, TM, TE };
std::string to_string(Subsystem s);
Subsystem parse_subsystem(const std::string& s);

struct GapInterval {
  int ell = 1;
  double lo = 0.0;
  double hi = 0.0;
  bool global = false;
};

std::vector<double> default_kgrid(const PlasmaParams& p);
// For the TM subsystem ell=1 is the gap above the zero band and ell=2 the gap between
// the two positive TM bands.
GapInterval band_extrema(const PlasmaParams& p, int ell, const std::vector<double>& kgrid,
                         Subsystem sys = Subsystem::Full);
GapInterval band_extrema(const PlasmaParams& p, int ell, Subsystem sys = Subsystem::Full);
GapInterval intersect(const GapInterval& a, const GapInterval& b);

}  // namespace topoplasma
