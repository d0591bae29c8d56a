#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "topoplasma/bulk.hpp"
#include "topoplasma/interface.hpp"

namespace topoplasma {

enum class DiracKind { MinusCrossing, MinusCrossingNegOmega, PlusCrossing };
std::string to_string(DiracKind k);

struct DiracModel {
  double alpha = 1.0;
  double beta = 0.0;
  double omega_star = 0.0;
  double omega_tilde = 0.0;
  DiracKind which = DiracKind::MinusCrossing;

  double identity_coeff() const;
  double sigma3_coeff() const;
  // Coefficients of (sigma_1, sigma_2) as linear forms in (kx, ky); speed 1/(sqrt(2) alpha).
  Eigen::Matrix2d velocity_matrix() const;
  Eigen::Matrix2cd symbol(double kx, double ky) const;
};

DiracModel reduce_minus(const PlasmaParams& p);
DiracModel reduce_plus(const PlasmaParams& p);
bool gap_overlap(const DiracModel& m);

// Largest distance between the two eigenvalues of the reduced symbol and the two nearest
// eigenvalues of the full 9x9 symbol at kappa = (kappa cos t, kappa sin t, k_z) with
// omega_p = omega_star + omega_tilde.
double reduction_error(const PlasmaParams& p, bool plus, double kappa, double theta, double omega_tilde);

enum class DiracScheme { Staggered, Centered };
std::string to_string(DiracScheme s);
DiracScheme parse_dirac_scheme(const std::string& s);

struct DiracProfile {
  std::function<double(double)> v_x = [](double) { return 1.0; };
  std::function<double(double)> v_y = [](double) { return 1.0; };
  std::function<double(double)> m = [](double) { return 1.0; };
  std::function<double(double)> V = [](double) { return 0.0; };
  double eta = 0.0;
  int N = 200;
  double L = 20.0;
  DiracScheme scheme = DiracScheme::Staggered;
  std::string tag = "custom";
};

// v_x = v_y = 1, m(y) a periodic tanh-like wall of the given mass.
DiracProfile dirac_domain_wall(double mass, int N, double L, double width = 2.0);
// v_x(y) changes sign across y = 0, constant mass.
DiracProfile dirac_singular_one(double mass, int N, double L, double width = 2.0);
// v_x = y, v_y = m = |y|.
DiracProfile dirac_singular_two(int N, double L);

Eigen::MatrixXcd build_dirac_matrix(const DiracProfile& dp, double xi);
std::vector<SweepRecord> dirac_interface_spectrum(const DiracProfile& dp, const std::vector<double>& xi_grid,
                                                  int threads = 1, double loc_window = 0.2,
                                                  double w_edge = 0.1);

// Constant symbol offset + v_x kx s1 + v_y ky s2 + m s3, the reduced model in the
// orientation of the interface operator.
struct DiracSide {
  double v_x = 1.0;
  double v_y = 1.0;
  double m = 1.0;
  double offset = 0.0;
};
DiracSide side_of(const DiracModel& m);

// Intersection of the two local gaps (offset - |m|, offset + |m|); global=false when empty.
GapInterval dirac_common_gap(const DiracSide& north, const DiracSide& south);
// Interface between two constant-velocity sides, mass and offset joined by a periodic step.
DiracProfile dirac_interface(const DiracSide& north, const DiracSide& south, int N, double L,
                             double width = 2.0);

struct DiracBdi {
  int value = 0;
  double raw = 0.0;
  bool velocity_flip = false;
};

// Sign of the sign formula chosen so that the I+/II+ reduction gives +1.
inline constexpr int kDiracSign = -1;

DiracBdi dirac_bdi(const DiracSide& north, const DiracSide& south);

// Lower-band curvature integral of v_x kx s1 + v_y ky s2 + (m + eta k^2) s3 (eta > 0).
double dirac_lower_band_curvature(const DiracSide& side, double eta, int n_r = 128, int n_theta = 128);

struct WeylProbe {
  double Nscale = 4.0;
  double E = 0.0;
  double xi = 0.0;
  std::optional<double> spacing;
};

double weyl_spacing(const WeylProbe& probe);
double weyl_residual(const WeylProbe& probe);

}  // namespace topoplasma
