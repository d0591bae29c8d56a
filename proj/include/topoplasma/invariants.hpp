#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topoplasma/bulk.hpp"

namespace topoplasma {

enum class CurvatureMethod { Analytic, Quadrature };

struct CurvatureResult {
  int band = 0;
  double value = 0.0;
  CurvatureMethod method = CurvatureMethod::Analytic;
  double residual = 0.0;
};

// i<psi, J psi> with J = Diag(ez x, ez x, ez x)
double angular_weight(const Eigen::VectorXcd& psi);

// sigma_bar overrides the scheme's limit |Omega(k)|/omega_p(k).
CurvatureResult curvature_analytic(const PlasmaParams& p, int band,
                                   std::optional<double> sigma_bar = std::nullopt);

struct QuadratureOptions {
  double K_cut = 0.0;  // 0 selects default_kcut(p)
  int n_r = 64;
  int n_theta = 64;
  double r_min = 1e-4;
  bool refine = true;  // residual from a run with doubled grids
  int threads = 1;
  std::optional<std::uint64_t> gauge_seed;  // multiply every eigenvector by a random phase
};

double default_kcut(const PlasmaParams& p);

// Curvature integral over |kappa| <= K_cut of the projector onto `bands` (plaquette links,
// determinant of the overlap matrix for several bands).
CurvatureResult curvature_quadrature(const PlasmaParams& p, const std::vector<int>& bands,
                                     const QuadratureOptions& opt = {});
CurvatureResult curvature_quadrature(const PlasmaParams& p, int band, double K_cut, int n_r,
                                     int n_theta);

struct GluingReport {
  int ell = 1;
  std::vector<int> bands;                // ell+1 .. 4
  std::vector<double> band_mismatch;     // max over theta of ||Pi_j^N - Pi_j^S||_F
  double projector_mismatch = 0.0;       // max over theta for the sum over bands
  bool glued = false;
};

GluingReport check_gluing(const PlasmaParams& pN, const PlasmaParams& pS, int ell);

struct BdiResult {
  int ell = 1;
  int value = 0;
  double raw = 0.0;
  double rounding_residual = 0.0;
  GluingReport gluing;
  bool is_bdi = false;
};

BdiResult bdi(const PlasmaParams& pN, const PlasmaParams& pS, int ell);

PlasmaParams representative_params(Phase ph, const Regularization& reg = {});

struct Table2Row {
  std::string transition;
  PlasmaParams south;
  PlasmaParams north;
  BdiResult ell1;
  BdiResult ell2;
};

std::vector<Table2Row> table2(const Regularization& scheme);

struct Table1Row {
  Phase phase;
  double sigma_bar;
  std::array<double, 4> c;
};

std::vector<Table1Row> table1(const std::vector<double>& sigma_bars);

}  // namespace topoplasma
