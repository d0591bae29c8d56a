#pragma once

#include <vector>

#include <Eigen/Dense>

#include "topoplasma/bulk.hpp"

namespace topoplasma {

// Hermitian band matrix in LAPACK upper storage: ab(kd + i - j, j) = A(i, j), j - kd <= i <= j.
struct BandedHermitian {
  int n = 0;
  int kd = 0;
  std::vector<cplx> ab;  // column major, leading dimension kd + 1

  cplx& at(int i, int j) { return ab[static_cast<size_t>(j) * (kd + 1) + kd + i - j]; }
  cplx get(int i, int j) const;
  double max_abs() const;
  Eigen::VectorXcd multiply(const Eigen::VectorXcd& x) const;
};

struct WindowedEigen {
  Eigen::VectorXd eigenvalues;   // all, ascending
  std::vector<int> selected;     // indices with computed vectors
  Eigen::MatrixXcd vectors;      // n x selected.size()
};

// All eigenvalues via band reduction; eigenvectors for eigenvalues in [lo, hi] by inverse
// iteration on the band matrix.
WindowedEigen banded_window_eigensolve(const BandedHermitian& a, double lo, double hi);

// Dense Hermitian eigensolve (LAPACK zheevd), all eigenpairs.
void dense_eigensolve(Eigen::MatrixXcd& a, Eigen::VectorXd& w);

void limit_blas_threads();

}  // namespace topoplasma
