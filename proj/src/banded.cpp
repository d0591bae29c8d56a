#include "topoplasma/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "topoplasma/errors.hpp"

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace topoplasma {

void limit_blas_threads() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (openblas_set_num_threads) openblas_set_num_threads(1);
  });
}

cplx BandedHermitian::get(int i, int j) const {
  if (i > j) return std::conj(get(j, i));
  if (j - i > kd) return 0.0;
  return ab[static_cast<size_t>(j) * (kd + 1) + kd + i - j];
}

double BandedHermitian::max_abs() const {
  double m = 0.0;
  for (const auto& z : ab) m = std::max(m, std::abs(z));
  return m;
}

Eigen::VectorXcd BandedHermitian::multiply(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
  for (int j = 0; j < n; ++j) {
    const cplx* col = &ab[static_cast<size_t>(j) * (kd + 1)];
    for (int i = std::max(0, j - kd); i <= j; ++i) {
      cplx a = col[kd + i - j];
      y(i) += a * x(j);
      if (i != j) y(j) += std::conj(a) * x(i);
    }
  }
  return y;
}

namespace {

struct BandLU {
  int n, kd, ld;
  std::vector<cplx> g;
  std::vector<lapack_int> ipiv;
};

bool factor_shifted(const BandedHermitian& a, double sigma, BandLU& lu) {
  const int n = a.n, kd = a.kd, ld = 3 * kd + 1;
  lu.n = n;
  lu.kd = kd;
  lu.ld = ld;
  lu.g.assign(static_cast<size_t>(ld) * n, 0.0);
  lu.ipiv.assign(n, 0);
  for (int j = 0; j < n; ++j) {
    for (int i = std::max(0, j - kd); i <= std::min(n - 1, j + kd); ++i) {
      cplx v = a.get(i, j);
      if (i == j) v -= sigma;
      lu.g[static_cast<size_t>(j) * ld + 2 * kd + i - j] = v;
    }
  }
  lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kd, kd, lu.g.data(), ld, lu.ipiv.data());
  if (info < 0) throw NumericalFailure("zgbtrf argument error");
  return info == 0;
}

void solve(BandLU& lu, Eigen::VectorXcd& x) {
  lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', lu.n, lu.kd, lu.kd, 1, lu.g.data(), lu.ld,
                                   lu.ipiv.data(), x.data(), lu.n);
  if (info != 0) throw NumericalFailure("zgbtrs failed");
}

}  // namespace

WindowedEigen banded_window_eigensolve(const BandedHermitian& a, double lo, double hi) {
  limit_blas_threads();
  const int n = a.n;
  WindowedEigen out;
  std::vector<cplx> work = a.ab;
  std::vector<double> d(n), e(std::max(1, n - 1));
  cplx qdummy = 0.0;
  lapack_int info = LAPACKE_zhbtrd(LAPACK_COL_MAJOR, 'N', 'U', n, a.kd, work.data(), a.kd + 1,
                                   d.data(), e.data(), &qdummy, 1);
  if (info != 0) throw NumericalFailure("zhbtrd failed");
  info = LAPACKE_dsterf(n, d.data(), e.data());
  if (info != 0) throw NumericalFailure("dsterf did not converge");
  out.eigenvalues = Eigen::Map<Eigen::VectorXd>(d.data(), n);

  for (int k = 0; k < n; ++k)
    if (d[k] >= lo && d[k] <= hi) out.selected.push_back(k);
  const int m = static_cast<int>(out.selected.size());
  out.vectors.resize(n, m);
  if (m == 0) return out;

  const double scale = std::max(1.0, a.max_abs());
  const double cluster_tol = 1e-7 * scale;
  const double eps = std::numeric_limits<double>::epsilon();
  int cluster_start = 0;
  BandLU lu;
  for (int s = 0; s < m; ++s) {
    const double lam = d[out.selected[s]];
    if (s > 0 && lam - d[out.selected[s - 1]] > cluster_tol) cluster_start = s;
    double sigma = lam;
    int tries = 0;
    while (!factor_shifted(a, sigma, lu)) {
      if (++tries > 8) throw NumericalFailure("singular shifted band matrix");
      sigma += 10.0 * eps * scale * tries;
    }
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL + out.selected[s]);
    std::normal_distribution<double> nd;
    Eigen::VectorXcd x(n);
    for (int i = 0; i < n; ++i) x(i) = cplx(nd(rng), nd(rng));
    auto orth = [&](Eigen::VectorXcd& v) {
      for (int t = cluster_start; t < s; ++t) {
        auto u = out.vectors.col(t);
        v -= u * u.dot(v);
      }
      v /= v.norm();
    };
    orth(x);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 6; ++it) {
      solve(lu, x);
      if (!x.allFinite()) throw NumericalFailure("inverse iteration produced non-finite vector");
      orth(x);
      res = (a.multiply(x) - lam * x).norm();
      if (it >= 1 && res <= 1e-10 * scale) break;
    }
    if (res > 1e-6 * scale)
      throw NumericalFailure("inverse iteration did not converge (residual " + std::to_string(res) + ")");
    out.vectors.col(s) = x;
  }
  return out;
}

void dense_eigensolve(Eigen::MatrixXcd& a, Eigen::VectorXd& w) {
  limit_blas_threads();
  const int n = static_cast<int>(a.rows());
  w.resize(n);
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0) throw NumericalFailure("zheevd failed with info " + std::to_string(info));
}

}  // namespace topoplasma
