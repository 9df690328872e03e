#include "dwlab/banded.hpp"

#include <algorithm>
#include <cmath>

#include "dwlab/errors.hpp"

namespace dwlab {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), kv_(kl + ku), ldab_(2 * kl + ku + 1),
      ab_(static_cast<std::size_t>(n) * (2 * kl + ku + 1), 0.0),
      ipiv_(n, 0) {
  if (n < 1 || kl < 0 || ku < 0)
    throw ConfigError("banded", "invalid banded matrix shape");
}

double& BandedMatrix::at(int i, int j) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_)
    throw ConfigError("banded", "entry outside declared band");
  return ab(kv_ + i - j, j);
}

double BandedMatrix::get(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_)
    return 0.0;
  return ab(kv_ + i - j, j);
}

std::vector<double> BandedMatrix::multiply(const std::vector<double>& x) const {
  std::vector<double> y(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    const int lo = std::max(0, i - kl_);
    const int hi = std::min(n_ - 1, i + ku_);
    double s = 0.0;
    for (int j = lo; j <= hi; ++j) s += ab(kv_ + i - j, j) * x[j];
    y[i] = s;
  }
  return y;
}

void BandedMatrix::factorize() {
  int ju = 0;
  for (int j = 0; j < n_; ++j) {
    const int km = std::min(kl_, n_ - 1 - j);
    int jp = 0;
    double amax = std::abs(ab(kv_, j));
    for (int r = 1; r <= km; ++r) {
      const double a = std::abs(ab(kv_ + r, j));
      if (a > amax) {
        amax = a;
        jp = r;
      }
    }
    ipiv_[j] = j + jp;
    if (amax == 0.0)
      throw SolverError("banded", "singular banded matrix in LU");
    ju = std::max(ju, std::min(j + ku_ + jp, n_ - 1));
    if (jp != 0) {
      for (int c = j; c <= ju; ++c)
        std::swap(ab(kv_ + j - c, c), ab(kv_ + j + jp - c, c));
    }
    const double piv = ab(kv_, j);
    for (int r = 1; r <= km; ++r) ab(kv_ + r, j) /= piv;
    for (int c = j + 1; c <= ju; ++c) {
      const double u = ab(kv_ + j - c, c);
      if (u != 0.0) {
        for (int r = 1; r <= km; ++r)
          ab(kv_ + j - c + r, c) -= ab(kv_ + r, j) * u;
      }
    }
  }
  factored_ = true;
}

void BandedMatrix::solve(std::vector<double>& b) const {
  if (!factored_) throw SolverError("banded", "solve before factorize");
  if (static_cast<int>(b.size()) != n_)
    throw ConfigError("banded", "rhs size mismatch");
  for (int j = 0; j < n_; ++j) {
    const int p = ipiv_[j];
    if (p != j) std::swap(b[p], b[j]);
    const int km = std::min(kl_, n_ - 1 - j);
    for (int r = 1; r <= km; ++r) b[j + r] -= ab(kv_ + r, j) * b[j];
  }
  for (int j = n_ - 1; j >= 0; --j) {
    b[j] /= ab(kv_, j);
    const int top = std::max(0, j - kv_);
    for (int i = top; i < j; ++i) b[i] -= ab(kv_ + i - j, j) * b[j];
  }
}

std::vector<double> solve_bordered(BandedMatrix& A,
                                   const std::vector<double>& w,
                                   const std::vector<double>& v,
                                   const std::vector<double>& f, double g,
                                   double* mu_out) {
  A.factorize();
  std::vector<double> z1 = f;
  std::vector<double> z2 = v;
  A.solve(z1);
  A.solve(z2);
  double wz1 = 0.0, wz2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    wz1 += w[i] * z1[i];
    wz2 += w[i] * z2[i];
  }
  if (wz2 == 0.0)
    throw SolverError("banded", "bordered system is degenerate (w.A^-1.v = 0)");
  const double mu = (wz1 - g) / wz2;
  for (std::size_t i = 0; i < z1.size(); ++i) z1[i] -= mu * z2[i];
  if (mu_out) *mu_out = mu;
  return z1;
}

}  // namespace dwlab
