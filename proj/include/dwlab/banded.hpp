#pragma once

#include <vector>

namespace dwlab {

/// General banded matrix with LU factorization and partial pivoting
/// (LAPACK gbtrf/gbtrs layout, unblocked). kl/ku are the lower/upper
/// bandwidths of the original matrix; pivoting fill widens U to kl+ku.
class BandedMatrix {
 public:
  BandedMatrix(int n, int kl, int ku);

  int size() const { return n_; }

  /// Read/write access inside the declared band. Out-of-band access is a
  /// logic error and throws.
  double& at(int i, int j);
  double get(int i, int j) const;
  void add(int i, int j, double v) { at(i, j) += v; }

  /// In-place LU with partial pivoting. Throws SolverError on exact
  /// singularity.
  void factorize();
  bool factored() const { return factored_; }

  /// Solves A x = b using the factorization; b is overwritten with x.
  void solve(std::vector<double>& b) const;

  /// Multiplies the ORIGINAL matrix by x (only valid before factorize()).
  std::vector<double> multiply(const std::vector<double>& x) const;

 private:
  double& ab(int r, int c) { return ab_[static_cast<std::size_t>(c) * ldab_ + r]; }
  double ab(int r, int c) const {
    return ab_[static_cast<std::size_t>(c) * ldab_ + r];
  }

  int n_, kl_, ku_, kv_, ldab_;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
  bool factored_ = false;
};

/// Solves the bordered system
///   [A  v] [x ]   [f]
///   [w^T 0] [mu] = [g]
/// by block elimination with two banded solves. A is consumed
/// (factorized in place). Returns x and fills *mu_out when non-null.
std::vector<double> solve_bordered(BandedMatrix& A,
                                   const std::vector<double>& w,
                                   const std::vector<double>& v,
                                   const std::vector<double>& f, double g,
                                   double* mu_out = nullptr);

}  // namespace dwlab
