#pragma once

#include <array>
#include <vector>

#include "dwlab/expansion.hpp"
#include "dwlab/fit.hpp"
#include "dwlab/solver.hpp"

namespace dwlab {

/// Remainder fields P = rho - rho_k and Q = m - m_k on a snapshot grid,
/// with x-derivatives up to order 2 and the norms the decay theory bounds.
struct RemainderRecord {
  double t = 0.0;
  double dx = 0.0;  // physical spacing of the snapshot grid
  std::array<double, 3> p_l2{};  // ||d^s P||_L2, s = 0..2
  std::array<double, 3> q_l2{};
  double p_linf = 0.0;
  double dp_linf = 0.0;
  double q_linf = 0.0;
  bool sobolev_ok = false;  // ||f||_inf^2 <= ||f|| ||f'|| within tolerance
  bool resampled = false;

  // retained fields for the potential/energy functional
  std::vector<double> P, Q, dP, dQ, d2P, d2Q;
};

/// Evaluates the remainder of a snapshot against the order-k expansion.
/// Derivatives use 4th-order differences, integrals composite trapezoid.
RemainderRecord remainder(const SimState& snap, const ExpansionEvaluator& ev,
                          int k);

struct DecaySeries {
  std::vector<double> times;
  std::vector<double> values;
  FitResult fit;
  bool log_corrected = false;
  double theoretical = 0.0;
};

/// Norm selectors for building decay series out of remainder records.
enum class NormKind { PL2, PLinf, DPLinf, QL2, QLinf };

std::vector<double> norm_series(const std::vector<RemainderRecord>& records,
                                NormKind kind, int deriv_order = 0);

/// Least-squares decay fit; divide_by_log handles the integer-index branch.
FitResult fit_decay(const std::vector<double>& times,
                    const std::vector<double>& values, bool divide_by_log,
                    double t_min = 10.0);

/// Weighted energy functional of the potential y(x,t) = -Int_-inf^x P:
///   N2(t) = ||y||^2 + sum_i (1+t)^((i+1)(1+lambda)) (||d^i y_t||^2 + ||d^i y_x||^2)
struct EnergyRecord {
  double t = 0.0;
  double n2 = 0.0;
  double y_right_end = 0.0;  // should vanish for mass-neutral data
  bool mass_neutral = true;
};

std::vector<EnergyRecord> energy_functional(
    const std::vector<RemainderRecord>& records, double lambda);

}  // namespace dwlab
