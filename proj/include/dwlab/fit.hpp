#pragma once

#include <vector>

namespace dwlab {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

/// Least-squares fit of log(values) against log(1+t). When divide_by_log is
/// set, values are divided by ln(1+t) first (the integer-index branch of the
/// decay theory carries that factor). Entries with t < t_min are skipped.
FitResult fit_powerlaw(const std::vector<double>& times,
                       const std::vector<double>& values,
                       bool divide_by_log = false, double t_min = 0.0);

}  // namespace dwlab
