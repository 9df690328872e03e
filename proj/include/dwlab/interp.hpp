#pragma once

#include <vector>

namespace dwlab {

/// C^1 cubic Hermite interpolant on a uniform grid, with 4th-order nodal
/// slopes. Outside the grid the function is extended by the given constant
/// values with zero slope (profiles flatten to their far-field states, so
/// the extension is exact up to Gaussian tails).
class CubicTable {
 public:
  CubicTable() = default;
  CubicTable(double x0, double h, std::vector<double> values,
             double left_value, double right_value);
  /// Same, but with explicitly supplied slopes.
  CubicTable(double x0, double h, std::vector<double> values,
             std::vector<double> slopes, double left_value,
             double right_value);

  double operator()(double x) const { return value(x); }
  double value(double x) const;
  double deriv(double x) const;
  /// Second derivative of the piecewise cubic (piecewise linear,
  /// discontinuous at nodes).
  double second(double x) const;

  bool empty() const { return f_.empty(); }
  double x_min() const { return x0_; }
  double x_max() const { return x0_ + h_ * (f_.size() - 1); }

 private:
  int cell(double x, double& s) const;

  double x0_ = 0.0;
  double h_ = 1.0;
  std::vector<double> f_;
  std::vector<double> d_;  // slopes df/dx at nodes
  double left_ = 0.0;
  double right_ = 0.0;
};

}  // namespace dwlab
