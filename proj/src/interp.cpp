#include "dwlab/interp.hpp"

#include <cmath>

#include "dwlab/errors.hpp"
#include "dwlab/grid.hpp"

namespace dwlab {

CubicTable::CubicTable(double x0, double h, std::vector<double> values,
                       double left_value, double right_value)
    : CubicTable(x0, h, values, derivative1(values, h), left_value,
                 right_value) {}

CubicTable::CubicTable(double x0, double h, std::vector<double> values,
                       std::vector<double> slopes, double left_value,
                       double right_value)
    : x0_(x0), h_(h), f_(std::move(values)), d_(std::move(slopes)),
      left_(left_value), right_(right_value) {
  if (f_.size() < 2 || d_.size() != f_.size() || !(h_ > 0.0))
    throw ConfigError("interp", "bad cubic table shape");
}

int CubicTable::cell(double x, double& s) const {
  const double u = (x - x0_) / h_;
  int j = static_cast<int>(std::floor(u));
  const int last = static_cast<int>(f_.size()) - 2;
  if (j < 0) j = 0;
  if (j > last) j = last;
  s = u - j;
  return j;
}

double CubicTable::value(double x) const {
  if (x < x0_) return left_;
  if (x > x_max()) return right_;
  double s;
  const int j = cell(x, s);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * f_[j] + h10 * h_ * d_[j] + h01 * f_[j + 1] +
         h11 * h_ * d_[j + 1];
}

double CubicTable::deriv(double x) const {
  if (x < x0_ || x > x_max()) return 0.0;
  double s;
  const int j = cell(x, s);
  const double s2 = s * s;
  const double g00 = (6.0 * s2 - 6.0 * s) / h_;
  const double g10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double g01 = (-6.0 * s2 + 6.0 * s) / h_;
  const double g11 = 3.0 * s2 - 2.0 * s;
  return g00 * f_[j] + g10 * d_[j] + g01 * f_[j + 1] + g11 * d_[j + 1];
}

double CubicTable::second(double x) const {
  if (x < x0_ || x > x_max()) return 0.0;
  double s;
  const int j = cell(x, s);
  const double a = (12.0 * s - 6.0) / (h_ * h_);
  return a * (f_[j] - f_[j + 1]) +
         ((6.0 * s - 4.0) * d_[j] + (6.0 * s - 2.0) * d_[j + 1]) / h_;
}

}  // namespace dwlab
