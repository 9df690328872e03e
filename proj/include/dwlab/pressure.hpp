#pragma once

#include <string>
#include <vector>

namespace dwlab {

/// Barotropic pressure law p(rho) with p'(rho) > 0 on a declared admissible
/// density interval. Gamma-law and linear laws are exact to all derivative
/// orders; a tabulated law interpolates user samples with a cubic spline.
class PressureLaw {
 public:
  enum class Kind { GammaLaw, Linear, Tabulated };

  struct Eval {
    double p;
    double dp;
    double d2p;
  };

  static PressureLaw gamma_law(double gamma = 1.4, double scale = 1.0);
  static PressureLaw linear(double c_squared);
  /// Samples must be strictly increasing in rho with strictly increasing p.
  static PressureLaw tabulated(std::vector<double> rho, std::vector<double> p);

  Kind kind() const { return kind_; }
  double rho_min() const { return rho_min_; }
  double rho_max() const { return rho_max_; }

  /// Value and first two derivatives at rho. Throws ConfigError when rho is
  /// outside the admissible interval, naming the interval.
  Eval eval(double rho) const;

  double value(double rho) const;

  /// order-th derivative; order 0 is the value itself. Gamma/linear laws
  /// support any order; the tabulated law supports up to 3.
  double deriv(double rho, int order) const;

  std::string describe() const;

  double gamma() const { return gamma_; }
  double scale() const { return scale_; }
  double c_squared() const { return c_squared_; }

 private:
  PressureLaw() = default;
  void check_domain(double rho) const;

  Kind kind_ = Kind::GammaLaw;
  double rho_min_ = 0.0;
  double rho_max_ = 0.0;
  double gamma_ = 1.4;
  double scale_ = 1.0;
  double c_squared_ = 1.0;

  // tabulated law: natural cubic spline coefficients per interval
  std::vector<double> tab_rho_;
  std::vector<double> tab_p_;
  std::vector<double> tab_m_;  // second derivatives at knots
};

}  // namespace dwlab
