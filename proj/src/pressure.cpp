#include "dwlab/pressure.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dwlab/errors.hpp"

namespace dwlab {

PressureLaw PressureLaw::gamma_law(double gamma, double scale) {
  if (!(gamma > 0.0) || !(scale > 0.0))
    throw ConfigError("pressure", "gamma-law needs gamma > 0 and scale > 0");
  PressureLaw law;
  law.kind_ = Kind::GammaLaw;
  law.gamma_ = gamma;
  law.scale_ = scale;
  law.rho_min_ = 0.0;  // open end: rho must be strictly positive
  law.rho_max_ = std::numeric_limits<double>::infinity();
  return law;
}

PressureLaw PressureLaw::linear(double c_squared) {
  if (!(c_squared > 0.0))
    throw ConfigError("pressure", "linear law needs c^2 > 0");
  PressureLaw law;
  law.kind_ = Kind::Linear;
  law.c_squared_ = c_squared;
  law.rho_min_ = 0.0;
  law.rho_max_ = std::numeric_limits<double>::infinity();
  return law;
}

PressureLaw PressureLaw::tabulated(std::vector<double> rho,
                                   std::vector<double> p) {
  const std::size_t n = rho.size();
  if (n < 4 || p.size() != n)
    throw ConfigError("pressure", "tabulated law needs >= 4 matched samples");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(rho[i] > rho[i - 1]))
      throw ConfigError("pressure", "tabulated rho samples must increase");
    if (!(p[i] > p[i - 1]))
      throw ConfigError("pressure",
                        "tabulated p samples must increase (p' > 0)");
  }
  PressureLaw law;
  law.kind_ = Kind::Tabulated;
  law.rho_min_ = rho.front();
  law.rho_max_ = rho.back();
  law.tab_rho_ = std::move(rho);
  law.tab_p_ = std::move(p);

  // natural cubic spline second derivatives via the tridiagonal system
  law.tab_m_.assign(n, 0.0);
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = law.tab_rho_[i] - law.tab_rho_[i - 1];
    const double hr = law.tab_rho_[i + 1] - law.tab_rho_[i];
    const double rhs = 6.0 * ((law.tab_p_[i + 1] - law.tab_p_[i]) / hr -
                              (law.tab_p_[i] - law.tab_p_[i - 1]) / hl);
    const double diag = 2.0 * (hl + hr) - hl * c[i - 1];
    c[i] = hr / diag;
    d[i] = (rhs - hl * d[i - 1]) / diag;
  }
  for (std::size_t i = n - 1; i-- > 1;)
    law.tab_m_[i] = d[i] - c[i] * law.tab_m_[i + 1];

  // spot-check monotonicity of the interpolant, not just the knots
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (int s = 0; s <= 4; ++s) {
      const double r = law.tab_rho_[i] +
                       (law.tab_rho_[i + 1] - law.tab_rho_[i]) * s / 4.0;
      if (!(law.deriv(r, 1) > 0.0))
        throw ConfigError("pressure",
                          "tabulated law violates p' > 0 between samples");
    }
  }
  return law;
}

void PressureLaw::check_domain(double rho) const {
  const bool ok = (kind_ == Kind::Tabulated)
                      ? (rho >= rho_min_ && rho <= rho_max_)
                      : (rho > rho_min_ && rho < rho_max_);
  if (!ok || !std::isfinite(rho)) {
    std::ostringstream os;
    os << "density " << rho << " outside admissible interval ";
    os << (kind_ == Kind::Tabulated ? "[" : "(") << rho_min_ << ", "
       << rho_max_ << (kind_ == Kind::Tabulated ? "]" : ")");
    throw ConfigError("pressure", os.str());
  }
}

double PressureLaw::value(double rho) const { return deriv(rho, 0); }

PressureLaw::Eval PressureLaw::eval(double rho) const {
  return Eval{deriv(rho, 0), deriv(rho, 1), deriv(rho, 2)};
}

double PressureLaw::deriv(double rho, int order) const {
  check_domain(rho);
  if (order < 0) throw ConfigError("pressure", "derivative order must be >= 0");
  switch (kind_) {
    case Kind::GammaLaw: {
      double coeff = scale_;
      for (int j = 0; j < order; ++j) coeff *= (gamma_ - j);
      return coeff * std::pow(rho, gamma_ - order);
    }
    case Kind::Linear: {
      if (order == 0) return c_squared_ * rho;
      if (order == 1) return c_squared_;
      return 0.0;
    }
    case Kind::Tabulated: {
      if (order > 3)
        throw ConfigError("pressure",
                          "tabulated law supports derivatives up to order 3");
      std::size_t lo = 0, hi = tab_rho_.size() - 1;
      while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (tab_rho_[mid] <= rho ? lo : hi) = mid;
      }
      const double h = tab_rho_[lo + 1] - tab_rho_[lo];
      const double a = (tab_rho_[lo + 1] - rho) / h;
      const double b = (rho - tab_rho_[lo]) / h;
      const double ml = tab_m_[lo], mr = tab_m_[lo + 1];
      switch (order) {
        case 0:
          return a * tab_p_[lo] + b * tab_p_[lo + 1] +
                 ((a * a * a - a) * ml + (b * b * b - b) * mr) * h * h / 6.0;
        case 1:
          return (tab_p_[lo + 1] - tab_p_[lo]) / h -
                 (3.0 * a * a - 1.0) / 6.0 * h * ml +
                 (3.0 * b * b - 1.0) / 6.0 * h * mr;
        case 2:
          return a * ml + b * mr;
        default:
          return (mr - ml) / h;
      }
    }
  }
  return 0.0;  // unreachable
}

std::string PressureLaw::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::GammaLaw:
      os << "gamma-law p = " << scale_ << " * rho^" << gamma_;
      break;
    case Kind::Linear:
      os << "linear p = " << c_squared_ << " * rho";
      break;
    case Kind::Tabulated:
      os << "tabulated (" << tab_rho_.size() << " samples on [" << rho_min_
         << ", " << rho_max_ << "])";
      break;
  }
  return os.str();
}

}  // namespace dwlab
