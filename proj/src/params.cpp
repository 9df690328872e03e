#include "dwlab/params.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "dwlab/errors.hpp"

namespace dwlab {

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (den == 0) throw ConfigError("params", "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

std::optional<Rational> Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const std::int64_t n = std::stoll(text, &used);
      if (used != text.size()) return std::nullopt;
      return Rational(n, 1);
    }
    const std::int64_t n = std::stoll(text.substr(0, slash), &used);
    if (used != slash) return std::nullopt;
    const std::string den_part = text.substr(slash + 1);
    const std::int64_t d = std::stoll(den_part, &used);
    if (used != den_part.size()) return std::nullopt;
    return Rational(n, d);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

Params::Params(double lam, double rm, double rp,
               std::optional<Rational> lam_rat)
    : lambda(lam), rho_minus(rm), rho_plus(rp),
      lambda_rational(std::move(lam_rat)) {
  if (!(lambda > 0.0) || !(lambda < 1.0)) {
    std::ostringstream os;
    os << "lambda = " << lambda << " outside (0, 1)";
    throw ConfigError("params", os.str());
  }
  if (!(rho_minus > 0.0) || !(rho_plus > 0.0))
    throw ConfigError("params", "far-field densities must be positive");
  if (lambda_rational &&
      std::abs(lambda_rational->value() - lambda) > 1e-15 * (1.0 + lambda))
    throw ConfigError("params", "rational lambda disagrees with its value");
}

KThresholds k_thresholds(double lambda,
                         const std::optional<Rational>& lambda_rational) {
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw ConfigError("params", "k_thresholds needs lambda in (0, 1)");

  KThresholds out;
  out.k = 3.0 * (1.0 + lambda) / (4.0 * (1.0 - lambda));

  if (lambda_rational) {
    // k = 3(q+p) / (4(q-p)) exactly
    const std::int64_t p = lambda_rational->num;
    const std::int64_t q = lambda_rational->den;
    const Rational k_exact(3 * (q + p), 4 * (q - p));
    out.integer_k = k_exact.is_integer();
    const double kf = k_exact.value();
    out.k0 = out.integer_k ? static_cast<int>(kf) - 1
                           : static_cast<int>(std::floor(kf));
  } else {
    const double nearest = std::round(out.k);
    out.integer_k = nearest >= 1.0 &&
                    std::abs(out.k - nearest) <= 1e-12 * std::max(1.0, out.k);
    out.k0 = out.integer_k ? static_cast<int>(nearest) - 1
                           : static_cast<int>(std::floor(out.k));
  }
  if (out.k0 < 0) out.k0 = 0;
  return out;
}

HierarchyConstants HierarchyConstants::make(double lambda, int k) {
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw ConfigError("params", "hierarchy constants need lambda in (0, 1)");
  if (k < 1)
    throw ConfigError("params", "hierarchy constants need order k >= 1");

  HierarchyConstants hc;
  hc.lambda = lambda;
  const double sigma = 1.0 - lambda;
  const int k0 = k_thresholds(lambda).k0;
  for (int i = 1; i <= k; ++i) {
    const double c1 = i * sigma - (1.0 + lambda);
    const double c2 = (i * sigma - 1.0) * ((i - 1) * sigma - (1.0 + lambda));
    if (i <= k0 && !(c1 < 0.0)) {
      std::ostringstream os;
      os << "c1_" << i << " = " << c1 << " is not negative at lambda = "
         << lambda << "; hierarchy order " << i << " would be degenerate";
      throw HierarchyError("constants", os.str());
    }
    hc.c1.push_back(c1);
    hc.c2.push_back(c2);
  }
  return hc;
}

}  // namespace dwlab
