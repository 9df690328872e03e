#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dwlab {

/// Exact rational, used so that integer-valued rate indices k(lambda) are
/// detected without floating-point guessing when lambda is given as p/q.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d);

  double value() const { return static_cast<double>(num) / den; }
  bool is_integer() const { return den == 1; }

  Rational operator*(std::int64_t s) const { return {num * s, den}; }
  Rational operator+(const Rational& o) const {
    return {num * o.den + o.num * den, den * o.den};
  }
  Rational operator-(const Rational& o) const {
    return {num * o.den - o.num * den, den * o.den};
  }
  Rational operator/(const Rational& o) const {
    return {num * o.den, den * o.num};
  }

  /// Parses "p/q" or a plain integer string. Returns nullopt for anything
  /// else (decimals go through the floating-point path).
  static std::optional<Rational> parse(const std::string& text);
};

/// Damping exponent and far-field densities. sigma and delta are derived and
/// the object is immutable after construction.
struct Params {
  double lambda = 0.5;
  double rho_minus = 1.0;
  double rho_plus = 1.05;
  std::optional<Rational> lambda_rational;  // set when lambda came in as p/q

  Params() = default;
  Params(double lam, double rm, double rp,
         std::optional<Rational> lam_rat = std::nullopt);

  double sigma() const { return 1.0 - lambda; }
  double delta() const {
    return rho_plus >= rho_minus ? rho_plus - rho_minus
                                 : rho_minus - rho_plus;
  }
  /// Signed jump rho_plus - rho_minus.
  double jump() const { return rho_plus - rho_minus; }
};

struct KThresholds {
  double k = 0.0;     // 3(1+lambda)/(4(1-lambda))
  int k0 = 0;         // floor(k), minus one when k is a positive integer
  bool integer_k = false;
};

/// Rate-crossover index k(lambda) and the largest justified expansion order
/// k0(lambda). Detection of integer k is exact when lambda_rational is set,
/// otherwise uses a 1e-12 tolerance.
KThresholds k_thresholds(double lambda,
                         const std::optional<Rational>& lambda_rational =
                             std::nullopt);

inline KThresholds k_thresholds(const Params& p) {
  return k_thresholds(p.lambda, p.lambda_rational);
}

/// Per-order constants of the correction hierarchy:
///   c1_i = i*sigma - (1+lambda),  c2_i = (i*sigma - 1)((i-1)*sigma - (1+lambda)).
/// c1_1 = -2*lambda for every lambda; c1_i < 0 is required for every built
/// order (it sets the sign of the Fourier kernel exponent) and is checked at
/// construction.
struct HierarchyConstants {
  double lambda = 0.0;
  std::vector<double> c1;  // c1[i-1] holds c1_i
  std::vector<double> c2;

  static HierarchyConstants make(double lambda, int k);

  double c1_at(int i) const { return c1.at(i - 1); }
  double c2_at(int i) const { return c2.at(i - 1); }
  int order() const { return static_cast<int>(c1.size()); }
};

}  // namespace dwlab
