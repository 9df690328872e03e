#pragma once

#include <cstddef>
#include <vector>

namespace dwlab {

/// Uniform node grid on [-L, L], symmetric about 0. n is the number of
/// intervals (n+1 nodes) and must be even so that composite Simpson weights
/// exist and 0 is a node.
struct XiGrid {
  double half_width = 12.0;
  int n = 2048;
  double h = 0.0;
  std::vector<double> nodes;

  static XiGrid make(double half_width, int n);

  int size() const { return n + 1; }
  double operator[](int j) const { return nodes[j]; }
};

/// 4th-order first derivative of a tabulated function on a uniform grid.
/// Interior: 5-point centered; first/last two nodes: 5-point one-sided.
std::vector<double> derivative1(const std::vector<double>& f, double h);

/// 4th-order second derivative, same stencil layout.
std::vector<double> derivative2(const std::vector<double>& f, double h);

/// 2nd-order centered first/second derivatives (independent low-order
/// route, used by residual oracles and refinement checks).
std::vector<double> derivative1_order2(const std::vector<double>& f, double h);
std::vector<double> derivative2_order2(const std::vector<double>& f, double h);

/// Composite Simpson integral over the whole grid; f.size() must be odd.
double integrate(const std::vector<double>& f, double h);

/// Simpson weights matching integrate(), as a vector.
std::vector<double> simpson_weights(std::size_t n_nodes, double h);

/// Cumulative integral from the left end, 4th-order accurate
/// (trapezoid with the Euler-Maclaurin slope correction). df is the
/// tabulated derivative of f... i.e. this integrates the samples `f`
/// using their derivative table `df` for the correction term.
std::vector<double> cumulative_integral(const std::vector<double>& f,
                                        const std::vector<double>& df,
                                        double h);

/// Plain cumulative trapezoid (2nd order), for when no derivative table
/// is available.
std::vector<double> cumulative_trapezoid(const std::vector<double>& f,
                                         double h);

double max_abs(const std::vector<double>& v);
double l2_norm(const std::vector<double>& v, double h);

}  // namespace dwlab
