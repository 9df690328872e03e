#include "dwlab/grid.hpp"

#include <cmath>
#include <sstream>

#include "dwlab/errors.hpp"

namespace dwlab {

XiGrid XiGrid::make(double half_width, int n) {
  if (!(half_width > 0.0))
    throw ConfigError("grid", "half width must be positive");
  if (n < 8 || n % 2 != 0)
    throw ConfigError("grid", "interval count must be even and >= 8");
  XiGrid g;
  g.half_width = half_width;
  g.n = n;
  g.h = 2.0 * half_width / n;
  g.nodes.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    // build symmetrically so that nodes[j] == -nodes[n-j] holds exactly
    const int k = j - n / 2;
    g.nodes[j] = k * g.h;
  }
  g.nodes[0] = -half_width;
  g.nodes[n] = half_width;
  return g;
}

std::vector<double> derivative1(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 5) throw ConfigError("grid", "derivative1 needs >= 5 nodes");
  std::vector<double> d(n);
  const double ih = 1.0 / h;
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] -
          3.0 * f[4]) / 12.0 * ih;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) /
         12.0 * ih;
  for (std::size_t j = 2; j + 2 < n; ++j)
    d[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / 12.0 * ih;
  d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] +
              6.0 * f[n - 4] - f[n - 5]) / 12.0 * ih;
  d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] -
              16.0 * f[n - 4] + 3.0 * f[n - 5]) / 12.0 * ih;
  return d;
}

std::vector<double> derivative2(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 6) throw ConfigError("grid", "derivative2 needs >= 6 nodes");
  std::vector<double> d(n);
  const double ih2 = 1.0 / (h * h);
  // 6-point one-sided stencils, 4th order
  d[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] +
          61.0 * f[4] - 10.0 * f[5]) / 12.0 * ih2;
  d[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] -
          6.0 * f[4] + f[5]) / 12.0 * ih2;
  for (std::size_t j = 2; j + 2 < n; ++j)
    d[j] = (-f[j - 2] + 16.0 * f[j - 1] - 30.0 * f[j] + 16.0 * f[j + 1] -
            f[j + 2]) / 12.0 * ih2;
  d[n - 2] = (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] +
              14.0 * f[n - 4] - 6.0 * f[n - 5] + f[n - 6]) / 12.0 * ih2;
  d[n - 1] = (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] -
              156.0 * f[n - 4] + 61.0 * f[n - 5] - 10.0 * f[n - 6]) /
             12.0 * ih2;
  return d;
}

std::vector<double> derivative1_order2(const std::vector<double>& f,
                                       double h) {
  const std::size_t n = f.size();
  if (n < 3) throw ConfigError("grid", "derivative1_order2 needs >= 3 nodes");
  std::vector<double> d(n);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t j = 1; j + 1 < n; ++j)
    d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

std::vector<double> derivative2_order2(const std::vector<double>& f,
                                       double h) {
  const std::size_t n = f.size();
  if (n < 4) throw ConfigError("grid", "derivative2_order2 needs >= 4 nodes");
  std::vector<double> d(n);
  const double ih2 = 1.0 / (h * h);
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * ih2;
  for (std::size_t j = 1; j + 1 < n; ++j)
    d[j] = (f[j - 1] - 2.0 * f[j] + f[j + 1]) * ih2;
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) *
             ih2;
  return d;
}

double integrate(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 3 || n % 2 == 0)
    throw ConfigError("grid", "Simpson integration needs an odd node count");
  double odd = 0.0, even = 0.0;
  for (std::size_t j = 1; j + 1 < n; j += 2) odd += f[j];
  for (std::size_t j = 2; j + 1 < n; j += 2) even += f[j];
  return h / 3.0 * (f[0] + f[n - 1] + 4.0 * odd + 2.0 * even);
}

std::vector<double> simpson_weights(std::size_t n_nodes, double h) {
  if (n_nodes < 3 || n_nodes % 2 == 0)
    throw ConfigError("grid", "Simpson weights need an odd node count");
  std::vector<double> w(n_nodes, 0.0);
  w[0] = w[n_nodes - 1] = h / 3.0;
  for (std::size_t j = 1; j + 1 < n_nodes; j += 2) w[j] = 4.0 * h / 3.0;
  for (std::size_t j = 2; j + 1 < n_nodes; j += 2) w[j] = 2.0 * h / 3.0;
  return w;
}

std::vector<double> cumulative_integral(const std::vector<double>& f,
                                        const std::vector<double>& df,
                                        double h) {
  const std::size_t n = f.size();
  if (df.size() != n)
    throw ConfigError("grid", "cumulative_integral needs matching tables");
  std::vector<double> out(n, 0.0);
  const double h2_12 = h * h / 12.0;
  for (std::size_t j = 1; j < n; ++j)
    out[j] = out[j - 1] + 0.5 * h * (f[j - 1] + f[j]) -
             h2_12 * (df[j] - df[j - 1]);
  return out;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& f,
                                         double h) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t j = 1; j < f.size(); ++j)
    out[j] = out[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l2_norm(const std::vector<double>& v, double h) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s * h);
}

}  // namespace dwlab
