#include "dwlab/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dwlab/errors.hpp"
#include "dwlab/grid.hpp"

namespace dwlab {

ExpansionEvaluator::ExpansionEvaluator(const WaveProfile& profile,
                                       const CorrectionSet& corr, int k,
                                       const PressureLaw& law)
    : k_(k), params_(profile.params), grid_(profile.grid), law_(law),
      positivity_floor_(
          0.5 * std::min(profile.params.rho_minus, profile.params.rho_plus)) {
  if (k < 0 || k > static_cast<int>(corr.levels.size())) {
    std::ostringstream os;
    os << "expansion order " << k << " not available (built "
       << corr.levels.size() << " levels)";
    throw HierarchyError("expansion", os.str());
  }

  const double x0 = grid_.nodes.front();
  const double h = grid_.h;
  rho_bar_ = CubicTable(x0, h, profile.rho, profile.drho, params_.rho_minus,
                        params_.rho_plus);
  drho_bar_ = CubicTable(x0, h, profile.drho, profile.d2rho, 0.0, 0.0);
  Mbar_ = CubicTable(x0, h, profile.Mbar, profile.dMbar, 0.0, 0.0);
  dMbar_ = CubicTable(x0, h, profile.dMbar, 0.0, 0.0);

  t_rho_ = profile.rho;
  t_drho_ = profile.drho;
  t_Mbar_ = profile.Mbar;
  t_dMbar_ = profile.dMbar;

  for (int i = 1; i <= k; ++i) {
    const Correction& c = corr.at(i);
    rho_i_.emplace_back(x0, h, c.rho, c.drho, 0.0, 0.0);
    drho_i_.emplace_back(x0, h, c.drho, 0.0, 0.0);
    m_i_.emplace_back(x0, h, c.m, c.dm, 0.0, 0.0);
    dm_i_.emplace_back(x0, h, c.dm, 0.0, 0.0);
    t_rho_i_.push_back(c.rho);
    t_drho_i_.push_back(c.drho);
    t_m_i_.push_back(c.m);
    t_dm_i_.push_back(c.dm);
  }

  // The expansion is asymptotic in t: high orders can overwhelm the profile
  // at early times (weights (1+t)^(-i sigma) all equal 1 at t = 0), so
  // positivity is guarded per evaluation rather than at construction.
}

double ExpansionEvaluator::xi_of(double x, double t) const {
  return x * std::pow(1.0 + t, -0.5 * (1.0 + params_.lambda));
}

ExpansionEvaluator::State ExpansionEvaluator::evaluate(double x,
                                                       double t) const {
  const double xi = xi_of(x, t);
  const double sigma = params_.sigma();
  double rho = rho_bar_(xi);
  double m = std::pow(1.0 + t, -0.5 * sigma) * Mbar_(xi);
  for (int i = 1; i <= k_; ++i) {
    rho += std::pow(1.0 + t, -i * sigma) * rho_i_[i - 1](xi);
    m += std::pow(1.0 + t, -(i + 0.5) * sigma) * m_i_[i - 1](xi);
  }
  if (rho < positivity_floor_) {
    std::ostringstream os;
    os << "expansion density " << rho << " below guard at x = " << x
       << ", t = " << t;
    throw SolverError("expansion", os.str());
  }
  return {rho, m};
}

ExpansionEvaluator::Local ExpansionEvaluator::local_at_xi(double xi,
                                                          double t) const {
  const double sigma = params_.sigma();
  Local out{rho_bar_(xi), drho_bar_(xi),
            std::pow(1.0 + t, -0.5 * sigma) * Mbar_(xi),
            std::pow(1.0 + t, -0.5 * sigma) * dMbar_(xi)};
  for (int i = 1; i <= k_; ++i) {
    const double wr = std::pow(1.0 + t, -i * sigma);
    const double wm = std::pow(1.0 + t, -(i + 0.5) * sigma);
    out.rho += wr * rho_i_[i - 1](xi);
    out.drho += wr * drho_i_[i - 1](xi);
    out.m += wm * m_i_[i - 1](xi);
    out.dm += wm * dm_i_[i - 1](xi);
  }
  return out;
}

ExpansionEvaluator::Slice ExpansionEvaluator::slice(double t) const {
  const int nn = grid_.size();
  const double sigma = params_.sigma();
  const double a = 0.5 * (1.0 + params_.lambda);

  Slice s;
  s.rho = t_rho_;
  s.drho = t_drho_;
  s.m.assign(nn, 0.0);
  s.dm.assign(nn, 0.0);
  s.m_t.assign(nn, 0.0);

  const double w0 = std::pow(1.0 + t, -0.5 * sigma);
  for (int j = 0; j < nn; ++j) {
    s.m[j] = w0 * t_Mbar_[j];
    s.dm[j] = w0 * t_dMbar_[j];
    s.m_t[j] = -w0 / (1.0 + t) *
               (0.5 * sigma * t_Mbar_[j] + a * grid_.nodes[j] * t_dMbar_[j]);
  }
  for (int i = 1; i <= k_; ++i) {
    const double wr = std::pow(1.0 + t, -i * sigma);
    const double wm = std::pow(1.0 + t, -(i + 0.5) * sigma);
    const double am = (i + 0.5) * sigma;
    for (int j = 0; j < nn; ++j) {
      s.rho[j] += wr * t_rho_i_[i - 1][j];
      s.drho[j] += wr * t_drho_i_[i - 1][j];
      s.m[j] += wm * t_m_i_[i - 1][j];
      s.dm[j] += wm * t_dm_i_[i - 1][j];
      s.m_t[j] += -wm / (1.0 + t) *
                  (am * t_m_i_[i - 1][j] +
                   a * grid_.nodes[j] * t_dm_i_[i - 1][j]);
    }
  }
  return s;
}

std::vector<double> ExpansionEvaluator::source_on_nodes(double t) const {
  const int nn = grid_.size();
  const Slice s = slice(t);

  std::vector<double> flux(nn);
  for (int j = 0; j < nn; ++j) {
    if (s.rho[j] < positivity_floor_) {
      std::ostringstream os;
      os << "expansion density " << s.rho[j] << " below guard at t = " << t
         << " (order " << k_ << " is not usable this early)";
      throw SolverError("expansion", os.str());
    }
    flux[j] = s.m[j] * s.m[j] / s.rho[j] + law_.value(s.rho[j]);
  }
  const std::vector<double> dflux = derivative1(flux, grid_.h);

  const double damp = std::pow(1.0 + t, -params_.lambda);
  const double jac = std::pow(1.0 + t, -0.5 * (1.0 + params_.lambda));
  std::vector<double> S(nn);
  for (int j = 0; j < nn; ++j)
    S[j] = s.m_t[j] + jac * dflux[j] + damp * s.m[j];
  return S;
}

std::vector<double> ExpansionEvaluator::source_direct(
    const std::vector<double>& x, double t, bool strict,
    bool* under_resolved) const {
  const std::size_t n = x.size();
  if (n < 5)
    throw SolverError("expansion", "source_direct needs >= 5 x-samples");
  const double dx = x[1] - x[0];
  for (std::size_t j = 1; j + 1 < n; ++j) {
    if (std::abs((x[j + 1] - x[j]) - dx) > 1e-9 * std::abs(dx))
      throw SolverError("expansion", "source_direct needs a uniform x-grid");
  }

  const double scale = std::pow(1.0 + t, 0.5 * (1.0 + params_.lambda));
  const bool bad = dx > 0.1 * scale * grid_.h;
  if (under_resolved) *under_resolved = bad;
  if (bad && strict) {
    std::ostringstream os;
    os << "x-grid spacing " << dx << " does not resolve the wave at t = "
       << t << " (need <= " << 0.1 * scale * grid_.h << ")";
    throw SolverError("expansion", os.str());
  }

  const double sigma = params_.sigma();
  const double a = 0.5 * (1.0 + params_.lambda);
  std::vector<double> flux(n), m(n), m_t(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double xi = xi_of(x[j], t);
    const Local loc = local_at_xi(xi, t);
    m[j] = loc.m;
    flux[j] = loc.m * loc.m / loc.rho + law_.value(loc.rho);
    const double w0 = std::pow(1.0 + t, -0.5 * sigma);
    double mt = -w0 / (1.0 + t) * (0.5 * sigma * Mbar_(xi) + a * xi * dMbar_(xi));
    for (int i = 1; i <= k_; ++i) {
      const double wm = std::pow(1.0 + t, -(i + 0.5) * sigma);
      mt += -wm / (1.0 + t) *
            ((i + 0.5) * sigma * m_i_[i - 1](xi) + a * xi * dm_i_[i - 1](xi));
    }
    m_t[j] = mt;
  }
  const std::vector<double> dflux = derivative1(flux, dx);
  const double damp = std::pow(1.0 + t, -params_.lambda);
  std::vector<double> S(n);
  for (std::size_t j = 0; j < n; ++j)
    S[j] = m_t[j] + dflux[j] + damp * m[j];
  return S;
}

ResidualScan residual_decay_scan(const ExpansionEvaluator& ev,
                                 const std::vector<double>& t_list,
                                 double tolerance) {
  if (t_list.size() < 8)
    throw SolverError("expansion", "decay scan needs >= 8 times");
  for (std::size_t j = 1; j < t_list.size(); ++j)
    if (!(t_list[j] > t_list[j - 1]))
      throw SolverError("expansion", "scan times must increase");
  if ((1.0 + t_list.back()) / (1.0 + t_list.front()) < 99.0)
    throw SolverError("expansion", "decay scan needs >= 2 decades of time");

  const Params& p = ev.params();
  ResidualScan scan;
  scan.times = t_list;
  scan.tolerance = tolerance;
  const double h = ev.grid().h;
  for (double t : t_list) {
    const std::vector<double> S = ev.source_on_nodes(t);
    const double jac = std::pow(1.0 + t, 0.5 * (1.0 + p.lambda));
    std::vector<double> s2(S.size());
    for (std::size_t j = 0; j < S.size(); ++j) s2[j] = S[j] * S[j];
    scan.l2.push_back(std::sqrt(jac * integrate(s2, h)));
    scan.linf.push_back(max_abs(S));
  }

  const double k1s = (ev.order() + 1) * p.sigma();
  scan.predicted_linf = -0.5 * (1.0 + p.lambda) - k1s;
  scan.predicted_l2 = -0.25 * (1.0 + p.lambda) - k1s;
  scan.fit_l2 = fit_powerlaw(scan.times, scan.l2);
  scan.fit_linf = fit_powerlaw(scan.times, scan.linf);
  scan.pass_l2 = std::abs(scan.fit_l2.slope - scan.predicted_l2) <= tolerance;
  scan.pass_linf =
      std::abs(scan.fit_linf.slope - scan.predicted_linf) <= tolerance;
  scan.fit_ok = scan.fit_l2.r2 >= 0.99 && scan.fit_linf.r2 >= 0.99;
  return scan;
}

double shift_x0(const std::vector<double>& x, const std::vector<double>& rho0,
                const ExpansionEvaluator& ev) {
  if (x.size() != rho0.size() || x.size() < 3)
    throw ConfigError("expansion", "shift_x0 needs matching x/rho samples");
  const double jump = ev.params().jump();
  if (jump == 0.0)
    throw ConfigError("expansion",
                      "shift is degenerate when rho_+ = rho_- (zero jump)");
  const double dx = x[1] - x[0];
  std::vector<double> diff(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    diff[j] = rho0[j] - ev.evaluate(x[j], 0.0).rho;
  double integral;
  if (x.size() % 2 == 1) {
    integral = integrate(diff, dx);
  } else {
    integral = 0.0;
    for (std::size_t j = 0; j + 1 < x.size(); ++j)
      integral += 0.5 * dx * (diff[j] + diff[j + 1]);
  }
  return integral / jump;
}

std::vector<double> log_spaced_times(double t_min, double t_max, int count) {
  std::vector<double> out;
  out.reserve(count);
  for (int j = 0; j < count; ++j) {
    const double f = static_cast<double>(j) / (count - 1);
    out.push_back(std::exp(std::log(t_min) + f * (std::log(t_max) -
                                                  std::log(t_min))));
  }
  out.front() = t_min;
  out.back() = t_max;  // exp/log round trips must not overshoot the end time
  return out;
}

}  // namespace dwlab
