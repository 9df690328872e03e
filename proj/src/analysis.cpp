#include "dwlab/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "dwlab/errors.hpp"
#include "dwlab/grid.hpp"

namespace dwlab {

FitResult fit_powerlaw(const std::vector<double>& times,
                       const std::vector<double>& values, bool divide_by_log,
                       double t_min) {
  if (times.size() != values.size())
    throw ConfigError("fit", "times/values size mismatch");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  int m = 0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (times[j] < t_min) continue;
    double v = values[j];
    if (divide_by_log) {
      const double lg = std::log(1.0 + times[j]);
      if (lg <= 0.0) continue;
      v /= lg;
    }
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    const double x = std::log(1.0 + times[j]);
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++m;
  }
  FitResult out;
  out.points = m;
  if (m < 2) return out;
  const double det = m * sxx - sx * sx;
  out.slope = (m * sxy - sx * sy) / det;
  out.intercept = (sy - out.slope * sx) / m;
  const double ss_tot = syy - sy * sy / m;
  double ss_res = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (times[j] < t_min) continue;
    double v = values[j];
    if (divide_by_log) {
      const double lg = std::log(1.0 + times[j]);
      if (lg <= 0.0) continue;
      v /= lg;
    }
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    const double x = std::log(1.0 + times[j]);
    const double r = std::log(v) - (out.intercept + out.slope * x);
    ss_res += r * r;
  }
  out.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

FitResult fit_decay(const std::vector<double>& times,
                    const std::vector<double>& values, bool divide_by_log,
                    double t_min) {
  return fit_powerlaw(times, values, divide_by_log, t_min);
}

namespace {

double trapezoid_l2(const std::vector<double>& f, double dx) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double w = (j == 0 || j + 1 == f.size()) ? 0.5 : 1.0;
    s += w * f[j] * f[j];
  }
  return std::sqrt(s * dx);
}

}  // namespace

RemainderRecord remainder(const SimState& snap, const ExpansionEvaluator& ev,
                          int k) {
  if (k > ev.order())
    throw ConfigError("analysis", "remainder order exceeds evaluator order");
  const int nc = static_cast<int>(snap.rho.size());
  const double lambda = ev.params().lambda;
  const double sigma = 1.0 - lambda;

  RemainderRecord rec;
  rec.t = snap.t;
  rec.P.resize(nc);
  rec.Q.resize(nc);

  // physical grid spacing; in the self-similar frame x = xi (1+t)^((1+l)/2)
  const double scale = (snap.frame == Frame::SelfSimilar)
                           ? std::pow(1.0 + snap.t, 0.5 * (1.0 + lambda))
                           : 1.0;
  rec.dx = snap.dx * scale;

  for (int j = 0; j < nc; ++j) {
    const double x = snap.physical_x(j, lambda);
    // the expansion may be re-centered by the initial-data shift
    const double xi = ev.xi_of(x + snap.x_shift, snap.t);
    const ExpansionEvaluator::Local loc = ev.local_at_xi(xi, snap.t);
    // rebuild at the requested order k (evaluator may hold more levels);
    // local_at_xi uses the evaluator's own order, so only k == order is
    // cheap; for smaller k subtract the extra levels explicitly
    double rho_k = loc.rho;
    double m_k = loc.m;
    if (k < ev.order()) {
      // strip levels k+1..order
      for (int i = k + 1; i <= ev.order(); ++i) {
        rho_k -= std::pow(1.0 + snap.t, -i * sigma) * ev.level_rho(i, xi);
        m_k -= std::pow(1.0 + snap.t, -(i + 0.5) * sigma) * ev.level_m(i, xi);
      }
    }
    rec.P[j] = snap.rho[j] - rho_k;
    rec.Q[j] = snap.physical_m(j, lambda) - m_k;
  }

  rec.dP = derivative1(rec.P, rec.dx);
  rec.dQ = derivative1(rec.Q, rec.dx);
  rec.d2P = derivative2(rec.P, rec.dx);
  rec.d2Q = derivative2(rec.Q, rec.dx);

  rec.p_l2 = {trapezoid_l2(rec.P, rec.dx), trapezoid_l2(rec.dP, rec.dx),
              trapezoid_l2(rec.d2P, rec.dx)};
  rec.q_l2 = {trapezoid_l2(rec.Q, rec.dx), trapezoid_l2(rec.dQ, rec.dx),
              trapezoid_l2(rec.d2Q, rec.dx)};
  rec.p_linf = max_abs(rec.P);
  rec.dp_linf = max_abs(rec.dP);
  rec.q_linf = max_abs(rec.Q);

  // interpolation-inequality consistency, with quadrature slack
  const double slack = 1.0 + 1e-6 + 10.0 * rec.dx;
  rec.sobolev_ok =
      rec.p_linf * rec.p_linf <= rec.p_l2[0] * rec.p_l2[1] * slack + 1e-300 &&
      rec.q_linf * rec.q_linf <= rec.q_l2[0] * rec.q_l2[1] * slack + 1e-300;
  return rec;
}

std::vector<double> norm_series(const std::vector<RemainderRecord>& records,
                                NormKind kind, int deriv_order) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    switch (kind) {
      case NormKind::PL2: out.push_back(r.p_l2[deriv_order]); break;
      case NormKind::PLinf: out.push_back(r.p_linf); break;
      case NormKind::DPLinf: out.push_back(r.dp_linf); break;
      case NormKind::QL2: out.push_back(r.q_l2[deriv_order]); break;
      case NormKind::QLinf: out.push_back(r.q_linf); break;
    }
  }
  return out;
}

std::vector<EnergyRecord> energy_functional(
    const std::vector<RemainderRecord>& records, double lambda) {
  std::vector<EnergyRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.P.empty()) continue;
    EnergyRecord e;
    e.t = r.t;

    // y(x) = -Int_-inf^x P; the snapshot grid covers the support
    std::vector<double> y = cumulative_integral(r.P, r.dP, r.dx);
    for (double& v : y) v = -v;
    e.y_right_end = y.back();
    double abs_mass = 0.0;
    for (double v : r.P) abs_mass += std::abs(v) * r.dx;
    e.mass_neutral = std::abs(e.y_right_end) <= 0.05 * abs_mass + 1e-12;

    const double y_l2 = trapezoid_l2(y, r.dx);
    const std::array<const std::vector<double>*, 3> yt = {&r.Q, &r.dQ, &r.d2Q};
    const std::array<const std::vector<double>*, 3> yx = {&r.P, &r.dP, &r.d2P};
    e.n2 = y_l2 * y_l2;
    for (int i = 0; i <= 2; ++i) {
      const double w = std::pow(1.0 + r.t, (i + 1) * (1.0 + lambda));
      const double a = trapezoid_l2(*yt[i], r.dx);
      const double b = trapezoid_l2(*yx[i], r.dx);
      e.n2 += w * (a * a + b * b);
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace dwlab
