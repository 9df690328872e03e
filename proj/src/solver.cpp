#include "dwlab/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "dwlab/errors.hpp"

namespace dwlab {

double SimState::mass() const {
  double s = 0.0;
  for (double r : rho) s += r;
  return s * dx;
}

double SimState::physical_m(int j, double lambda) const {
  if (frame == Frame::Fixed) return mom[j];
  return std::pow(1.0 + t, -0.5 * (1.0 - lambda)) * mom[j];
}

double SimState::physical_x(int j, double lambda) const {
  if (frame == Frame::Fixed) return centers[j];
  return centers[j] * std::pow(1.0 + t, 0.5 * (1.0 + lambda));
}

namespace {

double bump(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

// max |d/du bump| used to normalize difference-bump amplitudes
double bump_slope_max() {
  static const double v = [] {
    double m = 0.0;
    for (int i = 1; i < 2000; ++i) {
      const double u = -1.0 + 2.0 * i / 2000.0;
      const double b = bump(u);
      if (b == 0.0) continue;
      const double db = b * (-2.0 * u) / ((1.0 - u * u) * (1.0 - u * u));
      m = std::max(m, std::abs(db));
    }
    return m;
  }();
  return v;
}

double tail_potential(double u) { return std::pow(1.0 + u * u, -0.25); }

double tail_slope_max() {
  // |d/du (1+u^2)^(-1/4)| peaks at u = sqrt(1/... ) ~ 0.82; sample it
  static const double v = [] {
    double m = 0.0;
    for (int i = 1; i < 4000; ++i) {
      const double u = -4.0 + 8.0 * i / 4000.0;
      const double d = 0.5 * u * std::pow(1.0 + u * u, -1.25);
      m = std::max(m, std::abs(d));
    }
    return m;
  }();
  return v;
}

struct Workspace {
  int nc = 0;
  // extended arrays with two ghost cells per side
  std::vector<double> rho, mom;        // stage state
  std::vector<double> sr, sm;          // limited slopes
  std::vector<double> frho, fmom;      // interface fluxes (nc + 1)
  std::vector<double> phi_r0, phi_m0;  // stage-1 operator
  std::vector<double> phi_r1, phi_m1;  // stage-2 operator
  std::vector<double> rho1, mom1;      // stage-1 state

  explicit Workspace(int n)
      : nc(n), rho(n + 4), mom(n + 4), sr(n + 4), sm(n + 4), frho(n + 1),
        fmom(n + 1), phi_r0(n), phi_m0(n), phi_r1(n), phi_m1(n), rho1(n),
        mom1(n) {}
};

double limited_slope(Limiter lim, double dl, double dr) {
  switch (lim) {
    case Limiter::Minmod:
      if (dl * dr <= 0.0) return 0.0;
      return (std::abs(dl) < std::abs(dr)) ? dl : dr;
    case Limiter::MC: {
      if (dl * dr <= 0.0) return 0.0;
      const double c = 0.5 * (dl + dr);
      const double lim2 = 2.0 * ((std::abs(dl) < std::abs(dr)) ? dl : dr);
      return (std::abs(c) < std::abs(lim2)) ? c : lim2;
    }
    case Limiter::Central:
      return 0.5 * (dl + dr);
  }
  return 0.0;
}

// frame-dependent physical flux and extremal wave speeds at one state
struct FluxEval {
  double f_rho, f_mom, lam_min, lam_max;
};

inline FluxEval eval_flux(const SimConfig& cfg, double rho, double mom,
                          double press_scale, double v_geom) {
  FluxEval e;
  const double u = mom / rho;
  const double p1 = cfg.law.deriv(rho, 1) * press_scale;
  const double c = std::sqrt(p1);
  const double p = cfg.law.value(rho) * press_scale;
  e.f_rho = mom - v_geom * rho;
  e.f_mom = mom * u + p - v_geom * mom;
  e.lam_min = u - v_geom - c;
  e.lam_max = u - v_geom + c;
  return e;
}

}  // namespace

SimState init_state(const SimConfig& config, const ExpansionEvaluator& ev) {
  const int nc = config.cells;
  if (nc < 16) throw ConfigError("solver", "need >= 16 cells");
  if (!(config.cfl > 0.0) || !(config.cfl < 1.0))
    throw ConfigError("solver", "CFL must lie in (0, 1)");
  if (!(config.t_end >= 1.0))
    throw ConfigError("solver", "end time must be >= 1");
  if (config.frame == Frame::SelfSimilar && config.t_end > 1e5)
    throw ConfigError("solver", "self-similar runs are capped at t = 1e5");
  if (config.frame == Frame::Fixed && config.t_end > 1e3)
    throw ConfigError("solver", "fixed-frame runs are capped at t = 1e3");

  const Params& prm = config.params;
  const double delta = prm.delta();
  const Perturbation& pert = config.perturbation;
  const double amp_cap = 2.0 * std::max(delta, 1e-12);
  if (std::abs(pert.amplitude_rho) > amp_cap ||
      std::abs(pert.amplitude_m) > amp_cap) {
    std::ostringstream os;
    os << "perturbation amplitude exceeds the smallness guard " << amp_cap
       << " (2 delta)";
    throw ConfigError("solver", os.str());
  }

  SimState st;
  st.frame = config.frame;
  st.t = 0.0;
  st.dx = 2.0 * config.half_width / nc;
  st.centers.resize(nc);
  st.rho.resize(nc);
  st.mom.resize(nc);
  for (int j = 0; j < nc; ++j)
    st.centers[j] = -config.half_width + (j + 0.5) * st.dx;

  // at t = 0 the self-similar coordinate coincides with x, so sampling is
  // frame-independent
  const double slope_norm = bump_slope_max();
  std::vector<double> pr(nc, 0.0), pm(nc, 0.0);
  double pr_mass = 0.0;
  for (int j = 0; j < nc; ++j) {
    const double x = st.centers[j];
    const double ul = (x - 0.5 * st.dx - pert.center) / pert.width;
    const double ur = (x + 0.5 * st.dx - pert.center) / pert.width;
    const double um = (x - pert.center) / pert.width;
    double shape;
    if (pert.kind == Perturbation::Kind::BumpDifference) {
      shape = (bump(ur) - bump(ul)) * pert.width / (st.dx * slope_norm);
    } else if (pert.kind == Perturbation::Kind::TailDifference) {
      shape = (tail_potential(ur) - tail_potential(ul)) * pert.width /
              (st.dx * tail_slope_max());
    } else {
      shape = bump(um);
    }
    pr[j] = pert.amplitude_rho * shape;
    pm[j] = pert.amplitude_m * shape;
    pr_mass += pr[j] * st.dx;
  }

  if (pert.kind == Perturbation::Kind::BumpRaw && std::abs(pr_mass) > 1e-14) {
    if (!pert.auto_shift)
      throw ConfigError("solver",
                        "perturbation carries mass; enable auto_shift or use "
                        "the mass-neutral difference bump");
    if (prm.jump() == 0.0)
      throw ConfigError("solver", "cannot shift a zero-jump profile");
    // re-centering that nulls the excess mass of the initial data
    st.x_shift = pr_mass / prm.jump();
  }

  for (int j = 0; j < nc; ++j) {
    const double x = st.centers[j] + st.x_shift;
    const ExpansionEvaluator::State base = ev.evaluate(x, 0.0);
    st.rho[j] = base.rho + pr[j];
    st.mom[j] = base.m + pm[j];
    if (!(st.rho[j] > 0.0) ||
        st.rho[j] < 0.25 * std::min(prm.rho_minus, prm.rho_plus)) {
      std::ostringstream os;
      os << "initial density " << st.rho[j] << " at x = " << x
         << " violates positivity";
      throw ConfigError("solver", os.str());
    }
  }
  st.mass_expected = st.mass();
  return st;
}

namespace {

void fill_ghosts(const SimConfig& cfg, const SimState& st, Workspace& w,
                 const std::vector<double>& rho,
                 const std::vector<double>& mom) {
  const int nc = w.nc;
  std::copy(rho.begin(), rho.end(), w.rho.begin() + 2);
  std::copy(mom.begin(), mom.end(), w.mom.begin() + 2);
  switch (cfg.boundary) {
    case Boundary::Periodic:
      w.rho[0] = rho[nc - 2];
      w.rho[1] = rho[nc - 1];
      w.rho[nc + 2] = rho[0];
      w.rho[nc + 3] = rho[1];
      w.mom[0] = mom[nc - 2];
      w.mom[1] = mom[nc - 1];
      w.mom[nc + 2] = mom[0];
      w.mom[nc + 3] = mom[1];
      break;
    case Boundary::FarField:
      if (cfg.frame == Frame::Fixed) {
        // wide-domain far field: constants (rho_-+, 0)
        w.rho[0] = w.rho[1] = cfg.params.rho_minus;
        w.rho[nc + 2] = w.rho[nc + 3] = cfg.params.rho_plus;
        w.mom[0] = w.mom[1] = 0.0;
        w.mom[nc + 2] = w.mom[nc + 3] = 0.0;
      } else {
        // one-sided extrapolation: the geometric advection switches between
        // inflow and outflow at +-L and the fields are flat there
        w.rho[0] = w.rho[1] = rho[0];
        w.rho[nc + 2] = w.rho[nc + 3] = rho[nc - 1];
        w.mom[0] = w.mom[1] = mom[0];
        w.mom[nc + 2] = w.mom[nc + 3] = mom[nc - 1];
      }
      break;
  }
  (void)st;
}

// One spatial-operator evaluation: fills phi_r/phi_m with -dF/dchi (+ forcing)
// and returns the boundary fluxes for the ledgers.
struct BoundaryFlux {
  double rho_left, rho_right, mom_left, mom_right;
};

BoundaryFlux spatial_operator(const SimConfig& cfg, const SimState& st,
                              Workspace& w, const std::vector<double>& rho,
                              const std::vector<double>& mom, double tau,
                              double t_phys, std::vector<double>& phi_r,
                              std::vector<double>& phi_m) {
  const int nc = w.nc;
  const double dx = st.dx;
  const bool selfsim = cfg.frame == Frame::SelfSimilar;
  const double lambda = cfg.params.lambda;
  const double press_scale =
      selfsim ? std::exp((1.0 - lambda) * tau) : 1.0;  // e^(sigma s)
  const double vcoef = selfsim ? 0.5 * (1.0 + lambda) : 0.0;

  if (cfg.disable_flux) {
    std::fill(phi_r.begin(), phi_r.end(), 0.0);
    std::fill(phi_m.begin(), phi_m.end(), 0.0);
    return {0.0, 0.0, 0.0, 0.0};
  }

  fill_ghosts(cfg, st, w, rho, mom);

  for (int e = 1; e < nc + 3; ++e) {
    w.sr[e] = limited_slope(cfg.limiter, w.rho[e] - w.rho[e - 1],
                            w.rho[e + 1] - w.rho[e]);
    w.sm[e] = limited_slope(cfg.limiter, w.mom[e] - w.mom[e - 1],
                            w.mom[e + 1] - w.mom[e]);
  }

  const double chi0 = st.centers[0] - 0.5 * dx;
  for (int i = 0; i <= nc; ++i) {
    const int el = i + 1;  // extended index of the left cell
    const int er = i + 2;
    const double chi_e = chi0 + i * dx;
    const double v_geom = vcoef * chi_e;

    const double rl = w.rho[el] + 0.5 * w.sr[el];
    const double ml = w.mom[el] + 0.5 * w.sm[el];
    const double rr = w.rho[er] - 0.5 * w.sr[er];
    const double mr = w.mom[er] - 0.5 * w.sm[er];
    if (!(rl > 0.0) || !(rr > 0.0)) {
      std::ostringstream os;
      os << "reconstructed density non-positive at interface " << i
         << ", t = " << t_phys;
      throw SolverError("solver", os.str());
    }

    const FluxEval L = eval_flux(cfg, rl, ml, press_scale, v_geom);
    const FluxEval R = eval_flux(cfg, rr, mr, press_scale, v_geom);

    if (cfg.flux == FluxScheme::Rusanov) {
      const double a = std::max(std::max(std::abs(L.lam_min), std::abs(L.lam_max)),
                                std::max(std::abs(R.lam_min), std::abs(R.lam_max)));
      w.frho[i] = 0.5 * (L.f_rho + R.f_rho) - 0.5 * a * (rr - rl);
      w.fmom[i] = 0.5 * (L.f_mom + R.f_mom) - 0.5 * a * (mr - ml);
    } else {
      const double sl = std::min(std::min(L.lam_min, R.lam_min), 0.0);
      const double sr2 = std::max(std::max(L.lam_max, R.lam_max), 0.0);
      if (sr2 - sl < 1e-300) {
        w.frho[i] = 0.5 * (L.f_rho + R.f_rho);
        w.fmom[i] = 0.5 * (L.f_mom + R.f_mom);
      } else {
        w.frho[i] = (sr2 * L.f_rho - sl * R.f_rho + sl * sr2 * (rr - rl)) /
                    (sr2 - sl);
        w.fmom[i] = (sr2 * L.f_mom - sl * R.f_mom + sl * sr2 * (mr - ml)) /
                    (sr2 - sl);
      }
    }
  }

  for (int j = 0; j < nc; ++j) {
    phi_r[j] = -(w.frho[j + 1] - w.frho[j]) / dx;
    phi_m[j] = -(w.fmom[j + 1] - w.fmom[j]) / dx;
  }
  if (cfg.forcing) {
    for (int j = 0; j < nc; ++j) {
      double fr = 0.0, fm = 0.0;
      cfg.forcing(st.centers[j], t_phys, &fr, &fm);
      phi_r[j] += fr;
      phi_m[j] += fm;
    }
  }
  return {w.frho[0], w.frho[nc], w.fmom[0], w.fmom[nc]};
}

double max_signal_speed(const SimConfig& cfg, const SimState& st,
                        const std::vector<double>& rho,
                        const std::vector<double>& mom, double tau) {
  const bool selfsim = cfg.frame == Frame::SelfSimilar;
  const double lambda = cfg.params.lambda;
  const double press_scale = selfsim ? std::exp((1.0 - lambda) * tau) : 1.0;
  const double vcoef = selfsim ? 0.5 * (1.0 + lambda) : 0.0;
  double vmax = 1e-12;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    const double u = mom[j] / rho[j] - vcoef * st.centers[j];
    const double c = std::sqrt(cfg.law.deriv(rho[j], 1) * press_scale);
    vmax = std::max(vmax, std::abs(u) + c);
  }
  return vmax;
}

}  // namespace

double step(SimState& st, const SimConfig& cfg, double dt_max) {
  const int nc = static_cast<int>(st.rho.size());
  static thread_local Workspace* wsp = nullptr;
  static thread_local int wsp_n = -1;
  if (!wsp || wsp_n != nc) {
    delete wsp;
    wsp = new Workspace(nc);
    wsp_n = nc;
  }
  Workspace& w = *wsp;

  const bool selfsim = cfg.frame == Frame::SelfSimilar;
  const double lambda = cfg.params.lambda;
  const double sigma = 1.0 - lambda;

  const double tau0 = selfsim ? std::log(1.0 + st.t) : st.t;

  const double vmax = max_signal_speed(cfg, st, st.rho, st.mom, tau0);
  double dtau = cfg.cfl * st.dx / vmax;
  // land exactly on the requested time
  double dtau_cap;
  if (selfsim) {
    dtau_cap = std::log(1.0 + std::min(dt_max, 1e290) / (1.0 + st.t));
  } else {
    dtau_cap = dt_max;
  }
  dtau = std::min(dtau, dtau_cap);
  if (!(dtau > 0.0) || !std::isfinite(dtau))
    throw SolverError("solver", "time step collapsed (CFL violation)");
  const double tau1 = tau0 + dtau;

  // exact integrals of the linear decay coefficients over the step
  double phi_rho_int, phi_mom_int;
  if (selfsim) {
    // a_rho = (1+lambda)/2;  a_M = lambda + e^(sigma s)
    phi_rho_int = 0.5 * (1.0 + lambda) * dtau;
    phi_mom_int = lambda * dtau +
                  (std::exp(sigma * tau1) - std::exp(sigma * tau0)) / sigma;
  } else {
    phi_rho_int = 0.0;
    phi_mom_int =
        (std::pow(1.0 + tau1, sigma) - std::pow(1.0 + tau0, sigma)) / sigma;
  }
  const double Er = std::exp(-phi_rho_int);
  const double Em = std::exp(-phi_mom_int);

  const double t0 = st.t;
  const double t1 = selfsim ? std::exp(tau1) - 1.0 : tau1;

  const BoundaryFlux bf0 = spatial_operator(cfg, st, w, st.rho, st.mom, tau0,
                                            t0, w.phi_r0, w.phi_m0);
  for (int j = 0; j < nc; ++j) {
    w.rho1[j] = Er * (st.rho[j] + dtau * w.phi_r0[j]);
    w.mom1[j] = Em * (st.mom[j] + dtau * w.phi_m0[j]);
    if (!(w.rho1[j] > 0.0)) {
      std::ostringstream os;
      os << "stage density non-positive in cell " << j << " at t = " << t0;
      throw SolverError("solver", os.str());
    }
  }

  const BoundaryFlux bf1 = spatial_operator(cfg, st, w, w.rho1, w.mom1, tau1,
                                            t1, w.phi_r1, w.phi_m1);
  for (int j = 0; j < nc; ++j) {
    st.rho[j] = Er * st.rho[j] +
                0.5 * dtau * (Er * w.phi_r0[j] + w.phi_r1[j]);
    st.mom[j] = Em * st.mom[j] +
                0.5 * dtau * (Em * w.phi_m0[j] + w.phi_m1[j]);
    if (!(st.rho[j] > 0.0)) {
      std::ostringstream os;
      os << "density non-positive in cell " << j << " after step to t = "
         << t1;
      throw SolverError("solver", os.str());
    }
  }

  // ledger bookkeeping mirrors the update exactly: interior fluxes
  // telescope, so expected mass follows from the boundary fluxes alone
  const double in0 = bf0.rho_left - bf0.rho_right;
  const double in1 = bf1.rho_left - bf1.rho_right;
  st.mass_expected =
      Er * st.mass_expected + 0.5 * dtau * (Er * in0 + in1);
  st.mom_ledger += 0.5 * dtau * ((bf0.mom_left - bf0.mom_right) +
                                 (bf1.mom_left - bf1.mom_right));
  if (cfg.forcing) {
    double add0 = 0.0, add1 = 0.0;
    for (int j = 0; j < nc; ++j) {
      double fr = 0.0, fm = 0.0;
      cfg.forcing(st.centers[j], t0, &fr, &fm);
      add0 += fr;
      cfg.forcing(st.centers[j], t1, &fr, &fm);
      add1 += fr;
    }
    st.mass_expected += 0.5 * dtau * st.dx * (Er * add0 + add1);
  }

  st.t = t1;
  st.steps += 1;
  return t1 - t0;
}

RunResult run(const SimConfig& cfg, const ExpansionEvaluator& ev) {
  const auto t_start = std::chrono::steady_clock::now();
  RunResult out;

  SimState st = init_state(cfg, ev);

  std::vector<double> times = cfg.snapshot_times;
  if (times.empty()) {
    times = log_spaced_times(std::max(cfg.snapshot_t_first, 1e-6),
                             cfg.t_end, cfg.snapshots);
  }
  for (double t : times)
    if (t < 0.0 || t > cfg.t_end)
      throw ConfigError("solver", "snapshot times must lie in [0, T]");
  std::sort(times.begin(), times.end());

  out.snapshots.push_back(st);  // t = 0
  std::size_t next = 0;
  while (next < times.size() && times[next] <= 1e-12) ++next;

  while (st.t < cfg.t_end - 1e-9 * cfg.t_end) {
    const double target = (next < times.size()) ? times[next] : cfg.t_end;
    step(st, cfg, target - st.t);
    if (st.t >= target - 1e-9 * target) {
      if (next < times.size()) {
        out.snapshots.push_back(st);
        ++next;
      }
    }
    if (st.steps > cfg.max_steps)
      throw SolverError("solver", "step budget exhausted");
    if (cfg.budget_seconds > 0.0) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        t_start).count();
      if (elapsed > cfg.budget_seconds) {
        out.completed = false;
        out.budget_exceeded = true;
        break;
      }
    }
  }

  out.total_steps = st.steps;
  out.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t_start).count();
  return out;
}

std::string to_string(Frame f) {
  return f == Frame::Fixed ? "fixed" : "selfsim";
}
std::string to_string(Limiter l) {
  switch (l) {
    case Limiter::Minmod: return "minmod";
    case Limiter::MC: return "mc";
    case Limiter::Central: return "central";
  }
  return "?";
}
std::string to_string(FluxScheme f) {
  return f == FluxScheme::Rusanov ? "rusanov" : "hll";
}

}  // namespace dwlab
