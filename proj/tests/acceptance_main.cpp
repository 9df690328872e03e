// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Each check pins its tolerances here; nothing is deferred to calibration.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dwlab/analysis.hpp"
#include "dwlab/expansion.hpp"
#include "dwlab/hierarchy.hpp"
#include "dwlab/profile.hpp"
#include "dwlab/solver.hpp"

using namespace dwlab;

namespace {

int g_failures = 0;

struct Criterion {
  const char* id;
  bool pass;
  std::string detail;
  double seconds;
};

void report(const Criterion& c) {
  if (!c.pass) ++g_failures;
  std::printf("[%s] %-4s %6.1fs  %s\n", c.pass ? "PASS" : "FAIL", c.id,
              c.seconds, c.detail.c_str());
  std::fflush(stdout);
}

template <typename F>
void criterion(const char* id, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c{id, false, "", 0.0};
  try {
    body(c);
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("exception: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0).count();
  report(c);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct DecayLeg {
  double baseline_slope = 0.0;
  double corrected_slope = 0.0;
  double baseline_r2 = 0.0;
};

DecayLeg run_decay_leg(double lambda, int k_init, int cells, double t_end,
                       double fit_t_min, double pert_amp_rel) {
  const Params prm(lambda, 1.0, 1.05);
  const PressureLaw law = PressureLaw::gamma_law(1.4, 1.0);
  const XiGrid grid = XiGrid::make(12.0, 2048);
  const WaveProfile w = solve_wave(prm, law, grid);
  const CorrectionSet corr = build_hierarchy(w, law, k_init);
  const ExpansionEvaluator evk(w, corr, k_init, law);
  const ExpansionEvaluator ev0(w, corr, 0, law);

  SimConfig cfg;
  cfg.params = prm;
  cfg.law = law;
  cfg.frame = Frame::SelfSimilar;
  cfg.half_width = 12.0;
  cfg.cells = cells;
  cfg.cfl = 0.4;
  cfg.t_end = t_end;
  cfg.snapshots = 24;
  cfg.snapshot_t_first = 1.0;
  cfg.perturbation.amplitude_rho = pert_amp_rel * prm.delta();
  const RunResult rr = run(cfg, evk);

  std::vector<double> times, base, corrv;
  for (const auto& s : rr.snapshots) {
    times.push_back(s.t);
    base.push_back(remainder(s, ev0, 0).p_linf);
    corrv.push_back(remainder(s, evk, k_init).p_linf);
  }
  DecayLeg leg;
  const FitResult fb = fit_decay(times, base, false, fit_t_min);
  const FitResult fc = fit_decay(times, corrv, false, fit_t_min);
  leg.baseline_slope = fb.slope;
  leg.baseline_r2 = fb.r2;
  leg.corrected_slope = fc.slope;
  return leg;
}

}  // namespace

int main() {
  std::printf("acceptance suite: diffusion-wave expansion laboratory\n");

  // ---- 1. linear-law profile against the closed-form erf wave ----
  criterion("C1", [](Criterion& c) {
    const Params prm(0.5, 0.975, 1.025);
    const PressureLaw law = PressureLaw::linear(1.0);
    const XiGrid grid = XiGrid::make(12.0, 2048);
    const WaveProfile w = solve_wave(prm, law, grid);
    double max_err = 0.0;
    for (int j = 0; j <= grid.n; ++j) {
      const double exact =
          0.975 + 0.05 * 0.5 *
                      (1.0 + std::erf(std::sqrt(1.5) * grid.nodes[j] / 2.0));
      max_err = std::max(max_err, std::abs(w.rho[j] - exact));
    }
    c.pass = max_err < 1e-8;
    c.detail = fmt("erf-profile max error %.2e (tol 1e-8)", max_err);
  });

  // ---- 2. dual-route agreement and contraction on the first level ----
  criterion("C2", [](Criterion& c) {
    const Params prm(0.5, 1.0, 1.05);
    const PressureLaw law = PressureLaw::gamma_law(1.4, 1.0);
    const XiGrid grid = XiGrid::make(12.0, 2048);
    const WaveProfile w = solve_wave(prm, law, grid);
    const CorrectionSet corr = build_hierarchy(w, law, 1);
    const HierarchyConstants hc = HierarchyConstants::make(0.5, 1);
    const RhsBundle rb = assemble_rhs(1, w, corr, law, hc);
    const FourierResult fr =
        solve_correction_fourier(1, rb, w, law, hc, corr, {});
    double s2 = 0.0;
    for (int j = 0; j <= grid.n; ++j) {
      const double d = corr.at(1).G[j] - fr.correction.G[j];
      s2 += d * d;
    }
    const double dist = std::sqrt(s2 * grid.h);
    bool contraction_ok = true;
    double worst_factor = 0.0;
    for (std::size_t q = 0; q < fr.contraction.size(); ++q) {
      if (q + 1 < fr.distances.size() && fr.distances[q + 1] < 1e-13) break;
      worst_factor = std::max(worst_factor, fr.contraction[q]);
      if (fr.contraction[q] > 0.5) contraction_ok = false;
    }
    c.pass = dist < 1e-6 && contraction_ok;
    c.detail = fmt("|G1_colloc - G1_fourier| = %.2e (tol 1e-6), "
                   "max contraction %.3f (tol 0.5)", dist, worst_factor);
  });

  // ---- 3. mass-constraint chain across lambda ----
  criterion("C3", [](Criterion& c) {
    const PressureLaw law = PressureLaw::gamma_law(1.4, 1.0);
    double worst = 0.0, worst_first = 0.0;
    for (double lam : {0.3, 0.5, 0.8}) {
      const Params prm(lam, 1.0, 1.05);
      const XiGrid grid = XiGrid::make(12.0, 2048);
      const WaveProfile w = solve_wave(prm, law, grid);
      const int k0 = k_thresholds(lam).k0;
      const CorrectionSet corr = build_hierarchy(w, law, k0);
      const double first_target = -(law.value(1.05) - law.value(1.0)) / 2.0;
      worst_first =
          std::max(worst_first, std::abs(corr.at(1).mass - first_target));
      for (const auto& lvl : corr.levels)
        worst = std::max(worst, std::abs(lvl.mass - lvl.mass_target));
    }
    c.pass = worst < 1e-7 && worst_first < 1e-7;
    c.detail = fmt("chain defect %.2e, first-level mass defect %.2e "
                   "(tol 1e-7)", worst, worst_first);
  });

  // ---- 4. source-residual decay rates by direct evaluation ----
  criterion("C4", [](Criterion& c) {
    const Params prm(0.5, 1.0, 1.05);
    const PressureLaw law = PressureLaw::gamma_law(1.4, 1.0);
    const XiGrid grid = XiGrid::make(12.0, 2048);
    const WaveProfile w = solve_wave(prm, law, grid);
    const CorrectionSet corr = build_hierarchy(w, law, 2);
    const auto times = log_spaced_times(10.0, 1e4, 25);
    c.pass = true;
    std::string parts;
    for (int k : {0, 1, 2}) {
      const ExpansionEvaluator ev(w, corr, k, law);
      const ResidualScan scan = residual_decay_scan(ev, times, 0.05);
      c.pass = c.pass && scan.pass_linf;
      parts += fmt("k=%d: %.4f/%.2f ", k, scan.fit_linf.slope,
                   scan.predicted_linf);
    }
    c.detail = "Linf slopes vs targets (tol 0.05): " + parts;
  });

  // ---- 5. baseline decay rate, pinned window [10, 1e3] ----
  criterion("C5", [](Criterion& c) {
    const DecayLeg leg = run_decay_leg(0.5, 2, 2048, 1e3, 10.0, 0.01);
    const double target = -0.5;
    c.pass = std::abs(leg.baseline_slope - target) <= 0.08;
    c.detail = fmt("baseline slope %.4f vs lambda-1 = %.2f +-0.08 over "
                   "[10,1e3]; the second-order term and the remainder "
                   "transient steepen this window (floor -0.58, see notes)",
                   leg.baseline_slope, target);
  });

  // ---- 6. corrected decay rate beats the baseline ----
  criterion("C6", [](Criterion& c) {
    const DecayLeg leg = run_decay_leg(0.5, 2, 2048, 1e3, 10.0, 0.01);
    const bool better = leg.corrected_slope <= leg.baseline_slope - 0.3;
    const bool fast = leg.corrected_slope <= -1.0;
    c.pass = better && fast;
    c.detail = fmt("corrected %.4f (need <= -1.0 and <= baseline-0.3; "
                   "baseline %.4f; theory -1.125)",
                   leg.corrected_slope, leg.baseline_slope);
  });

  // ---- 7. branch structure of the baseline rate across lambda ----
  criterion("C7", [](Criterion& c) {
    struct Leg {
      double lambda;
      int k_init;
      int cells;
      double t_end, t_min;
      double target;
    };
    // windows sit past the second-order interference and above the
    // resolution floor; lambda = 0.1 runs on the finer grid so the floor
    // does not flatter the fit
    const Leg legs[] = {{0.10, 1, 4096, 3e3, 20.0, -0.825},
                        {0.20, 1, 2048, 3e3, 20.0, -0.80},
                        {0.50, 2, 2048, 1e4, 100.0, -0.50}};
    c.pass = true;
    for (const Leg& l : legs) {
      const DecayLeg r =
          run_decay_leg(l.lambda, l.k_init, l.cells, l.t_end, l.t_min, 0.0);
      const bool ok = std::abs(r.baseline_slope - l.target) <= 0.08;
      c.pass = c.pass && ok;
      c.detail += fmt("lam=%.2f: %.4f vs %.3f%s  ", l.lambda,
                      r.baseline_slope, l.target, ok ? "" : " [out]");
    }
  });

  // ---- 8. log-correction branch at integer k(lambda) ----
  criterion("C8", [](Criterion& c) {
    const double lam = 5.0 / 11.0;
    const Params prm(lam, 1.0, 1.05);
    const PressureLaw law = PressureLaw::gamma_law(1.4, 1.0);
    const XiGrid grid = XiGrid::make(12.0, 2048);
    const WaveProfile w = solve_wave(prm, law, grid);
    const CorrectionSet corr = build_hierarchy(w, law, 1);
    const ExpansionEvaluator ev1(w, corr, 1, law);
    SimConfig cfg;
    cfg.params = prm;
    cfg.law = law;
    cfg.frame = Frame::SelfSimilar;
    cfg.half_width = 12.0;
    cfg.cells = 2048;
    cfg.cfl = 0.4;
    cfg.t_end = 1e3;
    cfg.snapshots = 24;
    cfg.snapshot_t_first = 1.0;
    cfg.perturbation.amplitude_rho = 0.01 * prm.delta();
    const RunResult rr = run(cfg, ev1);
    std::vector<double> times, linf, l2;
    for (const auto& s : rr.snapshots) {
      times.push_back(s.t);
      const RemainderRecord rec = remainder(s, ev1, 1);
      linf.push_back(rec.p_linf);
      l2.push_back(rec.p_l2[0]);
    }
    const FitResult linf_plain = fit_decay(times, linf, false, 10.0);
    const FitResult linf_log = fit_decay(times, linf, true, 10.0);
    const FitResult l2_plain = fit_decay(times, l2, false, 10.0);
    const FitResult l2_log = fit_decay(times, l2, true, 10.0);
    const bool linf_improves = linf_log.r2 > linf_plain.r2;
    const bool l2_improves = l2_log.r2 > l2_plain.r2;
    c.pass = linf_improves || l2_improves;
    c.detail = fmt("R2 plain->ln: Linf %.5f->%.5f, L2 %.5f->%.5f "
                   "(need an improvement; see notes on this branch)",
                   linf_plain.r2, linf_log.r2, l2_plain.r2, l2_log.r2);
  });

  // ---- 9. solver hygiene ----
  criterion("C9", [](Criterion& c) {
    const Params prm(0.5, 1.0, 1.05);
    const PressureLaw law = PressureLaw::gamma_law(1.4, 1.0);

    // mass ledger over T = 100 in the fixed frame
    const XiGrid grid = XiGrid::make(12.0, 2048);
    const WaveProfile w = solve_wave(prm, law, grid);
    const CorrectionSet corr = build_hierarchy(w, law, 2);
    const ExpansionEvaluator ev(w, corr, 2, law);
    SimConfig cfg;
    cfg.params = prm;
    cfg.law = law;
    cfg.frame = Frame::Fixed;
    cfg.half_width = 560.0;
    cfg.cells = 11200;
    cfg.cfl = 0.4;
    cfg.t_end = 100.0;
    cfg.snapshots = 3;
    cfg.snapshot_t_first = 10.0;
    cfg.perturbation.amplitude_rho = 0.01 * prm.delta();
    const RunResult rr = run(cfg, ev);
    const SimState& last = rr.snapshots.back();
    const double drift = std::abs(last.mass() - last.mass_expected) /
                         rr.snapshots.front().mass();

    // damping-only integrating factor
    SimConfig dcfg;
    dcfg.params = Params(0.35, 1.0, 1.0);
    dcfg.law = law;
    dcfg.frame = Frame::Fixed;
    dcfg.half_width = 5.0;
    dcfg.cells = 32;
    dcfg.t_end = 10.0;
    dcfg.disable_flux = true;
    SimState st;
    st.frame = Frame::Fixed;
    st.dx = 10.0 / 32;
    st.centers.resize(32);
    st.rho.assign(32, 1.0);
    st.mom.assign(32, 0.37);
    for (int j = 0; j < 32; ++j) st.centers[j] = -5.0 + (j + 0.5) * st.dx;
    st.mass_expected = st.mass();
    while (st.t < 8.0) step(st, dcfg, 8.0 - st.t);
    const double sg = 1.0 - dcfg.params.lambda;
    const double exact =
        0.37 * std::exp(-(std::pow(1.0 + st.t, sg) - 1.0) / sg);
    const double damp_err = std::abs(st.mom[7] - exact) / exact;

    // manufactured-solution order (reusing the shared setup)
    const double rho0 = 1.0, A = 0.02, kk = 1.0, cc = 0.3, lamm = 0.5;
    auto rho_e = [&](double x, double t) {
      return rho0 + A * std::sin(kk * (x - cc * t));
    };
    double prev = 0.0, order = 0.0;
    for (int N : {256, 512}) {
      SimConfig mcfg;
      mcfg.params = Params(lamm, 1.0, 1.0);
      mcfg.law = law;
      mcfg.frame = Frame::Fixed;
      mcfg.boundary = Boundary::Periodic;
      mcfg.half_width = M_PI;
      mcfg.cells = N;
      mcfg.t_end = 2.0;
      mcfg.forcing = [&](double x, double t, double* fr, double* fm) {
        const double th = kk * (x - cc * t);
        const double r = rho0 + A * std::sin(th);
        const double m = cc * A * std::sin(th);
        const double r_x = A * kk * std::cos(th);
        const double m_x = cc * A * kk * std::cos(th);
        const double m_t = -cc * cc * A * kk * std::cos(th);
        *fr = 0.0;
        *fm = m_t + 2.0 * m * m_x / r - m * m * r_x / (r * r) +
              law.deriv(r, 1) * r_x + std::pow(1.0 + t, -lamm) * m;
      };
      SimState ms;
      ms.frame = Frame::Fixed;
      ms.dx = 2.0 * M_PI / N;
      ms.centers.resize(N);
      ms.rho.resize(N);
      ms.mom.resize(N);
      for (int j = 0; j < N; ++j) {
        ms.centers[j] = -M_PI + (j + 0.5) * ms.dx;
        ms.rho[j] = rho_e(ms.centers[j], 0.0);
        ms.mom[j] = cc * (ms.rho[j] - rho0);
      }
      ms.mass_expected = ms.mass();
      while (ms.t < 0.5 - 1e-12) step(ms, mcfg, 0.5 - ms.t);
      double err = 0.0;
      for (int j = 0; j < N; ++j)
        err += std::abs(ms.rho[j] - rho_e(ms.centers[j], ms.t));
      err *= ms.dx;
      if (prev > 0.0) order = std::log2(prev / err);
      prev = err;
    }

    c.pass = drift < 1e-8 && order >= 1.8 && damp_err < 1e-13;
    c.detail = fmt("mass drift %.2e (tol 1e-8), MMS order %.2f (need 1.8), "
                   "damping-only error %.2e (machine)", drift, order,
                   damp_err);
  });

  // ---- 10. fit engine on synthetic laws ----
  criterion("C10", [](Criterion& c) {
    std::vector<double> t, pure, logged;
    for (int j = 0; j < 24; ++j) {
      const double tt = std::pow(10.0, 0.4 + 0.14 * j);
      t.push_back(tt);
      pure.push_back(2.0 * std::pow(1.0 + tt, -1.125));
      logged.push_back(0.7 * std::pow(1.0 + tt, -1.125) *
                       std::log(1.0 + tt));
    }
    const double e1 = std::abs(fit_decay(t, pure, false, 0.0).slope + 1.125);
    const double e2 = std::abs(fit_decay(t, logged, true, 0.0).slope + 1.125);
    c.pass = e1 < 1e-10 && e2 < 1e-10;
    c.detail = fmt("exponent errors %.1e / %.1e (tol 1e-10)", e1, e2);
  });

  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures;
}
