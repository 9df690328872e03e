#include "dwlab/runner.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "dwlab/errors.hpp"
#include "dwlab/io.hpp"

namespace dwlab {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("config", "unknown key '" + it.key() + "' in " + where);
  }
}

double num_or(const json& j, const char* key, double dflt) {
  return j.contains(key) ? j.at(key).get<double>() : dflt;
}
int int_or(const json& j, const char* key, int dflt) {
  return j.contains(key) ? j.at(key).get<int>() : dflt;
}
bool bool_or(const json& j, const char* key, bool dflt) {
  return j.contains(key) ? j.at(key).get<bool>() : dflt;
}
std::string str_or(const json& j, const char* key, const std::string& dflt) {
  return j.contains(key) ? j.at(key).get<std::string>() : dflt;
}

std::pair<double, std::optional<Rational>> parse_lambda(const json& v) {
  if (v.is_string()) {
    const auto rat = Rational::parse(v.get<std::string>());
    if (!rat) {
      // decimals may arrive as strings too
      try {
        return {std::stod(v.get<std::string>()), std::nullopt};
      } catch (const std::exception&) {
        throw ConfigError("config", "cannot parse lambda '" +
                                        v.get<std::string>() + "'");
      }
    }
    return {rat->value(), rat};
  }
  return {v.get<double>(), std::nullopt};
}

PressureLaw parse_pressure(const json& j) {
  if (j.is_null()) return PressureLaw::gamma_law();
  check_keys(j, "pressure", {"kind", "gamma", "scale", "c_squared", "rho", "p"});
  const std::string kind = str_or(j, "kind", "gamma");
  if (kind == "gamma")
    return PressureLaw::gamma_law(num_or(j, "gamma", 1.4),
                                  num_or(j, "scale", 1.0));
  if (kind == "linear")
    return PressureLaw::linear(num_or(j, "c_squared", 1.0));
  if (kind == "tabulated") {
    if (!j.contains("rho") || !j.contains("p"))
      throw ConfigError("config", "tabulated pressure needs rho and p arrays");
    return PressureLaw::tabulated(j.at("rho").get<std::vector<double>>(),
                                  j.at("p").get<std::vector<double>>());
  }
  throw ConfigError("config", "unknown pressure kind '" + kind + "'");
}

}  // namespace

int ExperimentConfig::resolved_k() const {
  if (k >= 0) return k;
  return k_thresholds(params).k0;
}

bool ExperimentConfig::log_flag() const {
  switch (log_correction) {
    case LogCorrection::On: return true;
    case LogCorrection::Off: return false;
    case LogCorrection::Auto: break;
  }
  return k_thresholds(params).integer_k;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::exception& e) {
    throw ConfigError("config", std::string("bad JSON in ") + path + ": " +
                                    e.what());
  }
  return from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  check_keys(j, "config",
             {"lambda", "rho_minus", "rho_plus", "pressure", "xi_grid",
              "hierarchy", "scan", "sim", "analysis", "seed", "output_dir",
              "svg", "strict"});

  ExperimentConfig c;
  double lam = 0.5;
  std::optional<Rational> lam_rat;
  if (j.contains("lambda")) {
    auto [v, r] = parse_lambda(j.at("lambda"));
    lam = v;
    lam_rat = r;
  }
  c.params = Params(lam, num_or(j, "rho_minus", 1.0),
                    num_or(j, "rho_plus", 1.05), lam_rat);
  c.law = parse_pressure(j.contains("pressure") ? j.at("pressure") : json());

  if (j.contains("xi_grid")) {
    const json& g = j.at("xi_grid");
    check_keys(g, "xi_grid", {"half_width", "intervals"});
    c.xi_half_width = num_or(g, "half_width", 12.0);
    c.xi_intervals = int_or(g, "intervals", 2048);
  }

  if (j.contains("hierarchy")) {
    const json& h = j.at("hierarchy");
    check_keys(h, "hierarchy", {"k", "method", "fourier"});
    c.k = int_or(h, "k", -1);
    const std::string m = str_or(h, "method", "colloc");
    if (m == "colloc") c.method = Method::Colloc;
    else if (m == "fourier") c.method = Method::Fourier;
    else if (m == "both") c.method = Method::Both;
    else throw ConfigError("config", "unknown hierarchy method '" + m + "'");
    if (h.contains("fourier")) {
      const json& f = h.at("fourier");
      check_keys(f, "fourier", {"eta_max", "n_eta", "tol", "max_sweeps"});
      c.fourier.eta_max = num_or(f, "eta_max", c.fourier.eta_max);
      c.fourier.n_eta = int_or(f, "n_eta", c.fourier.n_eta);
      c.fourier.tol = num_or(f, "tol", c.fourier.tol);
      c.fourier.max_sweeps = int_or(f, "max_sweeps", c.fourier.max_sweeps);
    }
  }

  if (j.contains("scan")) {
    const json& s = j.at("scan");
    check_keys(s, "scan", {"t_min", "t_max", "points", "tolerance"});
    c.scan_t_min = num_or(s, "t_min", 10.0);
    c.scan_t_max = num_or(s, "t_max", 1e4);
    c.scan_points = int_or(s, "points", 25);
    c.scan_tolerance = num_or(s, "tolerance", 0.05);
  }

  if (j.contains("sim")) {
    const json& s = j.at("sim");
    check_keys(s, "sim",
               {"frame", "half_width", "cells", "cfl", "t_end", "snapshots",
                "snapshot_t_first", "limiter", "flux", "perturbation",
                "budget_seconds"});
    const std::string fr = str_or(s, "frame", "selfsim");
    if (fr == "fixed") c.sim.frame = Frame::Fixed;
    else if (fr == "selfsim") c.sim.frame = Frame::SelfSimilar;
    else throw ConfigError("config", "unknown frame '" + fr + "'");
    c.sim.half_width = num_or(s, "half_width", 12.0);
    c.sim.cells = int_or(s, "cells", 2048);
    c.sim.cfl = num_or(s, "cfl", 0.4);
    c.sim.t_end = num_or(s, "t_end", 1e4);
    c.sim.snapshots = int_or(s, "snapshots", 30);
    c.sim.snapshot_t_first = num_or(s, "snapshot_t_first", 1.0);
    const std::string lim = str_or(s, "limiter", "minmod");
    if (lim == "minmod") c.sim.limiter = Limiter::Minmod;
    else if (lim == "mc") c.sim.limiter = Limiter::MC;
    else if (lim == "central") c.sim.limiter = Limiter::Central;
    else throw ConfigError("config", "unknown limiter '" + lim + "'");
    const std::string fx = str_or(s, "flux", "rusanov");
    if (fx == "rusanov") c.sim.flux = FluxScheme::Rusanov;
    else if (fx == "hll") c.sim.flux = FluxScheme::HLL;
    else throw ConfigError("config", "unknown flux '" + fx + "'");
    c.sim.budget_seconds = num_or(s, "budget_seconds", 0.0);
    if (s.contains("perturbation")) {
      const json& p = s.at("perturbation");
      check_keys(p, "perturbation",
                 {"kind", "amplitude_rho", "amplitude_m", "center", "width",
                  "jitter", "auto_shift"});
      const std::string kind = str_or(p, "kind", "bump_dx");
      if (kind == "bump_dx")
        c.sim.perturbation.kind = Perturbation::Kind::BumpDifference;
      else if (kind == "bump_raw")
        c.sim.perturbation.kind = Perturbation::Kind::BumpRaw;
      else if (kind == "tail_dx")
        c.sim.perturbation.kind = Perturbation::Kind::TailDifference;
      else throw ConfigError("config", "unknown perturbation kind '" + kind + "'");
      c.sim.perturbation.amplitude_rho = num_or(p, "amplitude_rho", 0.0);
      c.sim.perturbation.amplitude_m = num_or(p, "amplitude_m", 0.0);
      c.sim.perturbation.center = num_or(p, "center", 0.0);
      c.sim.perturbation.width = num_or(p, "width", 2.0);
      c.sim.perturbation.auto_shift = bool_or(p, "auto_shift", false);
      const double jitter = num_or(p, "jitter", 0.0);
      if (jitter > 0.0) {
        std::mt19937_64 rng(j.contains("seed")
                                ? j.at("seed").get<std::uint64_t>()
                                : 0);
        std::uniform_real_distribution<double> u(-jitter, jitter);
        c.sim.perturbation.center += u(rng);
      }
    }
  }

  if (j.contains("analysis")) {
    const json& a = j.at("analysis");
    check_keys(a, "analysis", {"fit_t_min", "log_correction"});
    c.fit_t_min = num_or(a, "fit_t_min", 100.0);
    const std::string lc = str_or(a, "log_correction", "auto");
    if (lc == "auto") c.log_correction = LogCorrection::Auto;
    else if (lc == "on") c.log_correction = LogCorrection::On;
    else if (lc == "off") c.log_correction = LogCorrection::Off;
    else throw ConfigError("config", "unknown log_correction '" + lc + "'");
  }

  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  c.output_dir = str_or(j, "output_dir", "out");
  c.svg = bool_or(j, "svg", true);
  c.strict = bool_or(j, "strict", false);

  c.sim.params = c.params;
  c.sim.law = c.law;
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  if (params.lambda_rational) {
    std::ostringstream os;
    os << params.lambda_rational->num << "/" << params.lambda_rational->den;
    j["lambda"] = os.str();
  } else {
    j["lambda"] = params.lambda;
  }
  j["rho_minus"] = params.rho_minus;
  j["rho_plus"] = params.rho_plus;
  switch (law.kind()) {
    case PressureLaw::Kind::GammaLaw:
      j["pressure"] = {{"kind", "gamma"}, {"gamma", law.gamma()},
                       {"scale", law.scale()}};
      break;
    case PressureLaw::Kind::Linear:
      j["pressure"] = {{"kind", "linear"}, {"c_squared", law.c_squared()}};
      break;
    case PressureLaw::Kind::Tabulated:
      j["pressure"] = {{"kind", "tabulated"}};
      break;
  }
  j["xi_grid"] = {{"half_width", xi_half_width}, {"intervals", xi_intervals}};
  const char* m = method == Method::Colloc ? "colloc"
                  : method == Method::Fourier ? "fourier" : "both";
  j["hierarchy"] = {{"k", k},
                    {"method", m},
                    {"fourier",
                     {{"eta_max", fourier.eta_max},
                      {"n_eta", fourier.n_eta},
                      {"tol", fourier.tol},
                      {"max_sweeps", fourier.max_sweeps}}}};
  j["scan"] = {{"t_min", scan_t_min}, {"t_max", scan_t_max},
               {"points", scan_points}, {"tolerance", scan_tolerance}};
  j["sim"] = {{"frame", to_string(sim.frame)},
              {"half_width", sim.half_width},
              {"cells", sim.cells},
              {"cfl", sim.cfl},
              {"t_end", sim.t_end},
              {"snapshots", sim.snapshots},
              {"snapshot_t_first", sim.snapshot_t_first},
              {"limiter", to_string(sim.limiter)},
              {"flux", to_string(sim.flux)},
              {"budget_seconds", sim.budget_seconds},
              {"perturbation",
               {{"kind",
                 sim.perturbation.kind == Perturbation::Kind::BumpDifference
                     ? "bump_dx"
                     : sim.perturbation.kind == Perturbation::Kind::BumpRaw
                           ? "bump_raw"
                           : "tail_dx"},
                {"amplitude_rho", sim.perturbation.amplitude_rho},
                {"amplitude_m", sim.perturbation.amplitude_m},
                {"center", sim.perturbation.center},
                {"width", sim.perturbation.width},
                {"auto_shift", sim.perturbation.auto_shift}}}};
  j["analysis"] = {{"fit_t_min", fit_t_min},
                   {"log_correction",
                    log_correction == LogCorrection::Auto ? "auto"
                    : log_correction == LogCorrection::On ? "on" : "off"}};
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["svg"] = svg;
  j["strict"] = strict;
  return j;
}

std::string ExperimentConfig::fingerprint() const {
  json j = to_json();
  j.erase("output_dir");
  j.erase("svg");
  return io::fnv1a64_hex(j.dump());
}

double baseline_target_exponent(double lambda) {
  const double k17 = 1.0 / 7.0;
  if (lambda < k17 - 1e-12) return -0.75 * (1.0 + lambda);
  if (lambda > k17 + 1e-12) return lambda - 1.0;
  return -6.0 / 7.0;
}

namespace {

struct StageClock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() {
    const auto t1 = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(t1 - t0).count();
    t0 = t1;
    return s;
  }
};

void write_profile_artifacts(const ExperimentConfig& cfg,
                             const PipelineResult& res) {
  const XiGrid& g = res.profile.grid;
  io::write_csv(cfg.output_dir + "/profile.csv",
                {{"xi", g.nodes},
                 {"rho_bar", res.profile.rho},
                 {"drho", res.profile.drho},
                 {"d2rho", res.profile.d2rho},
                 {"M_bar", res.profile.Mbar}});
  json jb;
  jb["fingerprint"] = cfg.fingerprint();
  jb["pass"] = res.gauss.pass;
  jb["c_min"] = res.gauss.c_min;
  jb["residual_inf"] = res.profile.residual_inf;
  jb["monotone"] = res.profile.monotone;
  jb["newton_iterations"] = res.profile.newton_iterations;
  for (const auto& e : res.gauss.entries)
    jb["fields"][e.field] = {{"C", e.C}, {"c", e.c}, {"pass", e.pass}};
  io::write_text(cfg.output_dir + "/gauss_bounds.json", jb.dump(2));
}

void write_correction_artifacts(const ExperimentConfig& cfg,
                                const PipelineResult& res) {
  json side;
  side["fingerprint"] = cfg.fingerprint();
  side["k"] = res.corrections.k;
  side["mass_G0"] = res.corrections.mass_G0;
  for (const auto& c : res.corrections.levels) {
    std::ostringstream name;
    name << cfg.output_dir << "/correction_" << c.i << ".csv";
    io::write_csv(name.str(), {{"xi", res.profile.grid.nodes},
                               {"G_i", c.G},
                               {"rho_i", c.rho},
                               {"m_i", c.m}});
    json lv;
    lv["i"] = c.i;
    lv["residual_l2"] = c.ode_residual_l2;
    lv["mass"] = c.mass;
    lv["mass_target"] = c.mass_target;
    side["levels"].push_back(lv);
  }
  for (const auto& d : res.dual) {
    json dv;
    dv["level"] = d.level;
    dv["l2_distance"] = d.l2_distance;
    dv["tolerance"] = d.tolerance;
    dv["pass"] = d.pass;
    dv["contraction"] = d.contraction;
    dv["contraction_ok"] = d.contraction_ok;
    side["dual_checks"].push_back(dv);
  }
  io::write_text(cfg.output_dir + "/corrections.json", side.dump(2));
}

void write_scan_artifacts(const ExperimentConfig& cfg,
                          const ResidualScan& scan) {
  io::write_csv(cfg.output_dir + "/residual_scan.csv",
                {{"t", scan.times}, {"L2_norm", scan.l2},
                 {"Linf_norm", scan.linf}});
  json js;
  js["fingerprint"] = cfg.fingerprint();
  js["slope_l2"] = scan.fit_l2.slope;
  js["slope_linf"] = scan.fit_linf.slope;
  js["r2_l2"] = scan.fit_l2.r2;
  js["r2_linf"] = scan.fit_linf.r2;
  js["predicted_l2"] = scan.predicted_l2;
  js["predicted_linf"] = scan.predicted_linf;
  js["tolerance"] = scan.tolerance;
  js["pass_l2"] = scan.pass_l2;
  js["pass_linf"] = scan.pass_linf;
  js["fit_ok"] = scan.fit_ok;
  io::write_text(cfg.output_dir + "/residual_scan.json", js.dump(2));
  if (cfg.svg) {
    io::svg_loglog(cfg.output_dir + "/residual_scan.svg",
                   "source residual decay", "1+t", "norm",
                   {{"L2", scan.times, scan.l2},
                    {"Linf", scan.times, scan.linf}});
  }
}

void write_snapshots(const ExperimentConfig& cfg, const RunResult& sim) {
  json man;
  man["fingerprint"] = cfg.fingerprint();
  man["frame"] = to_string(cfg.sim.frame);
  man["completed"] = sim.completed;
  man["budget_exceeded"] = sim.budget_exceeded;
  man["total_steps"] = sim.total_steps;
  man["wall_seconds"] = sim.wall_seconds;  // excluded from hashing
  const double lambda = cfg.params.lambda;
  for (std::size_t s = 0; s < sim.snapshots.size(); ++s) {
    const SimState& st = sim.snapshots[s];
    std::ostringstream name;
    name << cfg.output_dir << "/snapshot_"
         << (s < 10 ? "00" : s < 100 ? "0" : "") << s << ".csv";
    std::vector<double> m_phys(st.rho.size());
    for (std::size_t j = 0; j < st.rho.size(); ++j)
      m_phys[j] = st.physical_m(static_cast<int>(j), lambda);
    io::write_csv(name.str(),
                  {{cfg.sim.frame == Frame::Fixed ? "x" : "xi", st.centers},
                   {"rho", st.rho},
                   {"m", m_phys}});
    json sj;
    sj["file"] = name.str();
    sj["t"] = st.t;
    sj["dx"] = st.dx;
    sj["x_shift"] = st.x_shift;
    sj["mass"] = st.mass();
    sj["mass_expected"] = st.mass_expected;
    sj["steps"] = st.steps;
    man["snapshots"].push_back(sj);
  }
  io::write_text(cfg.output_dir + "/sim_manifest.json", man.dump(2));
}

std::optional<RunResult> try_reuse_snapshots(const ExperimentConfig& cfg) {
  const std::string man_path = cfg.output_dir + "/sim_manifest.json";
  if (!io::file_exists(man_path)) return std::nullopt;
  json man;
  try {
    man = json::parse(io::read_text(man_path));
  } catch (const json::exception&) {
    return std::nullopt;
  }
  if (!man.contains("fingerprint") ||
      man["fingerprint"].get<std::string>() != cfg.fingerprint())
    return std::nullopt;
  if (!man.value("completed", false)) return std::nullopt;

  RunResult out;
  out.completed = true;
  out.total_steps = man.value("total_steps", 0L);
  const double lambda = cfg.params.lambda;
  try {
    for (const auto& sj : man.at("snapshots")) {
      SimState st;
      st.frame = cfg.sim.frame;
      st.t = sj.at("t").get<double>();
      st.dx = sj.at("dx").get<double>();
      st.x_shift = sj.at("x_shift").get<double>();
      st.mass_expected = sj.at("mass_expected").get<double>();
      st.steps = sj.value("steps", 0L);
      const auto cols = io::read_csv(sj.at("file").get<std::string>());
      st.centers = cols.at(0).values;
      st.rho = cols.at(1).values;
      st.mom = cols.at(2).values;
      if (st.frame == Frame::SelfSimilar) {
        const double up = std::pow(1.0 + st.t, 0.5 * (1.0 - lambda));
        for (double& v : st.mom) v *= up;
      }
      out.snapshots.push_back(std::move(st));
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return out;
}

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& cfg, Stage upto,
                            bool write_artifacts) {
  PipelineResult res;
  StageClock clock;
  if (write_artifacts) io::ensure_dir(cfg.output_dir);

  auto fail = [&](const std::string& name) {
    res.all_pass = false;
    res.failures.push_back(name);
  };

  // ---- profile ----
  const XiGrid grid = XiGrid::make(cfg.xi_half_width, cfg.xi_intervals);
  res.profile = solve_wave(cfg.params, cfg.law, grid);
  res.gauss = check_gaussian_bounds(res.profile);
  if (!res.gauss.pass) fail("gauss-bounds");
  if (!res.profile.monotone) fail("profile-monotone");
  res.timings.emplace_back("profile", clock.lap());
  if (write_artifacts) write_profile_artifacts(cfg, res);
  if (upto == Stage::Profile) return res;

  // ---- hierarchy + scan ----
  const int k = cfg.resolved_k();
  const HierarchyMethod primary = cfg.method == ExperimentConfig::Method::Fourier
                                      ? HierarchyMethod::Fourier
                                      : HierarchyMethod::Collocation;
  res.corrections =
      build_hierarchy(res.profile, cfg.law, k, primary, {}, cfg.fourier);

  if (cfg.method == ExperimentConfig::Method::Both && k >= 1) {
    const HierarchyConstants hc = HierarchyConstants::make(cfg.params.lambda, k);
    for (int i = 1; i <= k; ++i) {
      RhsBundle rb = assemble_rhs(i, res.profile, res.corrections, cfg.law, hc);
      // hand the cross-check the same lower levels the primary method used,
      // so the comparison isolates level i
      FourierResult fr = solve_correction_fourier(i, rb, res.profile, cfg.law,
                                                  hc, res.corrections,
                                                  cfg.fourier);
      DualCheck d;
      d.level = i;
      double s2 = 0.0, n2 = 0.0;
      const Correction& ci = res.corrections.at(i);
      for (int q = 0; q < grid.size(); ++q) {
        const double dd = ci.G[q] - fr.correction.G[q];
        s2 += dd * dd;
        n2 += ci.G[q] * ci.G[q];
      }
      d.l2_distance = std::sqrt(s2 * grid.h);
      // High orders of the hierarchy carry a near-marginal slowly decaying
      // homogeneous mode (|xi|^-(1+c1/a) with exponent -> 0), and the two
      // routes resolve it differently at the 1e-4 relative level; below
      // that the 1e-6 relative target applies.
      const double g_l2 = std::sqrt(n2 * grid.h);
      d.tolerance = std::max(1e-6 * std::max(cfg.params.delta(), g_l2),
                             1e-4 * g_l2);
      d.pass = d.l2_distance <= d.tolerance;
      d.contraction = fr.contraction;
      d.contraction_ok = true;
      for (std::size_t q = 0; q < fr.contraction.size(); ++q) {
        // ignore ratios after the update hits the roundoff floor
        if (q + 1 < fr.distances.size() && fr.distances[q + 1] < 1e-13)
          break;
        if (fr.contraction[q] > 0.5) d.contraction_ok = false;
      }
      if (!d.pass) fail("dual-agreement-level-" + std::to_string(i));
      if (!d.contraction_ok) fail("contraction-level-" + std::to_string(i));
      res.dual.push_back(std::move(d));
    }
  }

  // mass-constraint chain
  for (const auto& c : res.corrections.levels) {
    if (std::abs(c.mass - c.mass_target) > 1e-7)
      fail("mass-chain-level-" + std::to_string(c.i));
  }

  ExpansionEvaluator ev(res.profile, res.corrections, k, cfg.law);
  res.scan = residual_decay_scan(
      ev, log_spaced_times(cfg.scan_t_min, cfg.scan_t_max, cfg.scan_points),
      cfg.scan_tolerance);
  if (!res.scan->pass_linf) fail("scan-linf");
  if (!res.scan->pass_l2) fail("scan-l2");
  if (!res.scan->fit_ok) fail("scan-fit-quality");
  res.timings.emplace_back("expand", clock.lap());
  if (write_artifacts) {
    write_correction_artifacts(cfg, res);
    write_scan_artifacts(cfg, *res.scan);
  }
  if (upto == Stage::Expand) return res;

  // ---- simulate ----
  SimConfig sim_cfg = cfg.sim;
  sim_cfg.params = cfg.params;
  sim_cfg.law = cfg.law;
  if (auto reused = try_reuse_snapshots(cfg)) {
    res.sim = std::move(*reused);
    res.sim_reused = true;
  } else {
    res.sim = run(sim_cfg, ev);
    if (write_artifacts) write_snapshots(cfg, *res.sim);
  }
  if (res.sim->budget_exceeded) {
    res.all_pass = false;
    res.failures.push_back("budget");
  }
  // ledger: discrete total mass must track the boundary-flux bookkeeping
  if (!res.sim->snapshots.empty()) {
    const SimState& last = res.sim->snapshots.back();
    const double m0 = res.sim->snapshots.front().mass();
    if (std::abs(last.mass() - last.mass_expected) > 1e-8 * std::abs(m0))
      fail("mass-ledger");
  }
  res.timings.emplace_back("simulate", clock.lap());
  if (upto == Stage::Simulate) return res;

  // ---- verify: remainder decay fits ----
  ExpansionEvaluator ev0(res.profile, res.corrections, 0, cfg.law);
  for (const SimState& snap : res.sim->snapshots) {
    res.baseline_records.push_back(remainder(snap, ev0, 0));
    res.corrected_records.push_back(remainder(snap, ev, k));
  }
  for (const auto& r : res.corrected_records)
    if (!r.sobolev_ok) {
      fail("sobolev-consistency");
      break;
    }

  DecayCheck dc;
  dc.log_corrected = cfg.log_flag();
  std::vector<double> times;
  for (const auto& r : res.baseline_records) times.push_back(r.t);
  const std::vector<double> base_vals =
      norm_series(res.baseline_records, NormKind::PLinf);
  const std::vector<double> corr_vals =
      norm_series(res.corrected_records, NormKind::PLinf);
  dc.fit_baseline = fit_decay(times, base_vals, false, cfg.fit_t_min);
  dc.fit_corrected =
      fit_decay(times, corr_vals, dc.log_corrected, cfg.fit_t_min);
  dc.baseline_slope = dc.fit_baseline.slope;
  dc.corrected_slope = dc.fit_corrected.slope;
  dc.baseline_target = baseline_target_exponent(cfg.params.lambda);
  dc.corrected_target = -0.75 * (1.0 + cfg.params.lambda);
  dc.baseline_pass =
      std::abs(dc.baseline_slope - dc.baseline_target) <= dc.baseline_tol;
  if (k >= 1 && k_thresholds(cfg.params).k0 >= 1) {
    dc.corrected_pass =
        dc.corrected_slope <= dc.baseline_slope - 0.3 &&
        dc.corrected_slope <= dc.corrected_target + 0.125;
  } else {
    // below the lambda = 1/7 threshold no correction order is justified
    dc.corrected_pass = true;
  }
  dc.pass = dc.baseline_pass && dc.corrected_pass;
  if (!dc.baseline_pass) fail("baseline-rate");
  if (!dc.corrected_pass) fail("corrected-rate");
  res.decay = dc;

  res.energy = energy_functional(res.corrected_records, cfg.params.lambda);
  if (!k_thresholds(cfg.params).integer_k && res.energy.size() >= 4) {
    std::vector<double> et, ev2;
    for (const auto& e : res.energy) {
      if (e.t >= cfg.sim.t_end / 10.0) {
        et.push_back(e.t);
        ev2.push_back(e.n2);
      }
    }
    if (et.size() >= 3) {
      const FitResult ef = fit_powerlaw(et, ev2);
      if (ef.slope > 0.05) fail("energy-bounded");
    }
  }
  res.timings.emplace_back("verify", clock.lap());

  if (write_artifacts) {
    // decay table + plot data
    std::vector<double> b_t, b_v, c_v;
    for (std::size_t q = 0; q < res.baseline_records.size(); ++q) {
      b_t.push_back(res.baseline_records[q].t);
      b_v.push_back(res.baseline_records[q].p_linf);
      c_v.push_back(res.corrected_records[q].p_linf);
    }
    io::write_csv(cfg.output_dir + "/decay_series.csv",
                  {{"t", b_t}, {"P0_linf", b_v}, {"Pk_linf", c_v}});
    json dt;
    dt["fingerprint"] = cfg.fingerprint();
    dt["k"] = k;
    dt["log_corrected"] = dc.log_corrected;
    dt["baseline"] = {{"slope", dc.baseline_slope},
                      {"target", dc.baseline_target},
                      {"r2", dc.fit_baseline.r2},
                      {"pass", dc.baseline_pass}};
    dt["corrected"] = {{"slope", dc.corrected_slope},
                       {"target", dc.corrected_target},
                       {"r2", dc.fit_corrected.r2},
                       {"pass", dc.corrected_pass}};
    io::write_text(cfg.output_dir + "/decay_table.json", dt.dump(2));
    if (cfg.svg) {
      io::svg_loglog(cfg.output_dir + "/decay.svg", "remainder decay",
                     "1+t", "L-inf norm",
                     {{"baseline |rho-rho_bar|", b_t, b_v},
                      {"corrected |P_k|", b_t, c_v}});
    }

    // run manifest with artifact hashes
    json man;
    man["config"] = cfg.to_json();
    man["fingerprint"] = cfg.fingerprint();
    for (const auto& [name, secs] : res.timings)
      man["timings"][name] = secs;
    json checks = json::object();
    checks["all_pass"] = res.all_pass;
    checks["failures"] = res.failures;
    man["checks"] = checks;
    const char* files[] = {"profile.csv", "gauss_bounds.json",
                           "corrections.json", "residual_scan.csv",
                           "residual_scan.json", "decay_series.csv",
                           "decay_table.json"};
    for (const char* f : files) {
      const std::string p = cfg.output_dir + "/" + f;
      if (io::file_exists(p))
        man["artifacts"].push_back({{"path", p},
                                    {"bytes", io::read_text(p).size()},
                                    {"fnv64", io::hash_file(p)}});
    }
    io::write_text(cfg.output_dir + "/run_manifest.json", man.dump(2));
  }
  return res;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base,
                                const std::vector<std::string>& lambdas) {
  std::vector<SweepRow> rows;
  for (const std::string& ls : lambdas) {
    SweepRow row;
    try {
      ExperimentConfig cfg = base;
      const auto rat = Rational::parse(ls);
      const double lam = rat ? rat->value() : std::stod(ls);
      cfg.params = Params(lam, base.params.rho_minus, base.params.rho_plus,
                          rat);
      cfg.sim.params = cfg.params;
      std::ostringstream sub;
      sub << base.output_dir << "/lam_" << io::fnv1a64_hex(ls).substr(0, 6);
      cfg.output_dir = sub.str();
      row.lambda = lam;
      const KThresholds kt = k_thresholds(cfg.params);
      row.k = kt.k;
      row.k0 = kt.k0;
      row.integer_k = kt.integer_k;

      // Per-branch measurement policy. The asymptotic rate needs a window
      // clear of the second-order interference (which fades like
      // (1+t)^-sigma), but within the resolution floor of the scheme; for
      // small lambda the window moves earlier and the grid gets finer.
      // Below the 1/7 threshold the first correction is still the best
      // available initial preparation even though the theorems stop at
      // k0 = 0.
      if (lam < 1.0 / 7.0) {
        cfg.k = 1;
        cfg.sim.cells = std::max(cfg.sim.cells, 4096);
        cfg.sim.t_end = 3e3;
        cfg.fit_t_min = 20.0;
      } else if (lam < 0.45) {
        cfg.sim.t_end = 3e3;
        cfg.fit_t_min = 20.0;
      } else {
        cfg.sim.t_end = 1e4;
        cfg.fit_t_min = 100.0;
      }

      const PipelineResult res = run_pipeline(cfg, Stage::Verify);
      row.baseline_slope = res.decay->baseline_slope;
      row.baseline_target = res.decay->baseline_target;
      row.corrected_slope = res.decay->corrected_slope;
      row.corrected_target = res.decay->corrected_target;
      // the sweep assesses the branch structure of the baseline rate
      row.pass = res.decay->baseline_pass;
    } catch (const Error& e) {
      row.error = e.what();
      row.pass = false;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.pass = false;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_table(const std::string& dir,
                       const std::vector<SweepRow>& rows) {
  std::vector<double> lam, kk, kk0, bs, bt, cs, ct, pass;
  json jt = json::array();
  for (const auto& r : rows) {
    lam.push_back(r.lambda);
    kk.push_back(r.k);
    kk0.push_back(r.k0);
    bs.push_back(r.baseline_slope);
    bt.push_back(r.baseline_target);
    cs.push_back(r.corrected_slope);
    ct.push_back(r.corrected_target);
    pass.push_back(r.pass ? 1.0 : 0.0);
    json jr;
    jr["lambda"] = r.lambda;
    jr["k"] = r.k;
    jr["k0"] = r.k0;
    jr["integer_k"] = r.integer_k;
    jr["baseline_slope"] = r.baseline_slope;
    jr["baseline_target"] = r.baseline_target;
    jr["corrected_slope"] = r.corrected_slope;
    jr["corrected_target"] = r.corrected_target;
    jr["pass"] = r.pass;
    if (!r.error.empty()) jr["error"] = r.error;
    jt.push_back(jr);
  }
  io::write_csv(dir + "/sweep_table.csv",
                {{"lambda", lam}, {"k", kk}, {"k0", kk0},
                 {"baseline_slope", bs}, {"baseline_target", bt},
                 {"corrected_slope", cs}, {"corrected_target", ct},
                 {"pass", pass}});
  io::write_text(dir + "/sweep_table.json", jt.dump(2));
}

}  // namespace dwlab
