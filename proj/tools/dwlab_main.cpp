// Command-line driver: profile | expand | simulate | verify | sweep.
// Exit codes: 0 ok, 1 acceptance failure, 2 config error, 3 hierarchy error,
// 4 solver error, 5 budget exceeded.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dwlab/errors.hpp"
#include "dwlab/io.hpp"
#include "dwlab/runner.hpp"

namespace {

using dwlab::ExperimentConfig;
using nlohmann::json;

struct CommonFlags {
  std::string config_path;
  std::string lambda_text;
  int k = -1000;  // sentinel: untouched
  std::string method;
  std::string frame;
  double t_end = -1.0;
  std::string out;
  bool dry_run = false;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "experiment config JSON");
  cmd->add_option("--lambda", f.lambda_text,
                  "damping exponent (decimal or p/q)");
  cmd->add_option("--k", f.k, "expansion order (default: k0(lambda))");
  cmd->add_option("--method", f.method, "colloc | fourier | both");
  cmd->add_option("--frame", f.frame, "fixed | selfsim");
  cmd->add_option("--T", f.t_end, "simulation end time");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--dry-run", f.dry_run, "validate configuration and exit");
  cmd->add_flag("--strict", f.strict, "escalate warnings to errors");
}

ExperimentConfig make_config(const CommonFlags& f) {
  ExperimentConfig cfg;
  if (!f.config_path.empty())
    cfg = ExperimentConfig::from_file(f.config_path);
  if (!f.lambda_text.empty()) {
    const auto rat = dwlab::Rational::parse(f.lambda_text);
    double lam;
    if (rat) {
      lam = rat->value();
    } else {
      try {
        lam = std::stod(f.lambda_text);
      } catch (const std::exception&) {
        throw dwlab::ConfigError("config",
                                 "cannot parse --lambda '" + f.lambda_text + "'");
      }
    }
    cfg.params = dwlab::Params(lam, cfg.params.rho_minus, cfg.params.rho_plus,
                               rat);
    cfg.sim.params = cfg.params;
  }
  if (f.k != -1000) cfg.k = f.k;
  if (!f.method.empty()) {
    if (f.method == "colloc") cfg.method = ExperimentConfig::Method::Colloc;
    else if (f.method == "fourier") cfg.method = ExperimentConfig::Method::Fourier;
    else if (f.method == "both") cfg.method = ExperimentConfig::Method::Both;
    else throw dwlab::ConfigError("config", "unknown --method " + f.method);
  }
  if (!f.frame.empty()) {
    if (f.frame == "fixed") cfg.sim.frame = dwlab::Frame::Fixed;
    else if (f.frame == "selfsim") cfg.sim.frame = dwlab::Frame::SelfSimilar;
    else throw dwlab::ConfigError("config", "unknown --frame " + f.frame);
  }
  if (f.t_end > 0.0) cfg.sim.t_end = f.t_end;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.strict) cfg.strict = true;
  return cfg;
}

int report_error(const dwlab::Error& e, const std::string& out_dir) {
  json j;
  j["stage"] = e.stage();
  j["code"] = static_cast<int>(e.code());
  j["message"] = e.what();
  j["context"] = e.context();
  std::cerr << j.dump(2) << "\n";
  try {
    if (!out_dir.empty() && dwlab::io::file_exists(out_dir))
      dwlab::io::write_text(out_dir + "/error.json", j.dump(2));
  } catch (const std::exception&) {
    // error reporting must not mask the original failure
  }
  return static_cast<int>(e.code());
}

void print_summary(const dwlab::PipelineResult& res) {
  if (res.decay) {
    std::printf("baseline  slope %+.4f  target %+.4f  (R2 %.4f)  %s\n",
                res.decay->baseline_slope, res.decay->baseline_target,
                res.decay->fit_baseline.r2,
                res.decay->baseline_pass ? "pass" : "FAIL");
    std::printf("corrected slope %+.4f  target %+.4f  (R2 %.4f)  %s%s\n",
                res.decay->corrected_slope, res.decay->corrected_target,
                res.decay->fit_corrected.r2,
                res.decay->corrected_pass ? "pass" : "FAIL",
                res.decay->log_corrected ? "  [ln-corrected]" : "");
  }
  if (res.scan) {
    std::printf("residual scan: Linf slope %+.4f (target %+.4f) %s\n",
                res.scan->fit_linf.slope, res.scan->predicted_linf,
                res.scan->pass_linf ? "pass" : "FAIL");
  }
  for (const auto& d : res.dual)
    std::printf("dual check level %d: |G_c - G_f| = %.3e (tol %.3e) %s\n",
                d.level, d.l2_distance, d.tolerance,
                d.pass ? "pass" : "FAIL");
  if (!res.failures.empty()) {
    std::printf("failed checks:");
    for (const auto& s : res.failures) std::printf(" %s", s.c_str());
    std::printf("\n");
  }
  std::printf("%s\n", res.all_pass ? "ALL CHECKS PASS" : "CHECKS FAILED");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diffusion-wave expansion laboratory for damped 1-D Euler"};
  app.require_subcommand(1);

  CommonFlags pf, ef, sf, vf, wf;
  CLI::App* cmd_profile = app.add_subcommand("profile", "solve the wave profile");
  add_common(cmd_profile, pf);
  CLI::App* cmd_expand =
      app.add_subcommand("expand", "build corrections and the residual scan");
  add_common(cmd_expand, ef);
  CLI::App* cmd_sim = app.add_subcommand("simulate", "long-time simulation");
  add_common(cmd_sim, sf);
  CLI::App* cmd_verify =
      app.add_subcommand("verify", "full pipeline with decay-rate checks");
  add_common(cmd_verify, vf);
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "verify across a lambda list");
  add_common(cmd_sweep, wf);
  std::string lambdas_text = "0.10,0.20,0.50";
  cmd_sweep->add_option("--lambdas", lambdas_text,
                        "comma-separated lambda values");

  CLI11_PARSE(app, argc, argv);

  const CommonFlags& flags = cmd_profile->parsed()   ? pf
                             : cmd_expand->parsed()  ? ef
                             : cmd_sim->parsed()     ? sf
                             : cmd_verify->parsed()  ? vf
                                                     : wf;
  std::string out_dir;
  try {
    ExperimentConfig cfg = make_config(flags);
    out_dir = cfg.output_dir;
    if (flags.dry_run) {
      std::printf("config ok (fingerprint %s)\n", cfg.fingerprint().c_str());
      return 0;
    }
    dwlab::io::ensure_dir(cfg.output_dir);

    if (cmd_profile->parsed()) {
      dwlab::run_pipeline(cfg, dwlab::Stage::Profile);
      std::printf("profile written to %s\n", cfg.output_dir.c_str());
      return 0;
    }
    if (cmd_expand->parsed()) {
      const auto res = dwlab::run_pipeline(cfg, dwlab::Stage::Expand);
      print_summary(res);
      const bool scan_ok =
          res.scan && res.scan->fit_ok;
      if (!scan_ok)
        throw dwlab::HierarchyError("expand", "residual scan fit quality");
      return res.all_pass ? 0 : 1;
    }
    if (cmd_sim->parsed()) {
      const auto res = dwlab::run_pipeline(cfg, dwlab::Stage::Simulate);
      if (res.sim && res.sim->budget_exceeded) {
        std::fprintf(stderr, "budget exceeded; partial results in %s\n",
                     cfg.output_dir.c_str());
        return static_cast<int>(dwlab::ExitCode::BudgetExceeded);
      }
      std::printf("simulation done: %ld steps, %zu snapshots%s\n",
                  res.sim->total_steps, res.sim->snapshots.size(),
                  res.sim_reused ? " (reused)" : "");
      return 0;
    }
    if (cmd_verify->parsed()) {
      const auto res = dwlab::run_pipeline(cfg, dwlab::Stage::Verify);
      print_summary(res);
      return res.all_pass ? 0 : 1;
    }
    // sweep
    std::vector<std::string> lams;
    std::stringstream ss(lambdas_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) lams.push_back(item);
    }
    ExperimentConfig base = make_config(flags);
    dwlab::io::ensure_dir(base.output_dir);
    const auto rows = dwlab::run_sweep(base, lams);
    dwlab::write_sweep_table(base.output_dir, rows);
    bool all = true;
    for (const auto& r : rows) {
      const std::string note = r.error.empty() ? "" : "  [" + r.error + "]";
      std::printf("lambda %-8.5f k0=%d  baseline %+.4f (target %+.4f)  %s%s\n",
                  r.lambda, r.k0, r.baseline_slope, r.baseline_target,
                  r.pass ? "pass" : "FAIL", note.c_str());
      all = all && r.pass;
    }
    return all ? 0 : 1;
  } catch (const dwlab::Error& e) {
    return report_error(e, out_dir);
  } catch (const std::exception& e) {
    json j;
    j["stage"] = "unknown";
    j["code"] = 4;
    j["message"] = e.what();
    j["context"] = "";
    std::cerr << j.dump(2) << "\n";
    return 4;
  }
}
