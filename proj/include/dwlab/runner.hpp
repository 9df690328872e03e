#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dwlab/analysis.hpp"
#include "dwlab/expansion.hpp"
#include "dwlab/hierarchy.hpp"
#include "dwlab/profile.hpp"
#include "dwlab/solver.hpp"

namespace dwlab {

/// Full experiment description: params, grids, hierarchy method, solver
/// setup, analysis options and output layout. Parses from a strict JSON
/// schema where unknown keys are errors.
struct ExperimentConfig {
  ExperimentConfig() {
    sim.t_end = 1e4;
    sim.snapshots = 30;
    sim.snapshot_t_first = 1.0;
  }

  Params params;
  PressureLaw law = PressureLaw::gamma_law();

  double xi_half_width = 12.0;
  int xi_intervals = 2048;

  int k = -1;  // -1 builds k0(lambda)
  enum class Method { Colloc, Fourier, Both };
  Method method = Method::Colloc;
  FourierOptions fourier;

  double scan_t_min = 10.0;
  double scan_t_max = 1e4;
  int scan_points = 25;
  double scan_tolerance = 0.05;

  SimConfig sim;  // params/law copied in at resolve time

  // Decay fits start here; the default sits past the second-order
  // interference window (see the decay checks below).
  double fit_t_min = 100.0;
  enum class LogCorrection { Auto, On, Off };
  LogCorrection log_correction = LogCorrection::Auto;

  std::uint64_t seed = 0;
  std::string output_dir = "out";
  bool svg = true;
  bool strict = false;

  int resolved_k() const;
  bool log_flag() const;  // resolved log-correction switch

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
  /// Hash of the configuration subset that determines artifacts.
  std::string fingerprint() const;
};

enum class Stage { Profile, Expand, Simulate, Verify };

struct DualCheck {
  int level = 0;
  double l2_distance = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<double> contraction;
  bool contraction_ok = false;  // <= 0.5 from sweep 2 on
};

struct DecayCheck {
  double baseline_slope = 0.0;
  double corrected_slope = 0.0;
  double baseline_target = 0.0;
  double corrected_target = 0.0;
  double baseline_tol = 0.08;
  FitResult fit_baseline, fit_corrected;
  bool log_corrected = false;
  bool baseline_pass = false;
  bool corrected_pass = false;  // vacuously true when k0 = 0
  bool pass = false;
};

struct PipelineResult {
  WaveProfile profile;
  GaussianBoundReport gauss;
  CorrectionSet corrections;
  std::vector<DualCheck> dual;
  std::optional<ResidualScan> scan;
  std::optional<RunResult> sim;
  std::vector<RemainderRecord> corrected_records;
  std::vector<RemainderRecord> baseline_records;
  std::optional<DecayCheck> decay;
  std::vector<EnergyRecord> energy;
  bool sim_reused = false;
  bool all_pass = true;
  std::vector<std::string> failures;
  std::vector<std::pair<std::string, double>> timings;
};

/// Runs the pipeline up to the requested stage, writing artifacts and the
/// run manifest under config.output_dir.
PipelineResult run_pipeline(const ExperimentConfig& config, Stage upto,
                            bool write_artifacts = true);

struct SweepRow {
  double lambda = 0.0;
  double k = 0.0;
  int k0 = 0;
  bool integer_k = false;
  double baseline_slope = 0.0;
  double baseline_target = 0.0;
  double corrected_slope = 0.0;
  double corrected_target = 0.0;
  bool pass = false;
  std::string error;  // per-lambda failures do not abort the sweep
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& base,
                                const std::vector<std::string>& lambdas);

void write_sweep_table(const std::string& dir,
                       const std::vector<SweepRow>& rows);

/// Theoretical L-inf decay exponent of rho - rho_bar by damping branch.
double baseline_target_exponent(double lambda);

}  // namespace dwlab
