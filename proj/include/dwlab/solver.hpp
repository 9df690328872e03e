#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dwlab/expansion.hpp"
#include "dwlab/params.hpp"
#include "dwlab/pressure.hpp"

namespace dwlab {

enum class Frame { Fixed, SelfSimilar };
enum class Limiter { Minmod, MC, Central };
enum class FluxScheme { Rusanov, HLL };
enum class Boundary { FarField, Periodic };  // periodic is test-only

/// Initial perturbation added on top of the sampled expansion. The default
/// shape is the cell-difference of a smooth compactly supported bump, which
/// makes the discrete mass exactly neutral by telescoping. The raw-bump
/// shape carries mass and requires the centering shift. The tail-difference
/// shape is the cell-difference of (1+u^2)^(-1/4): its potential has
/// |x|^(-1/2) tails, the slowest decay the H^3 hypothesis admits, which is
/// the data class that saturates the theoretical decay bounds (a compact
/// bump relaxes diffusively and decays faster than the bounds).
struct Perturbation {
  enum class Kind { BumpDifference, BumpRaw, TailDifference };
  Kind kind = Kind::BumpDifference;
  double amplitude_rho = 0.0;
  double amplitude_m = 0.0;
  double center = 0.0;
  double width = 2.0;
  bool auto_shift = false;  // for BumpRaw: re-center instead of failing
};

struct SimConfig {
  Params params;
  PressureLaw law = PressureLaw::gamma_law();
  Frame frame = Frame::SelfSimilar;
  double half_width = 12.0;  // xi (self-similar) or x (fixed)
  int cells = 2048;
  double cfl = 0.4;
  double t_end = 1000.0;
  double snapshot_t_first = 1.0;
  int snapshots = 16;                 // log-spaced when times empty
  std::vector<double> snapshot_times;
  Limiter limiter = Limiter::Minmod;
  FluxScheme flux = FluxScheme::Rusanov;
  Boundary boundary = Boundary::FarField;
  Perturbation perturbation;
  double budget_seconds = 0.0;  // 0 = unlimited
  long max_steps = 200000000L;

  // test hooks (never serialized): analytic forcing on (rho, m) in the
  // fixed frame, and a switch that drops the flux terms entirely
  std::function<void(double x, double t, double* f_rho, double* f_m)> forcing;
  bool disable_flux = false;
};

/// Cell-averaged state. In the self-similar frame the stored momentum is the
/// scaled variable M = (1+t)^(sigma/2) m, which makes the diffusion wave
/// stationary; physical_m() undoes the scaling.
struct SimState {
  Frame frame = Frame::Fixed;
  double t = 0.0;
  double dx = 0.0;
  double x_shift = 0.0;
  std::vector<double> centers;  // x (fixed) or xi (self-similar)
  std::vector<double> rho;
  std::vector<double> mom;
  double mass_expected = 0.0;  // discrete ledger (see step bookkeeping)
  double mom_ledger = 0.0;     // accumulated momentum boundary flux
  long steps = 0;

  double sigma(double lambda) const { return 1.0 - lambda; }
  double mass() const;
  /// Physical momentum of cell j.
  double physical_m(int j, double lambda) const;
  /// Physical coordinate of cell j (includes the centering shift).
  double physical_x(int j, double lambda) const;
};

struct RunResult {
  std::vector<SimState> snapshots;
  bool completed = true;
  bool budget_exceeded = false;
  long total_steps = 0;
  double wall_seconds = 0.0;
};

/// Samples the expansion plus perturbation at t = 0. Enforces positivity and
/// the perturbation smallness guard (|amplitude| <= 2 delta).
SimState init_state(const SimConfig& config, const ExpansionEvaluator& ev);

/// One MUSCL / Rusanov (or HLL) step with Heun time stepping; the linear
/// decay terms (friction, and the frame's geometric contraction) are
/// integrated exactly per stage through their integrating factors. dt_max
/// caps the CFL step (used to land on snapshot times).
/// Returns the step actually taken (in t).
double step(SimState& state, const SimConfig& config, double dt_max = 1e300);

/// Advances to t_end collecting snapshots. Budget overruns return partial
/// results with budget_exceeded set; hard failures (positivity, CFL
/// collapse) throw SolverError.
RunResult run(const SimConfig& config, const ExpansionEvaluator& ev);

std::string to_string(Frame f);
std::string to_string(Limiter l);
std::string to_string(FluxScheme f);

}  // namespace dwlab
