#pragma once

// Shared lazily-built fixtures so expensive solves run once per test binary.

#include "dwlab/analysis.hpp"
#include "dwlab/expansion.hpp"
#include "dwlab/hierarchy.hpp"
#include "dwlab/profile.hpp"
#include "dwlab/solver.hpp"

namespace fixtures {

struct GammaCase {
  dwlab::Params params{0.5, 1.0, 1.05};
  dwlab::PressureLaw law = dwlab::PressureLaw::gamma_law(1.4, 1.0);
  dwlab::XiGrid grid = dwlab::XiGrid::make(12.0, 2048);
  dwlab::WaveProfile profile;
  dwlab::CorrectionSet corrections;

  GammaCase() {
    profile = dwlab::solve_wave(params, law, grid);
    corrections = dwlab::build_hierarchy(profile, law, 2);
  }
};

inline const GammaCase& gamma_case() {
  static const GammaCase c;
  return c;
}

struct LinearCase {
  dwlab::Params params{0.5, 0.975, 1.025};
  dwlab::PressureLaw law = dwlab::PressureLaw::linear(1.0);
  dwlab::XiGrid grid = dwlab::XiGrid::make(12.0, 2048);
  dwlab::WaveProfile profile;
  dwlab::CorrectionSet corrections;

  LinearCase() {
    profile = dwlab::solve_wave(params, law, grid);
    corrections = dwlab::build_hierarchy(profile, law, 2);
  }
};

inline const LinearCase& linear_case() {
  static const LinearCase c;
  return c;
}

// One medium self-similar run shared by solver/analysis tests.
struct SimCase {
  dwlab::SimConfig config;
  dwlab::ExpansionEvaluator ev2;
  dwlab::ExpansionEvaluator ev0;
  dwlab::RunResult run;

  SimCase()
      : ev2(gamma_case().profile, gamma_case().corrections, 2,
            gamma_case().law),
        ev0(gamma_case().profile, gamma_case().corrections, 0,
            gamma_case().law) {
    config.params = gamma_case().params;
    config.law = gamma_case().law;
    config.frame = dwlab::Frame::SelfSimilar;
    config.half_width = 12.0;
    config.cells = 1024;
    config.cfl = 0.4;
    config.t_end = 200.0;
    config.snapshots = 10;
    config.snapshot_t_first = 1.0;
    config.perturbation.amplitude_rho = 0.01 * config.params.delta();
    run = dwlab::run(config, ev2);
  }
};

inline const SimCase& sim_case() {
  static const SimCase c;
  return c;
}

}  // namespace fixtures
