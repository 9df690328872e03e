#pragma once

#include <string>
#include <vector>

#include "dwlab/grid.hpp"
#include "dwlab/params.hpp"
#include "dwlab/pressure.hpp"

namespace dwlab {

/// Self-similar diffusion-wave profile of the generalized porous media
/// equation: in xi = x/(1+t)^((1+lambda)/2) the density profile satisfies
///   (p(rho))'' + ((1+lambda)/2) xi rho' = 0,  rho(+-inf) = rho_+-,
/// and the momentum factor M(xi) = -(p(rho))' gives
/// m(x,t) = (1+t)^(-sigma/2) M(xi).
struct WaveProfile {
  XiGrid grid;
  Params params;
  std::vector<double> rho;     // rho_bar at nodes
  std::vector<double> drho;    // d/dxi
  std::vector<double> d2rho;   // from the profile ODE, not double differencing
  std::vector<double> d3rho;   // ODE differentiated once analytically
  std::vector<double> Mbar;    // -(p(rho))'
  std::vector<double> dMbar;
  std::vector<double> p_xi;    // (p(rho))' = p'(rho) rho'
  std::vector<double> p_xixi;  // (p(rho))''
  std::vector<double> residual;  // solver-discretization residual field
  double residual_inf = 0.0;
  bool monotone = true;  // flagged, never fatal
  int newton_iterations = 0;
};

struct ProfileOptions {
  double tol = 1e-9;            // residual certificate threshold
  double newton_tol = 1e-11;    // Newton target (below tol)
  int max_iter = 60;
  double flatness_threshold = 1e-10;  // |rho'(+-L)| above this => L too small
};

/// Solves the profile two-point BVP with 4th-order centered differences and
/// a damped Newton iteration started from the erf-shaped linear-law ramp.
/// Throws SolverError on non-convergence and ConfigError when the grid
/// truncation is too tight (far-field not flat).
WaveProfile solve_wave(const Params& params, const PressureLaw& law,
                       const XiGrid& grid, const ProfileOptions& opts = {});

/// Momentum factor M(xi) = -(p(rho))'; already tabulated on the profile,
/// returned by reference for the operation's contract.
const std::vector<double>& momentum_factor(const WaveProfile& profile);

struct GaussianBoundReport {
  struct Entry {
    std::string field;
    double C = 0.0;   // |f| <= C * delta * exp(-c xi^2)
    double c = 0.0;
    bool pass = false;
  };
  std::vector<Entry> entries;
  bool pass = false;
  double c_min = 0.0;  // weakest fitted rate among the fields
};

/// Fits Gaussian envelopes C*delta*exp(-c xi^2) to |rho - rho_+-| and the
/// first three xi-derivatives. Passes when every field admits c > 0 with
/// C <= c_max.
GaussianBoundReport check_gaussian_bounds(const WaveProfile& profile,
                                          double c_max = 10.0);

}  // namespace dwlab
