#pragma once

#include <vector>

#include "dwlab/grid.hpp"
#include "dwlab/params.hpp"
#include "dwlab/pressure.hpp"
#include "dwlab/profile.hpp"

namespace dwlab {

/// One correction level: G_i, its density rho_i = G_i', and the momentum
/// factor m_i = c1_i G_i + (1+lambda)/2 (xi G_i)'. All tabulated on the
/// profile grid.
struct Correction {
  int i = 0;
  std::vector<double> G;
  std::vector<double> rho;   // G'
  std::vector<double> drho;  // G''
  std::vector<double> m;
  std::vector<double> dm;
  double ode_residual_l2 = 0.0;
  double mass = 0.0;         // quadrature of G_i
  double mass_target = 0.0;  // (c2_i/c1_i) * mass of level i-1
};

struct CorrectionSet {
  int k = 0;
  std::vector<double> G0;  // (p(rho_bar))' / (1+lambda), the seed level
  double mass_G0 = 0.0;    // (p(rho_+)-p(rho_-)) / (1+lambda)
  std::vector<Correction> levels;

  const Correction& at(int i) const;  // 1-based level access
  bool has(int i) const { return i >= 1 && i <= static_cast<int>(levels.size()); }
};

/// Source bundle for level i: the Taylor sums of the pressure and
/// momentum-flux expansions, their combination h_i, and the full ODE
/// right-hand side c2_i G_{i-1} - (h_i)'.
struct RhsBundle {
  int i = 0;
  std::vector<double> h;
  std::vector<double> h_tilde;  // empty for i = 1
  std::vector<double> dh;
  std::vector<double> rhs;

  struct TaylorTerm {
    int kind = 0;  // 1, 2, 3 for the three expansion families
    int j = 0;
    std::vector<double> values;
  };
  std::vector<TaylorTerm> taylor_terms;

  const std::vector<double>* taylor(int kind, int j) const;
};

/// Builds the level-i source terms from the profile and levels < i.
/// For i = 1: h_1 = (1+lambda)/2 xi (p(rho))' + ((p(rho))')^2 / rho.
/// For i >= 2 the ordered-composition Taylor sums are enumerated exactly.
RhsBundle assemble_rhs(int i, const WaveProfile& profile,
                       const CorrectionSet& sofar, const PressureLaw& law,
                       const HierarchyConstants& hc);

struct CollocationOptions {
  double tol_rel = 1e-8;  // residual <= tol_rel * max(1, ||rhs||_2)
};

/// Solves the level-i linear ODE
///   (p'(rho_bar) G')' + (1+lambda)/2 (xi G)' + c1_i G = rhs
/// with homogeneous Dirichlet ends and the mass constraint imposed through
/// a bordered (Lagrange multiplier) linear system.
Correction solve_correction_collocation(int i, const RhsBundle& rhs,
                                        const WaveProfile& profile,
                                        const PressureLaw& law,
                                        const HierarchyConstants& hc,
                                        const CorrectionSet& sofar,
                                        const CollocationOptions& opts = {});

struct FourierOptions {
  double eta_max = 24.0;
  int n_eta = 2400;
  double tol = 1e-12;   // successive-iterate L2 distance
  int max_sweeps = 60;
};

struct FourierResult {
  Correction correction;
  std::vector<double> contraction;  // per-sweep ratios, first entry = sweep 2
  std::vector<double> distances;    // successive-iterate L2 distances
  int sweeps = 0;
};

/// Independent route to G_i: the transformed zero-mean variable is solved as
/// a fixed point in Fourier space, inverting the constant-coefficient
/// operator with the explicit integrating-factor kernel (exponent
/// -2 c1_i/(1+lambda), reducing to 4 lambda/(1+lambda) at i = 1) and lagging
/// the variable-coefficient term. Throws HierarchyError when the empirical
/// contraction factor stays >= 1 for two consecutive sweeps.
FourierResult solve_correction_fourier(int i, const RhsBundle& rhs,
                                       const WaveProfile& profile,
                                       const PressureLaw& law,
                                       const HierarchyConstants& hc,
                                       const CorrectionSet& sofar,
                                       const FourierOptions& opts = {});

/// rho_i, m_i and derivative tables from a solved G_i.
Correction momentum_from_G(int i, std::vector<double> G, const XiGrid& grid,
                           const HierarchyConstants& hc);

/// Weighted-space norm (sum over 0 <= s, r <= l of ||xi^s d^r f||^2)^(1/2).
/// derivs[r] must hold the r-th derivative table for r = 0..l.
double chi_norm(const std::vector<std::vector<double>>& derivs,
                const XiGrid& grid, int l);

enum class HierarchyMethod { Collocation, Fourier };

/// Builds levels 1..k sequentially with the chosen primary method.
CorrectionSet build_hierarchy(const WaveProfile& profile,
                              const PressureLaw& law, int k,
                              HierarchyMethod method = HierarchyMethod::Collocation,
                              const CollocationOptions& copts = {},
                              const FourierOptions& fopts = {});

}  // namespace dwlab
