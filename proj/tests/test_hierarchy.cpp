#include <doctest.h>

#include <cmath>

#include "dwlab/errors.hpp"
#include "dwlab/hierarchy.hpp"
#include "fixtures.hpp"

using namespace dwlab;

namespace {

double l2_diff(const std::vector<double>& a, const std::vector<double>& b,
               double h) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return std::sqrt(s * h);
}

}  // namespace

TEST_CASE("first-level source term against the closed-form linear profile") {
  const auto& fx = fixtures::linear_case();
  const HierarchyConstants hc = HierarchyConstants::make(0.5, 1);
  CorrectionSet seed = build_hierarchy(fx.profile, fx.law, 0);
  const RhsBundle rb = assemble_rhs(1, fx.profile, seed, fx.law, hc);

  // independent evaluation from the closed form at xi = 0:
  // (p(rho))' (0) = c^2 delta sqrt((1+lambda)/(4 pi c^2)), rho(0) = midpoint
  const double delta = fx.params.jump();
  const double pxi0 = delta * std::sqrt(1.5 / (4.0 * M_PI));
  const double rho0 = 0.5 * (fx.params.rho_minus + fx.params.rho_plus);
  const double h1_expected = pxi0 * pxi0 / rho0;  // the xi term vanishes at 0
  const int mid = fx.grid.n / 2;
  CHECK(rb.h[mid] == doctest::Approx(h1_expected).epsilon(1e-6));
}

TEST_CASE("constant profile produces identically zero sources") {
  const Params prm(0.5, 1.0, 1.0);
  const XiGrid grid = XiGrid::make(8.0, 256);
  const WaveProfile w = solve_wave(prm, PressureLaw::gamma_law(), grid);
  const HierarchyConstants hc = HierarchyConstants::make(0.5, 1);
  CorrectionSet seed = build_hierarchy(w, PressureLaw::gamma_law(), 0);
  const RhsBundle rb = assemble_rhs(1, w, seed, PressureLaw::gamma_law(), hc);
  CHECK(max_abs(rb.h) == 0.0);
  CHECK(max_abs(rb.rhs) == 0.0);

  // zero right-hand side solves to the zero correction
  const Correction c = solve_correction_collocation(
      1, rb, w, PressureLaw::gamma_law(), hc, seed);
  CHECK(max_abs(c.G) < 1e-14);
}

TEST_CASE("second-level pressure Taylor sum matches direct evaluation") {
  const auto& fx = fixtures::gamma_case();
  const HierarchyConstants hc = HierarchyConstants::make(0.5, 2);
  const RhsBundle rb = assemble_rhs(2, fx.profile, fx.corrections, fx.law, hc);
  const auto* term = rb.taylor(1, 2);
  REQUIRE(term != nullptr);
  for (int j : {fx.grid.n / 2, fx.grid.n / 2 + 37, fx.grid.n / 2 - 211}) {
    const double rho1 = fx.corrections.at(1).rho[j];
    const double expected =
        0.5 * fx.law.deriv(fx.profile.rho[j], 2) * rho1 * rho1;
    CHECK((*term)[j] == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("composition enumeration: third-level cross terms") {
  // at i = 3, kind 1, j = 2 the ordered compositions of 3 are (1,2), (2,1)
  const Params prm(0.8, 1.0, 1.05);
  const PressureLaw law = PressureLaw::gamma_law(1.4, 1.0);
  const XiGrid grid = XiGrid::make(12.0, 1024);
  const WaveProfile w = solve_wave(prm, law, grid);
  const CorrectionSet corr = build_hierarchy(w, law, 3);
  const HierarchyConstants hc = HierarchyConstants::make(0.8, 3);
  const RhsBundle rb = assemble_rhs(3, w, corr, law, hc);
  const auto* term = rb.taylor(1, 2);
  REQUIRE(term != nullptr);
  const int j = grid.n / 2 + 101;
  const double expected = 0.5 * law.deriv(w.rho[j], 2) * 2.0 *
                          corr.at(1).rho[j] * corr.at(2).rho[j];
  CHECK((*term)[j] == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("rhs bundle integrates to the mass identity") {
  const auto& fx = fixtures::gamma_case();
  const HierarchyConstants hc = HierarchyConstants::make(0.5, 2);
  for (int i : {1, 2}) {
    const RhsBundle rb = assemble_rhs(i, fx.profile, fx.corrections, fx.law, hc);
    const double lhs = integrate(rb.rhs, fx.grid.h);
    const double rhs = hc.c2_at(i) * (i == 1 ? fx.corrections.mass_G0
                                             : fx.corrections.at(i - 1).mass);
    CHECK(std::abs(lhs - rhs) < 1e-7);
  }
}

TEST_CASE("first correction carries mass -(p(rho_+)-p(rho_-))/2") {
  const auto& gam = fixtures::gamma_case();
  const double expected_g =
      -(gam.law.value(1.05) - gam.law.value(1.0)) / 2.0;
  CHECK(std::abs(gam.corrections.at(1).mass - expected_g) < 1e-7);

  // linear law: p jump = c^2 delta = 0.05 exactly
  const auto& lin = fixtures::linear_case();
  CHECK(std::abs(lin.corrections.at(1).mass - (-0.025)) < 1e-7);
}

TEST_CASE("mass-constraint chain across lambda") {
  const PressureLaw law = PressureLaw::gamma_law(1.4, 1.0);
  for (double lam : {0.3, 0.5, 0.8}) {
    const Params prm(lam, 1.0, 1.05);
    const int k0 = k_thresholds(lam).k0;
    const XiGrid grid = XiGrid::make(12.0, 2048);
    const WaveProfile w = solve_wave(prm, law, grid);
    const CorrectionSet corr = build_hierarchy(w, law, k0);
    for (const auto& c : corr.levels)
      CHECK(std::abs(c.mass - c.mass_target) < 1e-7);
  }
}

TEST_CASE("collocation is linear in the right-hand side") {
  const auto& fx = fixtures::gamma_case();
  const HierarchyConstants hc = HierarchyConstants::make(0.5, 1);
  CorrectionSet seed = build_hierarchy(fx.profile, fx.law, 0);
  RhsBundle rb = assemble_rhs(1, fx.profile, seed, fx.law, hc);
  const Correction base =
      solve_correction_collocation(1, rb, fx.profile, fx.law, hc, seed);

  RhsBundle doubled = rb;
  for (auto& v : doubled.rhs) v *= 2.0;
  for (auto& v : doubled.h) v *= 2.0;
  CorrectionSet seed2 = seed;
  seed2.mass_G0 *= 2.0;  // doubles the mass target with the rhs
  const Correction twice =
      solve_correction_collocation(1, doubled, fx.profile, fx.law, hc, seed2);
  double worst = 0.0;
  for (int j = 0; j <= fx.grid.n; ++j)
    worst = std::max(worst, std::abs(twice.G[j] - 2.0 * base.G[j]));
  CHECK(worst < 1e-13);
}

TEST_CASE("chi norm of the first correction scales linearly in delta") {
  std::vector<double> norms;
  for (double delta : {0.0125, 0.025, 0.05}) {
    const Params prm(0.5, 1.0 - delta / 2.0, 1.0 + delta / 2.0);
    const PressureLaw law = PressureLaw::linear(1.0);
    const XiGrid grid = XiGrid::make(12.0, 1024);
    const WaveProfile w = solve_wave(prm, law, grid);
    const CorrectionSet corr = build_hierarchy(w, law, 1);
    const Correction& c = corr.at(1);
    norms.push_back(chi_norm({c.G, c.rho}, grid, 1));
  }
  CHECK(norms[1] / norms[0] == doctest::Approx(2.0).epsilon(0.15));
  CHECK(norms[2] / norms[1] == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("collocation converges at order >= 2 under grid halving") {
  const Params prm(0.5, 1.0, 1.05);
  const PressureLaw law = PressureLaw::gamma_law(1.4, 1.0);
  // reference on the finest grid
  const XiGrid gref = XiGrid::make(12.0, 4096);
  const CorrectionSet cref =
      build_hierarchy(solve_wave(prm, law, gref), law, 1);
  double prev = 0.0;
  for (int n : {512, 1024}) {
    const XiGrid g = XiGrid::make(12.0, n);
    const CorrectionSet c = build_hierarchy(solve_wave(prm, law, g), law, 1);
    double err = 0.0;
    const int stride = 4096 / n;
    for (int j = 0; j <= n; ++j)
      err = std::max(err, std::abs(c.at(1).G[j] - cref.at(1).G[j * stride]));
    if (prev > 0.0) CHECK(prev / err >= 3.5);
    prev = err;
  }
}

TEST_CASE("momentum factors satisfy the derivative identity") {
  const auto& fx = fixtures::gamma_case();
  const double sigma = 0.5, a = 0.75;
  for (int i : {1, 2}) {
    const Correction& c = fx.corrections.at(i);
    // m' = i sigma rho + (1+lambda)/2 xi rho' checked by central differences
    std::vector<double> fd(fx.grid.size(), 0.0);
    for (int j = 1; j < fx.grid.n; ++j)
      fd[j] = (c.m[j + 1] - c.m[j - 1]) / (2.0 * fx.grid.h);
    double worst = 0.0;
    for (int j = 8; j <= fx.grid.n - 8; ++j) {
      const double want = i * sigma * c.rho[j] +
                          a * fx.grid.nodes[j] * c.drho[j];
      worst = std::max(worst, std::abs(fd[j] - want));
    }
    CHECK(worst < 1e-6);
  }
  // coefficient check at i = 1, lambda = 1/2: m1 = -1.0 G1 + 0.75 (xi G1)'
  const Correction& c1 = fx.corrections.at(1);
  for (int j : {100, 1024, 1700}) {
    const double xig_prime = c1.G[j] + fx.grid.nodes[j] * c1.rho[j];
    CHECK(c1.m[j] ==
          doctest::Approx(-1.0 * c1.G[j] + 0.75 * xig_prime).epsilon(1e-12));
  }
}

TEST_CASE("zero input produces the zero momentum correction") {
  const XiGrid grid = XiGrid::make(8.0, 128);
  const HierarchyConstants hc = HierarchyConstants::make(0.5, 1);
  const Correction c = momentum_from_G(1, std::vector<double>(129, 0.0), grid, hc);
  CHECK(max_abs(c.m) == 0.0);
}

TEST_CASE("chi norm basics") {
  const XiGrid grid = XiGrid::make(12.0, 2048);
  CHECK(chi_norm({std::vector<double>(grid.size(), 0.0)}, grid, 0) == 0.0);

  std::vector<double> f(grid.size());
  for (int j = 0; j < grid.size(); ++j)
    f[j] = std::exp(-grid.nodes[j] * grid.nodes[j]);
  // || e^{-xi^2} ||_L2 = (Int e^{-2 xi^2})^(1/2) = (pi/2)^(1/4)
  CHECK(chi_norm({f}, grid, 0) ==
        doctest::Approx(std::pow(M_PI / 2.0, 0.25)).epsilon(1e-6));

  CHECK_THROWS_AS(chi_norm({f}, grid, 1), HierarchyError);
}

TEST_CASE("first correction is delta-small in the weighted norm") {
  const auto& fx = fixtures::gamma_case();
  const Correction& c = fx.corrections.at(1);
  const double norm = chi_norm({c.G, c.rho}, fx.grid, 1);
  CHECK(norm <= 50.0 * fx.params.delta());
}

TEST_CASE("fourier route: zero source fixed point") {
  const Params prm(0.5, 1.0, 1.0);
  const XiGrid grid = XiGrid::make(8.0, 256);
  const PressureLaw law = PressureLaw::gamma_law();
  const WaveProfile w = solve_wave(prm, law, grid);
  const HierarchyConstants hc = HierarchyConstants::make(0.5, 1);
  CorrectionSet seed = build_hierarchy(w, law, 0);
  const RhsBundle rb = assemble_rhs(1, w, seed, law, hc);
  FourierOptions fo;
  fo.n_eta = 400;
  fo.eta_max = 16.0;
  const FourierResult fr = solve_correction_fourier(1, rb, w, law, hc, seed, fo);
  CHECK(fr.sweeps <= 2);
  CHECK(max_abs(fr.correction.G) < 1e-12);
}

TEST_CASE("fourier route: contraction small and mass correct") {
  const auto& fx = fixtures::gamma_case();
  const HierarchyConstants hc = HierarchyConstants::make(0.5, 1);
  CorrectionSet seed = build_hierarchy(fx.profile, fx.law, 0);
  const RhsBundle rb = assemble_rhs(1, fx.profile, seed, fx.law, hc);
  const FourierResult fr =
      solve_correction_fourier(1, rb, fx.profile, fx.law, hc, seed, {});
  for (std::size_t q = 0; q < fr.contraction.size(); ++q) {
    if (q + 1 < fr.distances.size() && fr.distances[q + 1] < 1e-13) break;
    CHECK(fr.contraction[q] <= 0.5);
  }
  CHECK(std::abs(fr.correction.mass - fx.corrections.at(1).mass) < 1e-9);
}

TEST_CASE("dual-route agreement across lambda and level") {
  const PressureLaw law = PressureLaw::gamma_law(1.4, 1.0);
  for (double lam : {0.3, 0.5, 0.8}) {
    const Params prm(lam, 1.0, 1.05);
    const int k0 = k_thresholds(lam).k0;
    const XiGrid grid = XiGrid::make(12.0, 2048);
    const WaveProfile w = solve_wave(prm, law, grid);
    const CorrectionSet corr = build_hierarchy(w, law, k0);
    const HierarchyConstants hc = HierarchyConstants::make(lam, k0);
    for (int i = 1; i <= k0; ++i) {
      const RhsBundle rb = assemble_rhs(i, w, corr, law, hc);
      const FourierResult fr =
          solve_correction_fourier(i, rb, w, law, hc, corr, {});
      const double dist = l2_diff(corr.at(i).G, fr.correction.G, grid.h);
      double n2 = 0.0;
      for (double v : corr.at(i).G) n2 += v * v;
      const double g_l2 = std::sqrt(n2 * grid.h);
      // the slow homogeneous mode |xi|^-(1+c1/a) is near-marginal at high
      // order; the routes resolve it differently at the 1e-4 level there
      const double a = 0.5 * (1.0 + lam);
      const double mode_exp = std::abs(1.0 + hc.c1_at(i) / a);
      const double tol = (mode_exp >= 0.5)
                             ? 1e-6 * std::max(prm.delta(), g_l2)
                             : 1e-4 * g_l2;
      CAPTURE(lam);
      CAPTURE(i);
      CHECK(dist <= tol);
    }
  }
}

TEST_CASE("degenerate level constant is rejected") {
  // at lambda = 1/2 the third-level constant c1_3 = 3 sigma - (1+lambda) = 0
  const auto& fx = fixtures::gamma_case();
  const HierarchyConstants hc = HierarchyConstants::make(0.5, 3);
  CHECK(hc.c1_at(3) == doctest::Approx(0.0));
  const RhsBundle rb = assemble_rhs(3, fx.profile, fx.corrections, fx.law, hc);
  CHECK_THROWS_AS(solve_correction_collocation(3, rb, fx.profile, fx.law, hc,
                                               fx.corrections),
                  HierarchyError);
}

TEST_CASE("missing lower level is a precondition error") {
  const auto& fx = fixtures::gamma_case();
  const HierarchyConstants hc = HierarchyConstants::make(0.5, 2);
  CorrectionSet empty = build_hierarchy(fx.profile, fx.law, 0);
  CHECK_THROWS_AS(assemble_rhs(2, fx.profile, empty, fx.law, hc),
                  HierarchyError);
}
