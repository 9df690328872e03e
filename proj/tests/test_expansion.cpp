#include <doctest.h>

#include <cmath>

#include "dwlab/errors.hpp"
#include "dwlab/expansion.hpp"
#include "fixtures.hpp"

using namespace dwlab;

TEST_CASE("order-0 evaluation at t = 0 returns the profile") {
  const auto& fx = fixtures::gamma_case();
  const ExpansionEvaluator ev(fx.profile, fx.corrections, 0, fx.law);
  const auto s = ev.evaluate(0.0, 0.0);
  const int mid = fx.grid.n / 2;
  CHECK(s.rho == doctest::Approx(fx.profile.rho[mid]).epsilon(1e-14));
  CHECK(s.m == doctest::Approx(fx.profile.Mbar[mid]).epsilon(1e-14));
}

TEST_CASE("far field extends by the constant states") {
  const auto& fx = fixtures::gamma_case();
  const ExpansionEvaluator ev(fx.profile, fx.corrections, 2, fx.law);
  const auto right = ev.evaluate(1e6, 3.0);
  CHECK(right.rho == fx.params.rho_plus);
  CHECK(right.m == 0.0);
  const auto left = ev.evaluate(-1e6, 3.0);
  CHECK(left.rho == fx.params.rho_minus);
  CHECK(left.m == 0.0);
}

TEST_CASE("expansion weights follow the exponent arithmetic at t = 3") {
  const auto& fx = fixtures::gamma_case();
  const ExpansionEvaluator ev(fx.profile, fx.corrections, 2, fx.law);
  // at lambda = 1/2: (1+3)^(-sigma) = 1/2 and (1+3)^(-2 sigma) = 1/4
  const double xi = 0.37;
  const double x = xi * std::pow(4.0, 0.75);
  const auto s = ev.evaluate(x, 3.0);
  const double expected = ev.level_rho(1, xi) * 0.5 +
                          ev.level_rho(2, xi) * 0.25;
  const ExpansionEvaluator ev0(fx.profile, fx.corrections, 0, fx.law);
  CHECK(s.rho - ev0.evaluate(x, 3.0).rho ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("constant state has identically zero source") {
  const Params prm(0.5, 1.0, 1.0);
  const XiGrid grid = XiGrid::make(8.0, 256);
  const PressureLaw law = PressureLaw::gamma_law();
  const WaveProfile w = solve_wave(prm, law, grid);
  const CorrectionSet corr = build_hierarchy(w, law, 0);
  const ExpansionEvaluator ev(w, corr, 0, law);
  CHECK(max_abs(ev.source_on_nodes(5.0)) < 1e-15);
}

TEST_CASE("source residual decays at the predicted rates") {
  const auto& fx = fixtures::gamma_case();
  const auto times = log_spaced_times(10.0, 1e4, 25);
  for (int k : {0, 1, 2}) {
    const ExpansionEvaluator ev(fx.profile, fx.corrections, k, fx.law);
    const ResidualScan scan = residual_decay_scan(ev, times);
    CAPTURE(k);
    CHECK(scan.pass_linf);
    CHECK(scan.pass_l2);
    CHECK(scan.fit_ok);
  }
}

TEST_CASE("each correction level lowers the source at fixed time") {
  const auto& fx = fixtures::gamma_case();
  double prev = 1e300;
  for (int k : {0, 1, 2}) {
    const ExpansionEvaluator ev(fx.profile, fx.corrections, k, fx.law);
    const double s = max_abs(ev.source_on_nodes(100.0));
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("conservation structure of the expansion pair") {
  const auto& fx = fixtures::gamma_case();
  const ExpansionEvaluator ev(fx.profile, fx.corrections, 2, fx.law);
  const double t = 7.0;
  const auto slice = ev.slice(t);
  // analytic d rho/dt from the same level tables
  const double sigma = 0.5, a = 0.75;
  std::vector<double> rho_t(fx.grid.size(), 0.0);
  for (int j = 0; j < fx.grid.size(); ++j) {
    rho_t[j] = -a * fx.grid.nodes[j] * fx.profile.drho[j] / (1.0 + t);
    for (int i = 1; i <= 2; ++i) {
      const double w = std::pow(1.0 + t, -i * sigma - 1.0);
      rho_t[j] -= w * (i * sigma * fx.corrections.at(i).rho[j] +
                       a * fx.grid.nodes[j] * fx.corrections.at(i).drho[j]);
    }
  }
  const double jac = std::pow(1.0 + t, -0.5 * 1.5);
  double worst = 0.0;
  for (int j = 8; j < fx.grid.size() - 8; ++j)
    worst = std::max(worst, std::abs(rho_t[j] + jac * slice.dm[j]));
  CHECK(worst < 1e-7);
}

TEST_CASE("positivity guard trips when high orders overwhelm the profile") {
  const Params prm(0.8, 1.0, 1.05);
  const PressureLaw law = PressureLaw::gamma_law(1.4, 1.0);
  const XiGrid grid = XiGrid::make(12.0, 1024);
  const WaveProfile w = solve_wave(prm, law, grid);
  const CorrectionSet corr = build_hierarchy(w, law, 6);
  const ExpansionEvaluator ev(w, corr, 6, law);
  CHECK_THROWS_AS(ev.source_on_nodes(0.05), SolverError);
}

TEST_CASE("re-centering shift") {
  const auto& fx = fixtures::gamma_case();
  const ExpansionEvaluator ev(fx.profile, fx.corrections, 2, fx.law);

  const int n = 4001;
  const double X = 40.0, dx = 2.0 * X / (n - 1);
  std::vector<double> x(n), rho0(n);
  for (int j = 0; j < n; ++j) x[j] = -X + j * dx;

  SUBCASE("zero for matching data") {
    for (int j = 0; j < n; ++j) rho0[j] = ev.evaluate(x[j], 0.0).rho;
    CHECK(std::abs(shift_x0(x, rho0, ev)) < 1e-10);
  }
  SUBCASE("translated data recovers minus the translation") {
    const double a = 0.1;
    for (int j = 0; j < n; ++j) rho0[j] = ev.evaluate(x[j] - a, 0.0).rho;
    CHECK(shift_x0(x, rho0, ev) == doctest::Approx(-a).epsilon(1e-3));
  }
  SUBCASE("mass-neutral perturbations do not move the shift") {
    for (int j = 0; j < n; ++j) {
      const double u = x[j] / 3.0;
      rho0[j] = ev.evaluate(x[j], 0.0).rho +
                0.01 * u * std::exp(-u * u);  // odd, zero mass
    }
    CHECK(std::abs(shift_x0(x, rho0, ev)) < 1e-10);
  }
}

TEST_CASE("shift is degenerate without a density jump") {
  const Params prm(0.5, 1.0, 1.0);
  const XiGrid grid = XiGrid::make(8.0, 256);
  const PressureLaw law = PressureLaw::gamma_law();
  const WaveProfile w = solve_wave(prm, law, grid);
  const CorrectionSet corr = build_hierarchy(w, law, 0);
  const ExpansionEvaluator ev(w, corr, 0, law);
  std::vector<double> x = {-1.0, 0.0, 1.0}, rho0 = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(shift_x0(x, rho0, ev), ConfigError);
}

TEST_CASE("sampled source on a user grid matches the node route") {
  const auto& fx = fixtures::gamma_case();
  const ExpansionEvaluator ev(fx.profile, fx.corrections, 2, fx.law);
  const double t = 50.0;
  const double scale = std::pow(1.0 + t, 0.75);
  // map a subset of table nodes to x so the cubic interpolation is exact
  const int stride = 1;
  std::vector<double> x;
  for (int j = 256; j <= fx.grid.n - 256; j += stride)
    x.push_back(fx.grid.nodes[j] * scale);
  bool under = false;
  const auto S = ev.source_direct(x, t, false, &under);
  const auto S_nodes = ev.source_on_nodes(t);
  double worst = 0.0;
  for (std::size_t q = 8; q + 8 < x.size(); ++q)
    worst = std::max(worst, std::abs(S[q] - S_nodes[256 + q]));
  CHECK(worst < 1e-10);
}

TEST_CASE("strict mode rejects unresolved sampling grids") {
  const auto& fx = fixtures::gamma_case();
  const ExpansionEvaluator ev(fx.profile, fx.corrections, 2, fx.law);
  std::vector<double> coarse;
  for (int j = 0; j < 32; ++j) coarse.push_back(-10.0 + j * 20.0 / 31.0);
  CHECK_THROWS_AS(ev.source_direct(coarse, 1.0, true), SolverError);
  bool under = false;
  ev.source_direct(coarse, 1.0, false, &under);
  CHECK(under);
}

TEST_CASE("decay scan preconditions") {
  const auto& fx = fixtures::gamma_case();
  const ExpansionEvaluator ev(fx.profile, fx.corrections, 1, fx.law);
  CHECK_THROWS_AS(residual_decay_scan(ev, {1.0, 2.0, 3.0}), SolverError);
  CHECK_THROWS_AS(
      residual_decay_scan(ev, {1, 2, 3, 4, 5, 6, 7, 8}), SolverError);
}
