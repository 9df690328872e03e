#include "dwlab/hierarchy.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "dwlab/banded.hpp"
#include "dwlab/errors.hpp"

namespace dwlab {

const Correction& CorrectionSet::at(int i) const {
  if (!has(i)) {
    std::ostringstream os;
    os << "correction level " << i << " not built (have " << levels.size()
       << ")";
    throw HierarchyError("corrections", os.str());
  }
  return levels[i - 1];
}

const std::vector<double>* RhsBundle::taylor(int kind, int j) const {
  for (const auto& t : taylor_terms)
    if (t.kind == kind && t.j == j) return &t.values;
  return nullptr;
}

namespace {

// Enumerates ordered tuples (l_1, ..., l_parts), l_r >= 1, summing to total.
void for_each_composition(int total, int parts,
                          const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> tuple(parts, 1);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == parts - 1) {
      if (remaining >= 1) {
        tuple[pos] = remaining;
        fn(tuple);
      }
      return;
    }
    for (int v = 1; v <= remaining - (parts - 1 - pos); ++v) {
      tuple[pos] = v;
      rec(pos + 1, remaining - v);
    }
  };
  if (parts >= 1 && total >= parts) rec(0, total);
}

}  // namespace

RhsBundle assemble_rhs(int i, const WaveProfile& profile,
                       const CorrectionSet& sofar, const PressureLaw& law,
                       const HierarchyConstants& hc) {
  const XiGrid& g = profile.grid;
  const int nn = g.size();
  const double lambda = profile.params.lambda;
  const double sigma = 1.0 - lambda;
  const double a = 0.5 * (1.0 + lambda);

  if (i < 1) throw HierarchyError("rhs", "level index must be >= 1");
  for (int j = 1; j < i; ++j) {
    if (!sofar.has(j)) {
      std::ostringstream os;
      os << "assemble_rhs(" << i << ") needs correction level " << j;
      throw HierarchyError("rhs", os.str());
    }
  }
  if (static_cast<int>(sofar.G0.size()) != nn)
    throw HierarchyError("rhs", "seed level G0 missing or on a wrong grid");

  RhsBundle b;
  b.i = i;
  b.h.assign(nn, 0.0);

  if (i == 1) {
    for (int j = 0; j < nn; ++j) {
      const double pxi = profile.p_xi[j];
      b.h[j] = a * g.nodes[j] * pxi + pxi * pxi / profile.rho[j];
    }
  } else {
    b.h_tilde.assign(nn, 0.0);

    // pressure expansion sums, j >= 2 (the j = 1 term lives in the operator)
    for (int j = 2; j <= i; ++j) {
      std::vector<double> term(nn, 0.0);
      for_each_composition(i, j, [&](const std::vector<int>& l) {
        for (int q = 0; q < nn; ++q) {
          double prod = 1.0;
          for (int r : l) prod *= sofar.at(r).rho[q];
          term[q] += prod;
        }
      });
      double jfact = 1.0;
      for (int r = 2; r <= j; ++r) jfact *= r;
      for (int q = 0; q < nn; ++q)
        term[q] *= law.deriv(profile.rho[q], j) / jfact;
      for (int q = 0; q < nn; ++q) b.h_tilde[q] += term[q];
      b.taylor_terms.push_back({1, j, std::move(term)});
    }

    // momentum-flux sums: (p(rho)')^2/rho^(j+1) and cross terms with m
    for (int j = 1; j <= i - 1; ++j) {
      std::vector<double> term(nn, 0.0);
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      for_each_composition(i - 1, j, [&](const std::vector<int>& l) {
        for (int q = 0; q < nn; ++q) {
          double prod_rho = 1.0;
          for (int r : l) prod_rho *= sofar.at(r).rho[q];
          double prod_cross = sofar.at(l[0]).m[q];
          for (std::size_t s = 1; s < l.size(); ++s)
            prod_cross *= sofar.at(l[s]).rho[q];
          const double rb = profile.rho[q];
          const double pxi = profile.p_xi[q];
          term[q] += sign * pxi * pxi / std::pow(rb, j + 1) * prod_rho +
                     2.0 * sign * pxi / std::pow(rb, j) * prod_cross;
        }
      });
      for (int q = 0; q < nn; ++q) b.h_tilde[q] += term[q];
      b.taylor_terms.push_back({2, j, std::move(term)});
    }

    // pure m_l m_l' sums
    for (int j = 2; j <= i - 1; ++j) {
      std::vector<double> term(nn, 0.0);
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      for_each_composition(i - 1, j, [&](const std::vector<int>& l) {
        for (int q = 0; q < nn; ++q) {
          double prod = sofar.at(l[0]).m[q] * sofar.at(l[1]).m[q];
          for (std::size_t s = 2; s < l.size(); ++s)
            prod *= sofar.at(l[s]).rho[q];
          term[q] += sign / std::pow(profile.rho[q], j - 1) * prod;
        }
      });
      for (int q = 0; q < nn; ++q) b.h_tilde[q] += term[q];
      b.taylor_terms.push_back({3, j, std::move(term)});
    }

    // The xi m_{i-1} transport term enters with a minus sign: expanding the
    // time derivative of (1+t)^(-(i-1/2)sigma) m_{i-1}(xi) and regrouping,
    // the level-i combination is
    //   d/dxi[Taylor - a xi m_{i-1}] - (i sigma - 1) m_{i-1},
    // and only then does the G_{i-1} coefficient reduce to exactly c2_i (a
    // plus sign would break the mass chain and leave the level-(i) residual
    // undamped, which the decay scans catch immediately).
    const Correction& prev = sofar.at(i - 1);
    for (int q = 0; q < nn; ++q)
      b.h_tilde[q] -= a * g.nodes[q] * prev.m[q];

    const double c_shift = a * (i * sigma - 1.0);
    for (int q = 0; q < nn; ++q)
      b.h[q] = b.h_tilde[q] - c_shift * g.nodes[q] * prev.G[q];
  }

  for (double v : b.h)
    if (!std::isfinite(v))
      throw HierarchyError("rhs", "non-finite source term");

  b.dh = derivative1(b.h, g.h);
  b.rhs.assign(nn, 0.0);
  const double c2 = hc.c2_at(i);
  const std::vector<double>& Gprev = (i == 1) ? sofar.G0 : sofar.at(i - 1).G;
  for (int q = 0; q < nn; ++q) b.rhs[q] = c2 * Gprev[q] - b.dh[q];
  return b;
}

namespace {

// Level operator on interior nodes, bandwidth 2:
//   A = p'(rho) D2 + (p''(rho) rho' + a xi) D1 + (c1 + a) I.
BandedMatrix level_operator(const WaveProfile& profile, const PressureLaw& law,
                            double c1) {
  const XiGrid& g = profile.grid;
  const int n = g.n;
  const int m = n - 1;
  const double ih = 1.0 / g.h;
  const double ih2 = ih * ih;
  const double a = 0.5 * (1.0 + profile.params.lambda);

  BandedMatrix A(m, 2, 2);
  for (int j = 1; j < n; ++j) {
    const double p1 = law.deriv(profile.rho[j], 1);
    const double p2 = law.deriv(profile.rho[j], 2);
    const double conv = p2 * profile.drho[j] + a * g.nodes[j];
    auto put = [&](int col, double w2, double w1) {
      if (col < 1 || col > n - 1) return;
      A.add(j - 1, col - 1, p1 * w2 + conv * w1);
    };
    if (j >= 2 && j <= n - 2) {
      put(j - 2, -ih2 / 12.0, ih / 12.0);
      put(j - 1, 16.0 * ih2 / 12.0, -8.0 * ih / 12.0);
      put(j, -30.0 * ih2 / 12.0, 0.0);
      put(j + 1, 16.0 * ih2 / 12.0, 8.0 * ih / 12.0);
      put(j + 2, -ih2 / 12.0, -ih / 12.0);
    } else {
      put(j - 1, ih2, -0.5 * ih);
      put(j, -2.0 * ih2, 0.0);
      put(j + 1, ih2, 0.5 * ih);
    }
    A.add(j - 1, j - 1, c1 + a);
  }
  return A;
}

}  // namespace

Correction solve_correction_collocation(int i, const RhsBundle& rhs,
                                        const WaveProfile& profile,
                                        const PressureLaw& law,
                                        const HierarchyConstants& hc,
                                        const CorrectionSet& sofar,
                                        const CollocationOptions& opts) {
  const XiGrid& g = profile.grid;
  const int n = g.n;
  const double c1 = hc.c1_at(i);
  const double c2 = hc.c2_at(i);
  if (c1 == 0.0)
    throw HierarchyError("collocation",
                         "c1_i = 0: mass constraint degenerates at this level");

  const double mass_prev = (i == 1) ? sofar.mass_G0 : sofar.at(i - 1).mass;
  const double mass_target = c2 / c1 * mass_prev;

  // interior unknowns; Dirichlet zeros at +-L
  std::vector<double> f(n - 1), w(n - 1);
  const std::vector<double> wfull = simpson_weights(g.size(), g.h);
  for (int j = 1; j < n; ++j) {
    f[j - 1] = rhs.rhs[j];
    w[j - 1] = wfull[j];
  }

  BandedMatrix A = level_operator(profile, law, c1);
  double mu = 0.0;
  std::vector<double> Gin;
  try {
    Gin = solve_bordered(A, w, w, f, mass_target, &mu);
  } catch (const SolverError& e) {
    throw HierarchyError("collocation", e.what());
  }

  std::vector<double> G(n + 1, 0.0);
  for (int j = 1; j < n; ++j) G[j] = Gin[j - 1];

  Correction c = momentum_from_G(i, std::move(G), g, hc);
  c.mass_target = mass_target;
  c.mass = integrate(c.G, g.h);

  // honest residual of the discrete system, including the multiplier shift
  BandedMatrix Acheck = level_operator(profile, law, c1);
  std::vector<double> r = Acheck.multiply(Gin);
  for (int j = 0; j < n - 1; ++j) r[j] = r[j] + mu * w[j] - f[j];
  c.ode_residual_l2 = l2_norm(r, g.h);

  const double rhs_l2 = l2_norm(rhs.rhs, g.h);
  if (c.ode_residual_l2 > opts.tol_rel * std::max(1.0, rhs_l2)) {
    std::ostringstream os;
    os << "level " << i << " collocation residual " << c.ode_residual_l2
       << " exceeds " << opts.tol_rel * std::max(1.0, rhs_l2);
    throw HierarchyError("collocation", os.str());
  }
  if (std::abs(c.mass - mass_target) > 1e-7) {
    std::ostringstream os;
    os << "level " << i << " mass " << c.mass << " misses target "
       << mass_target;
    throw HierarchyError("collocation", os.str());
  }
  return c;
}

Correction momentum_from_G(int i, std::vector<double> G, const XiGrid& grid,
                           const HierarchyConstants& hc) {
  Correction c;
  c.i = i;
  c.G = std::move(G);
  c.rho = derivative1(c.G, grid.h);
  c.drho = derivative1(c.rho, grid.h);
  const double a = 0.5 * (1.0 + hc.lambda);
  const double c1 = hc.c1_at(i);
  c.m.resize(c.G.size());
  for (std::size_t j = 0; j < c.G.size(); ++j)
    c.m[j] = (c1 + a) * c.G[j] + a * grid.nodes[j] * c.rho[j];
  c.dm = derivative1(c.m, grid.h);
  return c;
}

double chi_norm(const std::vector<std::vector<double>>& derivs,
                const XiGrid& grid, int l) {
  if (l < 0 || static_cast<int>(derivs.size()) < l + 1)
    throw HierarchyError("chi_norm",
                         "need derivative tables up to the requested order");
  double total = 0.0;
  std::vector<double> integrand(grid.size());
  for (int r = 0; r <= l; ++r) {
    if (static_cast<int>(derivs[r].size()) != grid.size())
      throw HierarchyError("chi_norm", "derivative table size mismatch");
    for (int s = 0; s <= l; ++s) {
      for (int j = 0; j < grid.size(); ++j) {
        const double xs = std::pow(grid.nodes[j], s);
        const double v = xs * derivs[r][j];
        integrand[j] = v * v;
      }
      total += integrate(integrand, grid.h);
    }
  }
  return std::sqrt(total);
}

CorrectionSet build_hierarchy(const WaveProfile& profile,
                              const PressureLaw& law, int k,
                              HierarchyMethod method,
                              const CollocationOptions& copts,
                              const FourierOptions& fopts) {
  if (k < 0) throw HierarchyError("hierarchy", "order must be >= 0");

  CorrectionSet set;
  set.k = k;
  const int nn = profile.grid.size();
  set.G0.resize(nn);
  const double one_lam = 1.0 + profile.params.lambda;
  for (int j = 0; j < nn; ++j) set.G0[j] = profile.p_xi[j] / one_lam;
  set.mass_G0 = (law.value(profile.params.rho_plus) -
                 law.value(profile.params.rho_minus)) / one_lam;
  if (k == 0) return set;

  const HierarchyConstants hc = HierarchyConstants::make(profile.params.lambda, k);
  for (int i = 1; i <= k; ++i) {
    RhsBundle rhs = assemble_rhs(i, profile, set, law, hc);
    if (method == HierarchyMethod::Collocation) {
      set.levels.push_back(
          solve_correction_collocation(i, rhs, profile, law, hc, set, copts));
    } else {
      set.levels.push_back(
          solve_correction_fourier(i, rhs, profile, law, hc, set, fopts)
              .correction);
    }
  }
  return set;
}

}  // namespace dwlab
