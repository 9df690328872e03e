#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "dwlab/errors.hpp"
#include "dwlab/hierarchy.hpp"

namespace dwlab {

namespace {

using cplx = std::complex<double>;

// Forward transform of a tabulated real function at one frequency:
// trapezoid over the grid (the integrand decays to the far-field constant 0).
cplx forward_at(const std::vector<double>& f, const XiGrid& g, double eta) {
  const cplx rot = std::polar(1.0, -g.h * eta);
  cplx z = std::polar(1.0, -g.nodes[0] * eta);
  cplx acc = 0.5 * f[0] * z;
  z *= rot;
  for (int j = 1; j < g.n; ++j) {
    acc += f[j] * z;
    z *= rot;
  }
  acc += 0.5 * f[g.n] * z;
  return acc * g.h;
}

// Inverse transform of a conjugate-symmetric spectrum sampled on
// eta_m = m * d_eta, m = 0..M, evaluated together with its xi-derivative.
void inverse_with_deriv(const std::vector<cplx>& F, double d_eta,
                        const XiGrid& g, std::vector<double>& out,
                        std::vector<double>& dout) {
  const int M = static_cast<int>(F.size()) - 1;
  out.assign(g.size(), 0.0);
  dout.assign(g.size(), 0.0);
  for (int j = 0; j < g.size(); ++j) {
    const cplx rot = std::polar(1.0, g.nodes[j] * d_eta);
    cplx z = 1.0;
    cplx acc = 0.5 * F[0] * z;     // F[0] = 0 by construction
    cplx dacc = 0.0;
    z *= rot;
    for (int m = 1; m < M; ++m) {
      const cplx t = F[m] * z;
      acc += t;
      dacc += cplx(0.0, m * d_eta) * t;
      z *= rot;
    }
    const cplx t = F[M] * z;
    acc += 0.5 * t;
    dacc += 0.5 * cplx(0.0, M * d_eta) * t;
    out[j] = d_eta / M_PI * acc.real();
    dout[j] = d_eta / M_PI * dacc.real();
  }
}

// Cubic interpolation value of psi at x inside cell m (nodes m-1..m+2,
// clamped near the ends).
cplx psi_cubic(const std::vector<cplx>& psi, double d_eta, int m, double x) {
  const int M = static_cast<int>(psi.size()) - 1;
  int base = m - 1;
  if (base < 0) base = 0;
  if (base > M - 3) base = M - 3;
  const double s = x / d_eta - base;
  // Lagrange basis on nodes 0,1,2,3
  const double b0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
  const double b1 = s * (s - 2.0) * (s - 3.0) / 2.0;
  const double b2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
  const double b3 = s * (s - 1.0) * (s - 2.0) / 6.0;
  return b0 * psi[base] + b1 * psi[base + 1] + b2 * psi[base + 2] +
         b3 * psi[base + 3];
}

// Integrating-factor kernel sweep: solves
//   (1+lambda)/2 eta F' + (-c1 + a eta^2) F = eta psi(eta),  F(0) = 0
// via the explicit solution
//   F(eta) = 2/(1+lambda) eta^-b e^(-alpha eta^2)
//            * Int_0^eta x^(b-1) e^(alpha x^2) x psi(x) dx,
// marched cell by cell in the overflow-free form. Near eta = 0 the
// fractional power x^b is integrated by exact moments against a cubic
// interpolant of e^(alpha x^2) psi(x); away from it, 4-point Gauss on the
// shifted-exponent weight.
std::vector<cplx> kernel_sweep(const std::vector<cplx>& psi, double d_eta,
                               double b, double alpha, double lambda) {
  static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
  static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                               0.6521451548625461, 0.3478548451374538};

  const int M = static_cast<int>(psi.size()) - 1;
  std::vector<cplx> F(M + 1, 0.0);
  const double pref = 2.0 / (1.0 + lambda);

  for (int m = 0; m < M; ++m) {
    const double e0 = m * d_eta;
    const double e1 = (m + 1) * d_eta;
    cplx local;

    if (e1 <= 1.0) {
      // exact moments of x^b against a cubic of g(x) = e^(alpha x^2) psi(x)
      int base = m - 1;
      if (base < 0) base = 0;
      if (base > M - 3) base = M - 3;
      cplx gv[4];
      for (int q = 0; q < 4; ++q) {
        const double xq = (base + q) * d_eta;
        gv[q] = std::exp(alpha * xq * xq) * psi[base + q];
      }
      // cubic through (u_q, gv[q]) with u = x/d_eta - base: rebuild power
      // coefficients in x
      const double x0 = base * d_eta;
      // divided-difference form -> monomials in (x - x0)
      cplx c0 = gv[0];
      cplx c1 = (gv[1] - gv[0]) / d_eta;
      cplx c2 = (gv[2] - 2.0 * gv[1] + gv[0]) / (2.0 * d_eta * d_eta);
      cplx c3 = (gv[3] - 3.0 * gv[2] + 3.0 * gv[1] - gv[0]) /
                (6.0 * d_eta * d_eta * d_eta);
      // Newton form: g = c0 + c1 (x-x0) + c2 (x-x0)(x-x1) + c3 (x-x0)(x-x1)(x-x2)
      const double x1 = x0 + d_eta, x2 = x0 + 2.0 * d_eta;
      // expand into a0 + a1 x + a2 x^2 + a3 x^3
      const cplx a3 = c3;
      const cplx a2 = c2 - c3 * (x0 + x1 + x2);
      const cplx a1 = c1 - c2 * (x0 + x1) +
                      c3 * (x0 * x1 + x0 * x2 + x1 * x2);
      const cplx a0 = c0 - c1 * x0 + c2 * x0 * x1 - c3 * x0 * x1 * x2;
      auto mom = [&](double p) {
        return (std::pow(e1, p + 1.0) - std::pow(e0, p + 1.0)) / (p + 1.0);
      };
      const cplx integral = a0 * mom(b) + a1 * mom(b + 1.0) +
                            a2 * mom(b + 2.0) + a3 * mom(b + 3.0);
      local = pref * std::pow(e1, -b) * std::exp(-alpha * e1 * e1) * integral;
    } else {
      // stable weighted Gauss: all factors <= 1 on the cell
      const double half = 0.5 * (e1 - e0);
      const double mid = 0.5 * (e0 + e1);
      cplx acc = 0.0;
      for (int q = 0; q < 4; ++q) {
        const double x = mid + half * gx[q];
        const double wgt = std::pow(x / e1, b) *
                           std::exp(-alpha * (e1 * e1 - x * x));
        acc += gw[q] * wgt * psi_cubic(psi, d_eta, m, x);
      }
      local = pref * half * acc;
    }

    const double decay = (m == 0)
                             ? 0.0
                             : std::pow(e0 / e1, b) *
                                   std::exp(-alpha * (e1 * e1 - e0 * e0));
    F[m + 1] = decay * F[m] + local;
  }
  return F;
}

}  // namespace

FourierResult solve_correction_fourier(int i, const RhsBundle& rhs,
                                       const WaveProfile& profile,
                                       const PressureLaw& law,
                                       const HierarchyConstants& hc,
                                       const CorrectionSet& sofar,
                                       const FourierOptions& opts) {
  const XiGrid& g = profile.grid;
  const int nn = g.size();
  const double lambda = profile.params.lambda;
  const double a_half = 0.5 * (1.0 + lambda);
  const double c1 = hc.c1_at(i);
  if (!(c1 < 0.0)) {
    std::ostringstream os;
    os << "kernel exponent needs c1_" << i << " < 0, got " << c1;
    throw HierarchyError("fourier", os.str());
  }
  const double b = -2.0 * c1 / (1.0 + lambda);
  const double pp = law.deriv(profile.params.rho_plus, 1);
  const double alpha = pp / (1.0 + lambda);

  // zero-mean transformed source
  std::vector<double> h_src(nn, 0.0);
  if (i == 1) {
    // (1/2) p'(rho) (p(rho))'' + (1+lambda)/4 xi (p(rho))' - h_1
    for (int j = 0; j < nn; ++j)
      h_src[j] = 0.5 * law.deriv(profile.rho[j], 1) * profile.p_xixi[j] +
                 0.5 * a_half * g.nodes[j] * profile.p_xi[j] - rhs.h[j];
  } else {
    const Correction& prev = sofar.at(i - 1);
    const double ratio = hc.c2_at(i) / c1;
    for (int j = 0; j < nn; ++j)
      h_src[j] = -ratio * (law.deriv(profile.rho[j], 1) * prev.rho[j] +
                           a_half * g.nodes[j] * prev.G[j]) -
                 rhs.h[j];
  }

  std::vector<double> V(nn);
  for (int j = 0; j < nn; ++j) V[j] = pp - law.deriv(profile.rho[j], 1);

  const int M = opts.n_eta;
  const double d_eta = opts.eta_max / M;

  // The source enters as d/dxi h_src. Transform the same tabulated
  // derivative the collocation route consumes, so the cross-validation
  // isolates the operator inversion instead of comparing two different
  // discrete derivatives of the source. Hd(eta)/eta has a removable limit
  // at eta = 0 (Hd(0) is the telescoped integral of a derivative, ~0).
  const std::vector<double> dh_src = derivative1(h_src, g.h);
  std::vector<cplx> Hd(M + 1);
  for (int m = 0; m <= M; ++m) Hd[m] = forward_at(dh_src, g, m * d_eta);
  std::vector<double> xi_dh(nn);
  for (int j = 0; j < nn; ++j) xi_dh[j] = g.nodes[j] * dh_src[j];
  const double hd_slope0 = integrate(xi_dh, g.h);  // -i * this = Hd'(0)

  std::vector<double> Gt(nn, 0.0), dGt(nn, 0.0);
  std::vector<double> Gt_prev(nn, 0.0);
  std::vector<cplx> psi(M + 1), F;
  std::vector<double> W(nn);

  FourierResult out;
  double dist_prev = 0.0;
  int bad_streak = 0;

  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    // psi(eta) = R(eta)/eta with
    //   R = -( i eta W^(eta) + Hd(eta) ),  W = V dG/dxi  (lagged term)
    for (int j = 0; j < nn; ++j) W[j] = V[j] * dGt[j];
    for (int m = 0; m <= M; ++m) {
      const cplx what = forward_at(W, g, m * d_eta);
      if (m == 0) {
        // lim Hd(eta)/eta = Hd'(0) = -i Int xi dh
        psi[m] = cplx(0.0, -1.0) * what + cplx(0.0, 1.0) * hd_slope0;
      } else {
        psi[m] = cplx(0.0, -1.0) * what - Hd[m] / (m * d_eta);
      }
    }
    F = kernel_sweep(psi, d_eta, b, alpha, lambda);

    Gt_prev.swap(Gt);
    inverse_with_deriv(F, d_eta, g, Gt, dGt);

    double dist2 = 0.0;
    for (int j = 0; j < nn; ++j) {
      const double d = Gt[j] - Gt_prev[j];
      dist2 += d * d;
    }
    const double dist = std::sqrt(dist2 * g.h);
    out.distances.push_back(dist);
    out.sweeps = sweep;

    if (sweep >= 2 && dist_prev > 0.0) {
      const double factor = dist / dist_prev;
      out.contraction.push_back(factor);
      if (factor >= 1.0) {
        if (++bad_streak >= 2) {
          std::ostringstream os;
          os << "fixed point diverges at level " << i
             << " (contraction factor " << factor
             << "); the density jump is too large for the iteration";
          throw HierarchyError("fourier", os.str());
        }
      } else {
        bad_streak = 0;
      }
    }
    dist_prev = dist;
    if (dist < opts.tol) break;
  }

  // undo the zero-mean transformation
  std::vector<double> G(nn);
  if (i == 1) {
    for (int j = 0; j < nn; ++j) G[j] = Gt[j] - 0.5 * profile.p_xi[j];
  } else {
    const Correction& prev = sofar.at(i - 1);
    const double ratio = hc.c2_at(i) / c1;
    for (int j = 0; j < nn; ++j) G[j] = Gt[j] + ratio * prev.G[j];
  }

  Correction c = momentum_from_G(i, std::move(G), g, hc);
  c.mass = integrate(c.G, g.h);
  const double mass_prev = (i == 1) ? sofar.mass_G0 : sofar.at(i - 1).mass;
  c.mass_target = hc.c2_at(i) / c1 * mass_prev;
  out.correction = std::move(c);
  return out;
}

}  // namespace dwlab
