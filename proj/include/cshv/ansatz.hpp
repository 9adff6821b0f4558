// Construction of the approximate-solution machinery: the background u0, the
// holomorphic torus function H tied to the vortex configuration, the map
// sigma0 (inverse of the antiderivative of H0 with residue-cancelling
// exponential correction), Liouville profiles, projected profiles, the
// partition-adapted constant Theta, boundary flux f_a, kernel elements, and
// the weighted norm used by the error estimates.
#pragma once

#include <memory>

#include "cshv/field.hpp"
#include "cshv/green.hpp"
#include "cshv/series.hpp"
#include "cshv/torus.hpp"

namespace cshv {

// u0 = -4 pi sum_j n_j G(z - p_j); equals -infinity at the vortex points
// (e^{u0} vanishes there smoothly).
PeriodicField build_u0(const Green& green, const VortexConfig& cfg, int M);

// The holomorphic function H with |H0|^2 = e^{u0 + 8 pi sum_l (n_l+1) G(.,xi_l)}
// where H0 = H / prod_l (z - xi_l)^{n_l+2}. The leading product runs over the
// non-concentration vortex points only; the rotation gauge makes H(xi_1) > 0.
struct HData {
  VortexConfig cfg;
  std::shared_ptr<Green> green;
  cx gauge = 1.0;
  int deg = 0;

  std::vector<LocalSeries> Hl;   // series of H^l about xi_l (lo = 0)
  std::vector<cx> c0;             // residue-cancelling coefficients
  std::vector<cx> alpha0;         // H^l(xi_l)/(n_l+1)
  std::vector<double> rfit;       // fit radii about each xi_l

  int n_l(std::size_t l) const { return cfg.n_of_xi(l); }

  // P_l(z) = prod_{l' != l} (z - xi_{l'})^{n_{l'}+2}.
  cx P_l(std::size_t l, cx z) const;

  cx Hval(cx z) const;              // gauge included
  cx Hl_val(std::size_t l, cx z) const;
  cx H0val(cx z) const;
  // E(z) = sum_l c0_l (z - xi_l)^{n_l+1} P_l(z); corrections exp(-E).
  cx Eval(cx z) const;
  cx Tval(cx z) const;              // H0val * exp(-E): integrand of A
};

HData build_H(const Green& green, const VortexConfig& cfg, int deg = 0);

// sigma0 = -1/A with A an antiderivative of Tval; A fixed by a zero constant
// term in its regular part at xi_1. Grid values are produced by marching
// integrals of Tval between nodes (rows in parallel, deterministic), with
// local series overriding nodes near the poles xi_l.
struct Sigma0Data {
  HData h;
  int M = 0;
  ComplexGrid A, sigma0, sigma0p;
  std::vector<LocalSeries> A_series;       // Laurent about xi_l, constant fixed
  std::vector<LocalSeries> sigma0_series;  // lo = n_l + 1
  std::vector<LocalSeries> q0_series;      // (n_l+1)-th root chart, lo = 1
  std::vector<LocalSeries> q0inv_series;   // reversion, series in w
  std::vector<double> r_override;          // series-override radii

  const Torus& torus() const { return h.cfg.torus; }

  cx A_at(cx z) const;
  cx sigma0_at(cx z) const;
  cx sigma0p_at(cx z) const;

  // Distance from xi_l within which the series chart is used.
  int override_of(cx z) const;  // index l or -1
};

Sigma0Data build_sigma0(const HData& h, int M);

// log(8 delta^2) - 2 log(delta^2 + |sigma0 - a|^2) on the grid.
PeriodicField liouville_U(const Sigma0Data& s, double delta, cx a);

// Cut-off source chi(|z-xi_l|) |sigma0'|^2 e^U for the profile centered at
// xi_l; chi is the quintic smoothstep, 1 on B_eta, 0 outside B_{2 eta}.
PeriodicField profile_source(const Sigma0Data& s, double delta, cx a,
                             std::size_t l, double eta);

// Projection: solves Laplace(PU) = -(S - |S|/|Omega|), zero mean.
PeriodicField project_PU(const PeriodicField& S);

// Theta constant: -(1/|Omega|) * integral of log(|sigma0 - a|^4 /
// (delta^2+|sigma0-a|^2)^2). Implemented for a = 0 (singular points known).
double theta_constant(const Sigma0Data& s, double delta, int M_far = 0);

// Boundary flux f_a(z) (a = 0 supported): trapezoid with 4*Mb points on the
// boundary of the fundamental domain.
double boundary_flux_f(const Sigma0Data& s, cx z, int Mb = 0);

// Kernel elements Z0 = (d^2-|s|^2)/(d^2+|s|^2), Z = d (s-a)/(d^2+|s|^2) and
// their projections (source cut off like profile_source).
struct KernelElements {
  PeriodicField Z0, Zre, Zim;
  PeriodicField PZ0, PZre, PZim;
  double gram00 = 0.0;   // integral of Lap(PZ0) * PZ0
  double gram_re0 = 0.0; // integral of Lap(PZre) * PZ0
  double mass_dZ0 = 0.0; // integral of |s'|^2 e^U Z0 (cut off)
  double mass_dZre = 0.0;
};
KernelElements kernel_elements(const Sigma0Data& s, double delta, cx a,
                               std::size_t l, double eta);

// Weighted sup norm: sup (d^2+|sigma0-a|^2)^{1+gamma/2} /
// (d^gamma (|sigma0'|^2 + d^{2n/(n+1)})) * |h|.
double weighted_norm(const Sigma0Data& s, const PeriodicField& hfield,
                     double delta, cx a, double gamma);

// Elliptic-representation oracle for even rectangle configurations with
// concentration at 0: H0 = lam0 * prod (wp - wp(p_k))^{n_k or n_k/2}.
// Returns values of H0 (same gauge: H(0) > 0).
std::function<cx(cx)> elliptic_H0_oracle(const Green& green,
                                         const VortexConfig& cfg);

}  // namespace cshv
